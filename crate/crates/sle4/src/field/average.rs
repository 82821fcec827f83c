//! Circle and semicircle averages of sampled fields.

use super::grid::{DomainShape, FieldSample};
use crate::error::{SimError, SimResult};
use crate::C64;
use std::f64::consts::PI;

fn angle_count(eps: f64, delta: f64) -> usize {
    64 * ((eps / delta).ceil() as usize).max(1)
}

/// Average of the field over the full circle `∂B(z, eps)` by trapezoidal
/// quadrature of bilinear interpolants.
pub fn circle_average(field: &FieldSample, z: C64, eps: f64) -> SimResult<f64> {
    let d = &field.domain;
    if eps < 2.0 * d.delta {
        return Err(SimError::invalid(format!(
            "eps {eps} below mesh resolution 2·delta = {}",
            2.0 * d.delta
        )));
    }
    if !(d.contains(z.re - eps, z.im - eps) && d.contains(z.re + eps, z.im + eps)) {
        return Err(SimError::invalid(format!("circle at {z} radius {eps} exits the domain")));
    }
    let n = angle_count(eps, d.delta);
    let mut acc = 0.0;
    for k in 0..n {
        let th = 2.0 * PI * k as f64 / n as f64;
        acc += field.interp(z.re + eps * th.cos(), z.im + eps * th.sin());
    }
    Ok(acc / n as f64)
}

/// Which horizontal boundary line a semicircle is anchored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryEdge {
    Bottom,
    Top,
}

/// Average of the field over the semicircle `∂B((x, edge), eps)` opening into
/// the domain; trapezoidal weights over `64·⌈eps/delta⌉` intervals.
pub fn semicircle_average(
    field: &FieldSample,
    x: f64,
    eps: f64,
    edge: BoundaryEdge,
) -> SimResult<f64> {
    let d = &field.domain;
    if eps < 2.0 * d.delta {
        return Err(SimError::invalid(format!(
            "eps {eps} below mesh resolution 2·delta = {}",
            2.0 * d.delta
        )));
    }
    let (yc, up) = match edge {
        BoundaryEdge::Bottom => (d.y0, 1.0),
        BoundaryEdge::Top => (d.y1, -1.0),
    };
    if edge == BoundaryEdge::Top && d.shape == DomainShape::HalfplaneRect {
        return Err(SimError::invalid("top-edge averages are for strip domains"));
    }
    if !(d.contains(x - eps, yc) && d.contains(x + eps, yc) && d.contains(x, yc + up * eps)) {
        return Err(SimError::invalid(format!(
            "semicircle at x={x} radius {eps} exits the domain"
        )));
    }
    let n = angle_count(eps, d.delta);
    let mut acc = 0.0;
    for k in 0..=n {
        let th = PI * k as f64 / n as f64;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        acc += w * field.interp(x + eps * th.cos(), yc + up * eps * th.sin());
    }
    Ok(acc / n as f64)
}
