//! Quantum wedge fields in the strip parametrisation.
//!
//! A `(γ, α)`-wedge on the strip splits into an independent radial process
//! `X` (vertical-line averages) and the lateral block of the free-boundary
//! strip field. In the last-exit parametrisation the conditioned side obeys
//! `X_t = B_{2t} − (Q−α)t` kept non-positive; the unconditioned side runs a
//! drifted Brownian motion backwards.

use super::grid::{DomainShape, FieldSample, GridDomain, MeanConvention};
use super::spectral::{sample_strip_gff, StripBlock};
use crate::chaos::conditioned_bm_with_rng;
use crate::error::{SimError, SimResult};
use crate::path::SamplePath;
use rand::Rng;
use rand_distr::StandardNormal;

/// A sampled wedge field: lateral strip block plus the radial line process.
#[derive(Debug, Clone)]
pub struct WedgeField {
    pub lateral: FieldSample,
    /// X at the strip's x nodes (`t0` is the first cell centre).
    pub radial: SamplePath,
    pub alpha: f64,
    pub gamma: f64,
    /// Last-exit time consumed while bracketing the conditioned side.
    pub tau_diagnostic: f64,
}

impl WedgeField {
    /// Total field `X + h_L` as a strip sample.
    pub fn combined(&self) -> FieldSample {
        let (nx, ny) = self.lateral.domain.nodes();
        let mut values = self.lateral.values.clone();
        for i in 0..nx {
            let x = self.radial.values[i];
            for j in 0..ny {
                values[j * nx + i] += x;
            }
        }
        FieldSample::new(self.lateral.domain.clone(), values, MeanConvention::RadialAnchored)
    }
}

pub fn q_gamma(gamma: f64) -> f64 {
    2.0 / gamma + gamma / 2.0
}

/// Sample a `(γ, α)`-quantum wedge on a truncated strip.
///
/// Requires `γ = 2` (the critical artifact) and `α < Q_γ`. The strip's `x0`
/// must be a multiple of `delta` so the conditioned-side grid lands exactly
/// on the cell centres.
pub fn sample_wedge<R: Rng + ?Sized>(
    domain: &GridDomain,
    alpha: f64,
    gamma: f64,
    rng: &mut R,
) -> SimResult<WedgeField> {
    if domain.shape != DomainShape::Strip {
        return Err(SimError::invalid("sample_wedge needs a strip domain"));
    }
    if gamma != 2.0 {
        return Err(SimError::invalid("only the critical wedge (gamma = 2) is supported"));
    }
    let q = q_gamma(gamma);
    if !(alpha < q) {
        return Err(SimError::invalid(format!(
            "wedge undefined: alpha {alpha} must be below Q_gamma = {q}"
        )));
    }
    let drift = q - alpha;
    let delta = domain.delta;
    let (nx, _) = domain.nodes();

    // Conditioned side: X(t) = U(2t) with U the drifted BM (slope drift/2)
    // conditioned to stay negative, sampled at s-steps of size delta so that
    // s = 2t lands on integer indices for every positive cell centre.
    let x_max = domain.x1.max(0.0);
    let cond = if x_max > 0.0 {
        Some(conditioned_bm_with_rng(drift / 2.0, delta, 2.0 * x_max, rng)?)
    } else {
        None
    };
    // Unconditioned side: X(−u) = B̃(2u) + drift·u on the same s-grid.
    let u_max = (-domain.x0).max(0.0);
    let neg_steps = (2.0 * u_max / delta).round() as usize;
    let mut bneg = Vec::with_capacity(neg_steps + 1);
    bneg.push(0.0);
    let sd = delta.sqrt();
    let mut acc = 0.0;
    for _ in 0..neg_steps {
        let g: f64 = rng.sample(StandardNormal);
        acc += sd * g;
        bneg.push(acc);
    }

    let mut radial_vals = Vec::with_capacity(nx);
    for i in 0..nx {
        let x = domain.x0 + (i as f64 + 0.5) * delta;
        let v = if x > 0.0 {
            let idx = (2.0 * x / delta).round() as usize;
            let c = cond.as_ref().expect("positive node without conditioned path");
            c.path.values[idx]
        } else {
            let u = -x;
            let idx = (2.0 * u / delta).round() as usize;
            bneg[idx] + drift * u
        };
        radial_vals.push(v);
    }
    let (x_first, _) = domain.node_pos(0, 0);
    let radial = SamplePath::new(x_first, delta, radial_vals)?;
    let lateral = sample_strip_gff(domain, StripBlock::Lateral, rng)?;
    Ok(WedgeField {
        lateral,
        radial,
        alpha,
        gamma,
        tau_diagnostic: cond.map(|c| c.tau).unwrap_or(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::spectral::radial_part;
    use crate::rng::{stream_rng, StreamKind};
    use crate::stats;

    fn strip() -> GridDomain {
        GridDomain::strip(-4.0 * std::f64::consts::PI / 16.0 * 16.0, 2.0,
            2.0 / 16.0).unwrap_or_else(|_| panic!("domain"))
    }

    #[test]
    fn rejects_bad_parameters() {
        let d = GridDomain::strip(-2.0, 2.0, 2.0 / 16.0).unwrap();
        let mut rng = stream_rng(1, StreamKind::Wedge, 0);
        assert!(sample_wedge(&d, 2.0, 2.0, &mut rng).is_err()); // alpha = Q
        assert!(sample_wedge(&d, 1.0, 1.5, &mut rng).is_err()); // gamma != 2
    }

    #[test]
    fn conditioned_side_stays_nonpositive() {
        let d = GridDomain::strip(-2.0, 2.0, 2.0 / 16.0).unwrap();
        for r in 0..20 {
            let mut rng = stream_rng(2, StreamKind::Wedge, r);
            let w = sample_wedge(&d, 1.0, 2.0, &mut rng).unwrap();
            let (nx, _) = d.nodes();
            for i in 0..nx {
                let x = d.x0 + (i as f64 + 0.5) * d.delta;
                if x > 0.0 {
                    assert!(w.radial.values[i] <= 0.0, "X({x}) = {}", w.radial.values[i]);
                }
            }
        }
    }

    #[test]
    fn unconditioned_side_variance_grows_like_2t() {
        let d = GridDomain::strip(-4.0, 1.0, 1.0 / 16.0).unwrap();
        let n = 3000;
        let mut at_1 = Vec::with_capacity(n);
        let mut at_3 = Vec::with_capacity(n);
        let (nx, _) = d.nodes();
        let node_at = |x: f64| -> usize {
            (0..nx)
                .min_by(|&a, &b| {
                    let pa = (d.x0 + (a as f64 + 0.5) * d.delta - x).abs();
                    let pb = (d.x0 + (b as f64 + 0.5) * d.delta - x).abs();
                    pa.total_cmp(&pb)
                })
                .unwrap()
        };
        let (i1, i3) = (node_at(-1.0), node_at(-3.0));
        for r in 0..n {
            let mut rng = stream_rng(3, StreamKind::Wedge, r as u64);
            let w = sample_wedge(&d, 1.0, 2.0, &mut rng).unwrap();
            let t1 = -(d.x0 + (i1 as f64 + 0.5) * d.delta);
            let t3 = -(d.x0 + (i3 as f64 + 0.5) * d.delta);
            at_1.push(w.radial.values[i1] - t1); // subtract the drift (Q−α)·u
            at_3.push(w.radial.values[i3] - t3);
        }
        let v1 = stats::variance(&at_1);
        let v3 = stats::variance(&at_3);
        let t1 = 1.0 - d.delta / 2.0; // nearest cell centre to −1
        let t3 = 3.0 + d.delta / 2.0;
        let se1 = 2.0 * t1 * (2.0 / n as f64).sqrt();
        let se3 = 2.0 * t3 * (2.0 / n as f64).sqrt();
        assert!((v1 - 2.0 * t1).abs() < 3.0 * se1, "v1={v1} want={}", 2.0 * t1);
        assert!((v3 - 2.0 * t3).abs() < 3.0 * se3, "v3={v3} want={}", 2.0 * t3);
    }

    #[test]
    fn lateral_lines_have_zero_mean_and_combined_reconstructs() {
        let d = GridDomain::strip(-2.0, 2.0, 2.0 / 16.0).unwrap();
        let mut rng = stream_rng(4, StreamKind::Wedge, 0);
        let w = sample_wedge(&d, 1.0, 2.0, &mut rng).unwrap();
        let lr = radial_part(&w.lateral).unwrap();
        assert!(lr.values.iter().all(|v| v.abs() < 1e-10));
        let combined = w.combined();
        let back = radial_part(&combined).unwrap();
        for (a, b) in back.values.iter().zip(&w.radial.values) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn strip_helper_builds() {
        let _ = strip();
    }
}
