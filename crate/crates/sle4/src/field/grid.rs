//! Rectangular grid domains and sampled fields.

use crate::error::{SimError, SimResult};
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainShape {
    /// Rectangle sitting on the real axis; vertex-centred grid including the
    /// boundary rows/columns.
    HalfplaneRect,
    /// Truncated horizontal strip of height π; cell-centred grid (the natural
    /// free-boundary discretisation).
    Strip,
}

/// Additive normalisation carried by a field sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeanConvention {
    /// Dirichlet data: no free constant.
    ZeroBoundary,
    /// Free-boundary data normalised to zero mean over the grid.
    ZeroGridMean,
    /// Free-boundary lateral block (zero mean on every vertical line); the
    /// absolute level is carried by a radial process.
    RadialAnchored,
    /// Derived field (coordinate change); no normalisation of its own.
    Derived,
}

/// Edges of a rectangle, in the order used by `bc`.
pub const EDGE_LEFT: usize = 0;
pub const EDGE_RIGHT: usize = 1;
pub const EDGE_BOTTOM: usize = 2;
pub const EDGE_TOP: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub delta: f64,
    /// left, right, bottom, top
    pub bc: [BoundaryCondition; 4],
    pub shape: DomainShape,
}

impl GridDomain {
    /// Half-plane rectangle with Dirichlet data on every edge, `y0 = 0`.
    pub fn halfplane_rect(x0: f64, x1: f64, y1: f64, delta: f64) -> SimResult<Self> {
        let d = GridDomain {
            x0,
            x1,
            y0: 0.0,
            y1,
            delta,
            bc: [BoundaryCondition::Dirichlet; 4],
            shape: DomainShape::HalfplaneRect,
        };
        d.validate()?;
        Ok(d)
    }

    /// Half-plane rectangle whose bottom edge carries free (data) values;
    /// used for unzipped fields evaluated down to the real axis.
    pub fn halfplane_rect_free_bottom(x0: f64, x1: f64, y1: f64, delta: f64) -> SimResult<Self> {
        let mut d = Self::halfplane_rect(x0, x1, y1, delta)?;
        d.bc[EDGE_BOTTOM] = BoundaryCondition::Free;
        Ok(d)
    }

    /// Truncated strip `[x0, x1] × [0, π]` with free boundary everywhere.
    pub fn strip(x0: f64, x1: f64, delta: f64) -> SimResult<Self> {
        let d = GridDomain {
            x0,
            x1,
            y0: 0.0,
            y1: std::f64::consts::PI,
            delta,
            bc: [BoundaryCondition::Free; 4],
            shape: DomainShape::Strip,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> SimResult<()> {
        if !(self.delta > 0.0) {
            return Err(SimError::invalid("delta must be > 0"));
        }
        for (len, name) in [(self.x1 - self.x0, "x"), (self.y1 - self.y0, "y")] {
            let cells = len / self.delta;
            if cells < 0.5 || (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
                return Err(SimError::invalid(format!(
                    "{name} extent {len} is not a positive multiple of delta {}",
                    self.delta
                )));
            }
        }
        if self.shape == DomainShape::Strip {
            let h = self.y1 - self.y0;
            if (h - std::f64::consts::PI).abs() > 1e-9 {
                return Err(SimError::invalid("strip height must be π"));
            }
        }
        Ok(())
    }

    /// Number of cells along x / y.
    pub fn cells(&self) -> (usize, usize) {
        let nx = ((self.x1 - self.x0) / self.delta).round() as usize;
        let ny = ((self.y1 - self.y0) / self.delta).round() as usize;
        (nx, ny)
    }

    /// Node counts along x / y (layout dependent).
    pub fn nodes(&self) -> (usize, usize) {
        let (nx, ny) = self.cells();
        match self.shape {
            DomainShape::HalfplaneRect => (nx + 1, ny + 1),
            DomainShape::Strip => (nx, ny),
        }
    }

    pub fn node_count(&self) -> usize {
        let (nx, ny) = self.nodes();
        nx * ny
    }

    /// Physical position of node `(ix, iy)`.
    pub fn node_pos(&self, ix: usize, iy: usize) -> (f64, f64) {
        match self.shape {
            DomainShape::HalfplaneRect => {
                (self.x0 + ix as f64 * self.delta, self.y0 + iy as f64 * self.delta)
            }
            DomainShape::Strip => (
                self.x0 + (ix as f64 + 0.5) * self.delta,
                self.y0 + (iy as f64 + 0.5) * self.delta,
            ),
        }
    }

    /// Nearest node indices for a physical point, if within the rectangle.
    pub fn nearest_node(&self, x: f64, y: f64) -> SimResult<(usize, usize)> {
        if x < self.x0 - 1e-12 || x > self.x1 + 1e-12 || y < self.y0 - 1e-12 || y > self.y1 + 1e-12
        {
            return Err(SimError::invalid(format!("point ({x}, {y}) outside domain")));
        }
        let (nx, ny) = self.nodes();
        let (fx, fy) = match self.shape {
            DomainShape::HalfplaneRect => ((x - self.x0) / self.delta, (y - self.y0) / self.delta),
            DomainShape::Strip => {
                ((x - self.x0) / self.delta - 0.5, (y - self.y0) / self.delta - 0.5)
            }
        };
        let ix = (fx.round().max(0.0) as usize).min(nx - 1);
        let iy = (fy.round().max(0.0) as usize).min(ny - 1);
        Ok((ix, iy))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 - 1e-12 && x <= self.x1 + 1e-12 && y >= self.y0 - 1e-12 && y <= self.y1 + 1e-12
    }
}

/// A real field on a grid domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSample {
    pub domain: GridDomain,
    /// Row-major by y: `values[iy * nx + ix]`.
    pub values: Vec<f64>,
    pub mean_convention: MeanConvention,
    /// Nodes whose value could not be computed (coordinate changes); `None`
    /// when every node is valid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invalid: Option<Vec<bool>>,
}

impl FieldSample {
    pub fn new(domain: GridDomain, values: Vec<f64>, mean_convention: MeanConvention) -> Self {
        assert_eq!(values.len(), domain.node_count());
        FieldSample { domain, values, mean_convention, invalid: None }
    }

    pub fn constant(domain: GridDomain, c: f64) -> Self {
        let n = domain.node_count();
        FieldSample::new(domain, vec![c; n], MeanConvention::Derived)
    }

    #[inline]
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        let (nx, _) = self.domain.nodes();
        self.values[iy * nx + ix]
    }

    pub fn invalid_fraction(&self) -> f64 {
        match &self.invalid {
            None => 0.0,
            Some(m) => m.iter().filter(|&&b| b).count() as f64 / m.len() as f64,
        }
    }

    /// Bilinear interpolation. Coordinates are clamped to the node hull:
    /// for cell-centred grids this realises the even (Neumann) extension to
    /// the physical boundary, for vertex grids it just guards roundoff.
    pub fn interp(&self, x: f64, y: f64) -> f64 {
        let d = &self.domain;
        let (nx, ny) = d.nodes();
        let (fx, fy) = match d.shape {
            DomainShape::HalfplaneRect => ((x - d.x0) / d.delta, (y - d.y0) / d.delta),
            DomainShape::Strip => ((x - d.x0) / d.delta - 0.5, (y - d.y0) / d.delta - 0.5),
        };
        let fx = fx.clamp(0.0, (nx - 1) as f64);
        let fy = fy.clamp(0.0, (ny - 1) as f64);
        let ix = (fx.floor() as usize).min(nx.saturating_sub(2));
        let iy = (fy.floor() as usize).min(ny.saturating_sub(2));
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        if nx == 1 && ny == 1 {
            return self.values[0];
        }
        let v00 = self.value(ix, iy);
        let v10 = self.value((ix + 1).min(nx - 1), iy);
        let v01 = self.value(ix, (iy + 1).min(ny - 1));
        let v11 = self.value((ix + 1).min(nx - 1), (iy + 1).min(ny - 1));
        v00 * (1.0 - tx) * (1.0 - ty) + v10 * tx * (1.0 - ty) + v01 * (1.0 - tx) * ty
            + v11 * tx * ty
    }

    pub fn interp_c(&self, z: C64) -> f64 {
        self.interp(z.re, z.im)
    }

    /// CSV dump `(x, y, value)` with header, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let (nx, ny) = self.domain.nodes();
        let mut out = String::from("x,y,value\r\n");
        for iy in 0..ny {
            for ix in 0..nx {
                let (x, y) = self.domain.node_pos(ix, iy);
                out.push_str(&format!("{:.16e},{:.16e},{:.16e}\r\n", x, y, self.value(ix, iy)));
            }
        }
        out
    }

    /// JSON sidecar with the domain metadata.
    pub fn metadata_json(&self) -> String {
        serde_json::json!({
            "domain": self.domain,
            "mean_convention": self.mean_convention,
            "invalid_fraction": self.invalid_fraction(),
        })
        .to_string()
    }

    /// Rebuild from a CSV dump and the original domain; values must appear in
    /// the writer's row-major order.
    pub fn from_csv(
        domain: GridDomain,
        csv: &str,
        mean_convention: MeanConvention,
    ) -> SimResult<Self> {
        let mut values = Vec::with_capacity(domain.node_count());
        for (i, line) in csv.lines().enumerate() {
            if i == 0 {
                continue;
            }
            let v = line
                .split(',')
                .nth(2)
                .ok_or_else(|| SimError::invalid(format!("csv row {i} malformed")))?;
            values.push(
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| SimError::invalid(format!("csv row {i}: {e}")))?,
            );
        }
        if values.len() != domain.node_count() {
            return Err(SimError::invalid(format!(
                "csv has {} values, domain needs {}",
                values.len(),
                domain.node_count()
            )));
        }
        Ok(FieldSample::new(domain, values, mean_convention))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn domain_validation() {
        assert!(GridDomain::halfplane_rect(-1.0, 1.0, 1.0, 1.0 / 16.0).is_ok());
        assert!(GridDomain::halfplane_rect(-1.0, 1.0, 1.0, 0.0).is_err());
        assert!(GridDomain::halfplane_rect(-1.0, 1.0, 0.7, 0.15).is_err());
        assert!(GridDomain::strip(-2.0, 2.0, std::f64::consts::PI / 32.0).is_ok());
    }

    #[test]
    fn node_layouts() {
        let r = GridDomain::halfplane_rect(0.0, 1.0, 1.0, 0.25).unwrap();
        assert_eq!(r.nodes(), (5, 5));
        assert_eq!(r.node_pos(0, 0), (0.0, 0.0));
        let s = GridDomain::strip(0.0, std::f64::consts::PI, std::f64::consts::PI / 4.0).unwrap();
        assert_eq!(s.nodes(), (4, 4));
        let (x, y) = s.node_pos(0, 0);
        assert_relative_eq!(x, std::f64::consts::PI / 8.0);
        assert_relative_eq!(y, std::f64::consts::PI / 8.0);
    }

    #[test]
    fn interp_is_exact_on_bilinear_functions() {
        let d = GridDomain::halfplane_rect(-1.0, 1.0, 2.0, 0.125).unwrap();
        let (nx, ny) = d.nodes();
        let f = |x: f64, y: f64| 0.3 + 1.7 * x - 0.4 * y + 0.9 * x * y;
        let mut vals = vec![0.0; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                let (x, y) = d.node_pos(ix, iy);
                vals[iy * nx + ix] = f(x, y);
            }
        }
        let fs = FieldSample::new(d, vals, MeanConvention::Derived);
        for &(x, y) in &[(-0.93, 0.11), (0.5, 1.99), (0.0, 0.0), (0.77, 1.23)] {
            assert_relative_eq!(fs.interp(x, y), f(x, y), epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let d = GridDomain::halfplane_rect(0.0, 0.5, 0.5, 0.25).unwrap();
        let vals: Vec<f64> = (0..9).map(|i| (i as f64 * 0.37).sin() * 1e-3 + 1.0 / 3.0).collect();
        let fs = FieldSample::new(d.clone(), vals.clone(), MeanConvention::ZeroBoundary);
        let csv = fs.to_csv();
        let back = FieldSample::from_csv(d, &csv, MeanConvention::ZeroBoundary).unwrap();
        assert_eq!(fs.values, back.values);
    }
}
