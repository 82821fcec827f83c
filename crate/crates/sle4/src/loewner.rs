//! Centred Loewner chains built from exact vertical-slit compositions.
//!
//! Each driver step `(δt, δW)` contributes the elementary map
//! `z ↦ √((z − δW)² + 4 δt)`, the exact solution of the Loewner equation for
//! a constant driver over the step, expressed in centred coordinates (the
//! growth point sits at the origin both before and after the step). Because
//! every step is a closed-form conformal map, the discrete chain can be
//! inverted and differentiated exactly: `inverse_map ∘ centred_forward` is the
//! identity up to float roundoff, independent of `dt`.

use crate::error::{SimError, SimResult};
use crate::path::SamplePath;
use crate::rng::{stream_rng, StreamKind};
use crate::C64;
use rand_distr::{Distribution, StandardNormal};

/// Points closer than this to the per-step singularity count as swallowed.
pub const SWALLOW_FLOOR: f64 = 1e-12;

/// Result of flowing a point through the chain: either a mapped point or the
/// discrete flow hit the singularity before the requested time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapOutcome {
    Mapped(C64),
    Swallowed,
}

impl MapOutcome {
    pub fn point(self) -> Option<C64> {
        match self {
            MapOutcome::Mapped(z) => Some(z),
            MapOutcome::Swallowed => None,
        }
    }

    pub fn expect_point(self, ctx: &str) -> C64 {
        self.point().unwrap_or_else(|| panic!("unexpected swallow: {ctx}"))
    }
}

/// Square root with image in the closed upper half-plane. For real
/// non-negative inputs this is the non-negative root; callers that need the
/// left prime end on the real axis handle the sign themselves.
#[inline]
fn sqrt_h(w: C64) -> C64 {
    let s = w.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// One forward slit step in centred coordinates: `u ↦ √(u² + 4 δt)` applied
/// to `u = z − δw`. Real inputs keep the prime-end sign of `u`.
#[inline]
fn slit_forward(z: C64, dw: f64, dt4: f64) -> C64 {
    let u = z - dw;
    if u.im == 0.0 {
        let v = u.re * u.re + dt4;
        // v >= 0 always for real u; the sign of u selects the prime end.
        let r = v.sqrt();
        return C64::new(if u.re >= 0.0 { r } else { -r }, 0.0);
    }
    sqrt_h(u * u + dt4)
}

/// One inverse slit step: `w ↦ δw + √(w² − 4 δt)`. Boundary inputs with
/// `|w| < 2√δt` map onto the slit; real `w` beyond the base keeps its side.
#[inline]
fn slit_inverse(w: C64, dw: f64, dt4: f64) -> C64 {
    if w.im == 0.0 {
        let v = w.re * w.re - dt4;
        if v >= 0.0 {
            let r = v.sqrt();
            return C64::new(dw + if w.re >= 0.0 { r } else { -r }, 0.0);
        }
        return C64::new(dw, (-v).sqrt());
    }
    sqrt_h(w * w - dt4) + dw
}

/// Derivative of the forward step at `z`: `(z − δw)/√((z − δw)² + 4δt)`,
/// i.e. `u / slit_forward(z)`.
#[inline]
fn slit_forward_deriv(z: C64, dw: f64, dt4: f64) -> C64 {
    let u = z - dw;
    let fz = slit_forward(z, dw, dt4);
    u / fz
}

/// A discretised centred SLE_κ Loewner chain.
///
/// `steps[k]` holds the driver increment over `[k·dt, (k+1)·dt]`; partial sums
/// of the increments reproduce `driver.values` exactly.
#[derive(Debug, Clone)]
pub struct LoewnerChain {
    pub kappa: f64,
    pub driver: SamplePath,
    steps: Vec<f64>,
    dt4: f64,
}

impl LoewnerChain {
    /// Build a chain from a driving function sampled on a uniform grid with
    /// `driver.values[0] = 0`.
    pub fn from_driver(kappa: f64, driver: SamplePath) -> SimResult<Self> {
        if !(kappa > 0.0) {
            return Err(SimError::invalid(format!("kappa must be > 0, got {kappa}")));
        }
        if driver.values[0] != 0.0 {
            return Err(SimError::invalid("driver must start at 0"));
        }
        let steps: Vec<f64> = driver.values.windows(2).map(|w| w[1] - w[0]).collect();
        let dt4 = 4.0 * driver.dt;
        Ok(LoewnerChain { kappa, driver, steps, dt4 })
    }

    pub fn dt(&self) -> f64 {
        self.driver.dt
    }

    pub fn horizon(&self) -> f64 {
        self.driver.t_end()
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    /// Number of whole steps below `t` (capacity times round down to the grid).
    pub fn steps_before(&self, t: f64) -> SimResult<usize> {
        if t < 0.0 {
            return Err(SimError::invalid(format!("negative time {t}")));
        }
        let k = ((t / self.dt()) + 1e-9).floor() as usize;
        if k > self.steps.len() {
            return Err(SimError::invalid(format!(
                "time {t} beyond chain horizon {}",
                self.horizon()
            )));
        }
        Ok(k)
    }

    /// Grid time actually used for a requested capacity time `t`.
    pub fn grid_time(&self, t: f64) -> SimResult<f64> {
        Ok(self.steps_before(t)? as f64 * self.dt())
    }

    /// Driver value at the grid point below `t`.
    pub fn driver_at(&self, t: f64) -> SimResult<f64> {
        let k = self.steps_before(t)?;
        Ok(self.driver.values[k])
    }

    /// Restarted chain over `[s, horizon]`: the centred chain of the shifted,
    /// recentred driver `u ↦ W_{s+u} − W_s`. Shares step increments exactly.
    pub fn restarted(&self, s: f64) -> SimResult<LoewnerChain> {
        let k = self.steps_before(s)?;
        let steps = self.steps[k..].to_vec();
        let mut values = Vec::with_capacity(steps.len() + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for d in &steps {
            acc += d;
            values.push(acc);
        }
        let driver = SamplePath::new(0.0, self.dt(), values)?;
        LoewnerChain::from_driver(self.kappa, driver)
    }

    /// Flow an interior point through `n` forward steps, watching for
    /// swallowing. Interior points that land on the real axis entered the
    /// hull; so do points within [`SWALLOW_FLOOR`] of the step singularity.
    fn flow_forward(&self, z: C64, n: usize) -> MapOutcome {
        let mut w = z;
        for &dw in &self.steps[..n] {
            if (w - dw).norm() < SWALLOW_FLOOR {
                return MapOutcome::Swallowed;
            }
            w = slit_forward(w, dw, self.dt4);
            if w.im <= 0.0 {
                return MapOutcome::Swallowed;
            }
        }
        MapOutcome::Mapped(w)
    }

    /// Boundary-tolerant forward flow: no swallow detection, points may ride
    /// the real axis. Used for prime-end evaluation.
    fn flow_forward_boundary(&self, z: C64, n: usize) -> C64 {
        let mut w = z;
        for &dw in &self.steps[..n] {
            w = slit_forward(w, dw, self.dt4);
        }
        w
    }

    /// Flow a real boundary point through `n` forward steps, keeping the
    /// prime-end side at every slit.
    pub fn flow_boundary_real(&self, x: f64, n: usize) -> f64 {
        self.flow_forward_boundary(C64::new(x, 0.0), n).re
    }

    /// Real boundary flow with a clearance diagnostic: the minimum over steps
    /// of |u − δW| / (2√δt), the distance to the step singularity in units of
    /// the slit height. Probes genuinely outside the hull keep clearance
    /// bounded away from zero; probes absorbed into the discrete hull graze a
    /// slit base.
    pub fn flow_boundary_real_diag(&self, x: f64, n: usize) -> (f64, f64) {
        let slit_height = self.dt4.sqrt(); // 2·√δt
        let mut w = x;
        let mut clearance = f64::INFINITY;
        for &dw in &self.steps[..n] {
            let u = w - dw;
            clearance = clearance.min(u.abs() / slit_height);
            let v = u * u + self.dt4;
            let r = v.sqrt();
            w = if u >= 0.0 { r } else { -r };
        }
        (w, clearance)
    }

    /// `g_t(z)` for interior `z`, by slit composition (`g_t = f_t + W_t`).
    pub fn forward_map(&self, z: C64, t: f64) -> SimResult<MapOutcome> {
        Ok(match self.centred_forward(z, t)? {
            MapOutcome::Mapped(w) => MapOutcome::Mapped(w + self.driver_at(t)?),
            MapOutcome::Swallowed => MapOutcome::Swallowed,
        })
    }

    /// Centred map `f_t(z) = g_t(z) − W_t`.
    pub fn centred_forward(&self, z: C64, t: f64) -> SimResult<MapOutcome> {
        if z.im <= 0.0 {
            return Err(SimError::invalid(
                "forward maps take interior points; use boundary_images for prime ends",
            ));
        }
        let n = self.steps_before(t)?;
        Ok(self.flow_forward(z, n))
    }

    /// Inverse of the centred map, `ψ_t(w) = f_t^{-1}(w)`; exact inverse of
    /// the discrete composition. Boundary `w` is allowed (prime ends).
    pub fn inverse_map(&self, w: C64, t: f64) -> SimResult<C64> {
        if w.im < 0.0 {
            return Err(SimError::invalid("inverse_map needs Im(w) >= 0"));
        }
        let n = self.steps_before(t)?;
        let mut z = w;
        for &dw in self.steps[..n].iter().rev() {
            z = slit_inverse(z, dw, self.dt4);
        }
        Ok(z)
    }

    /// `|f_t'(z)|`: product of elementary derivative moduli along the
    /// composition. Swallowing propagates.
    pub fn map_derivative(&self, z: C64, t: f64) -> SimResult<Option<f64>> {
        if z.im <= 0.0 {
            return Err(SimError::invalid("map_derivative needs Im(z) > 0"));
        }
        let n = self.steps_before(t)?;
        let mut w = z;
        let mut logd = 0.0;
        for &dw in &self.steps[..n] {
            if (w - dw).norm() < SWALLOW_FLOOR {
                return Ok(None);
            }
            logd += slit_forward_deriv(w, dw, self.dt4).norm().ln();
            w = slit_forward(w, dw, self.dt4);
            if w.im <= 0.0 {
                return Ok(None);
            }
        }
        Ok(Some(logd.exp()))
    }

    /// `|ψ_t'(w)|` for `w` in the closed half-plane, by the product rule along
    /// the reverse composition.
    pub fn inverse_derivative(&self, w: C64, t: f64) -> SimResult<f64> {
        if w.im < 0.0 {
            return Err(SimError::invalid("inverse_derivative needs Im(w) >= 0"));
        }
        let n = self.steps_before(t)?;
        let mut z = w;
        let mut logd = 0.0;
        for &dw in self.steps[..n].iter().rev() {
            // d/dw (δw + √(w² − 4δt)) = w / √(w² − 4δt)
            let nxt = slit_inverse(z, dw, self.dt4);
            let denom = (nxt - dw).norm();
            let num = z.norm();
            if denom < SWALLOW_FLOOR {
                logd += (num / SWALLOW_FLOOR).ln();
            } else {
                logd += (num / denom).ln();
            }
            z = nxt;
        }
        Ok(logd.exp())
    }

    /// Fit the Laurent coefficient `c₁` in `g_t(z) ≈ z + c₁/z` from
    /// evaluations at |z| ∈ {50, 100, 200}; for the discrete chain this is
    /// the half-plane capacity `2t` up to fit truncation.
    pub fn hcap_coefficient(&self, t: f64) -> SimResult<f64> {
        let radii = [50.0, 100.0, 200.0];
        // zR(g(zR) − zR) = c1 + c2/zR + c3/zR²; solve the 3×3 complex
        // Vandermonde in 1/zR and keep the constant term.
        let mut rhs = [C64::new(0.0, 0.0); 3];
        let mut xs = [C64::new(0.0, 0.0); 3];
        for (i, &r) in radii.iter().enumerate() {
            let z = C64::new(0.0, r);
            let g = match self.forward_map(z, t)? {
                MapOutcome::Mapped(w) => w,
                MapOutcome::Swallowed => {
                    return Err(SimError::numerical(
                        "hcap_coefficient",
                        format!("evaluation point i{r} swallowed"),
                    ))
                }
            };
            rhs[i] = z * (g - z);
            xs[i] = C64::new(1.0, 0.0) / z;
        }
        // Lagrange interpolation at x = 0.
        let mut c1 = C64::new(0.0, 0.0);
        for i in 0..3 {
            let mut li = C64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    li *= (-xs[j]) / (xs[i] - xs[j]);
                }
            }
            c1 += rhs[i] * li;
        }
        Ok(c1.re)
    }
}

/// Sample the SLE_κ driving function `W_t = √κ B_t` on a uniform grid.
pub fn sample_driver(kappa: f64, horizon: f64, dt: f64, seed: u64) -> SimResult<SamplePath> {
    sample_driver_indexed(kappa, horizon, dt, seed, 0)
}

/// Stream-indexed driver sampling for replica farms.
pub fn sample_driver_indexed(
    kappa: f64,
    horizon: f64,
    dt: f64,
    seed: u64,
    replica: u64,
) -> SimResult<SamplePath> {
    if !(kappa > 0.0) {
        return Err(SimError::invalid(format!("kappa must be > 0, got {kappa}")));
    }
    if !(dt > 0.0) || !(horizon >= dt) {
        return Err(SimError::invalid(format!(
            "need horizon >= dt > 0, got horizon={horizon} dt={dt}"
        )));
    }
    let n = ((horizon / dt) + 1e-9).floor() as usize;
    let sd = (kappa * dt).sqrt();
    let mut rng = stream_rng(seed, StreamKind::Driver, replica);
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    let mut w = 0.0;
    for _ in 0..n {
        let g: f64 = StandardNormal.sample(&mut rng);
        w += sd * g;
        values.push(w);
    }
    SamplePath::new(0.0, dt, values)
}

/// A traced curve: points `η(t_k) ≈ ψ_{t_k}(i y₀)` with the regularisation
/// height recorded. `points[0]` is the exact start 0.
#[derive(Debug, Clone)]
pub struct CurveTrace {
    pub times: Vec<f64>,
    pub points: Vec<C64>,
    pub tip_offset: f64,
}

impl CurveTrace {
    /// Curve point at the grid time nearest to `s`.
    pub fn point_at(&self, s: f64) -> C64 {
        let dt = if self.times.len() > 1 { self.times[1] - self.times[0] } else { 1.0 };
        let k = ((s / dt) + 0.5).floor() as usize;
        self.points[k.min(self.points.len() - 1)]
    }

    /// CSV rows `(t, re, im)` with a header, full double precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im\r\n");
        for (t, p) in self.times.iter().zip(&self.points) {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\r\n", t, p.re, p.im));
        }
        out
    }
}

/// Default tip regularisation: tip displacement per step is O(√dt), so a
/// height of a few √dt smooths without losing resolution.
pub fn default_tip_offset(dt: f64) -> f64 {
    10.0 * dt.sqrt()
}

/// Trace the curve by evaluating `ψ_{t_k}(i y₀)` at every `stride`-th grid
/// time.
pub fn trace(chain: &LoewnerChain, y0: f64, stride: usize) -> SimResult<CurveTrace> {
    if !(y0 > 0.0) {
        return Err(SimError::invalid("tip offset y0 must be > 0"));
    }
    let stride = stride.max(1);
    let n = chain.n_steps();
    let dt = chain.dt();
    let seed_pt = C64::new(0.0, y0);
    let mut times = vec![0.0];
    let mut points = vec![C64::new(0.0, 0.0)];
    let mut k = stride;
    while k <= n {
        let t = k as f64 * dt;
        let p = chain.inverse_map(seed_pt, t)?;
        times.push(t);
        points.push(C64::new(p.re, p.im.max(0.0)));
        k += stride;
    }
    Ok(CurveTrace { times, points, tip_offset: y0 })
}

/// Prime-end boundary images `(x⁻, x⁺)` of `η(s)` under `f_t`, `0 ≤ s < t`.
///
/// The curve point `η(s)` maps to the driver origin under `f_s`, so its two
/// prime ends under `f_t` are the images of `0⁻`/`0⁺` under the restarted
/// chain `f_{s,t}`. Each side is evaluated by flowing real probes `±ε` down a
/// dyadic ladder; convergence is declared when two rungs agree to
/// `1e-3·(|x|+1)`. In the centred frame the left image is negative and the
/// right positive, so a sign flip marks absorption of the probe into the
/// discrete hull; the last clean rungs are then extrapolated geometrically.
pub fn boundary_images(chain: &LoewnerChain, s: f64, t: f64) -> SimResult<(f64, f64)> {
    if !(s >= 0.0 && s < t) {
        return Err(SimError::invalid(format!("need 0 <= s < t, got s={s} t={t}")));
    }
    let restarted = chain.restarted(s)?;
    let m = chain.steps_before(t)? - chain.steps_before(s)?;
    if m == 0 {
        return Err(SimError::invalid("s and t round to the same grid step"));
    }
    let mut sides = [f64::NAN; 2];
    for (idx, sign) in [(0usize, -1.0f64), (1usize, 1.0f64)] {
        // Walk the dyadic ladder from coarse to fine. Clean probes produce a
        // monotone sequence whose dyadic decrements shrink; a sign flip or a
        // growing decrement marks absorption into the discrete hull footprint
        // and stops the ladder at the last trustworthy rung.
        let mut vals: Vec<f64> = Vec::new();
        let mut last_dec = f64::INFINITY;
        let mut converged = None;
        for j in -2i32..=16 {
            let eps = sign * 2f64.powi(-j);
            let (img, clearance) = restarted.flow_boundary_real_diag(eps, m);
            if img * sign <= 0.0 || clearance < 0.12 {
                break;
            }
            if let Some(&prev) = vals.last() {
                let d = (img - prev).abs();
                if d < 1e-3 * (img.abs() + 1.0) {
                    converged = Some(img);
                    break;
                }
                if d > last_dec {
                    break;
                }
                last_dec = d;
            }
            vals.push(img);
        }
        sides[idx] = match (converged, vals.last()) {
            (Some(v), _) => v,
            (None, Some(&v)) => v,
            (None, None) => {
                return Err(SimError::numerical(
                    "boundary_images",
                    format!("no clean probe on side {sign} at s={s}, t={t}"),
                ))
            }
        };
    }
    let (lo, hi) = if sides[0] <= sides[1] { (sides[0], sides[1]) } else { (sides[1], sides[0]) };
    Ok((lo, hi))
}
