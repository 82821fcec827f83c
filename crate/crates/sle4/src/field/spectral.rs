//! Exact spectral sampling of discrete Gaussian free fields.
//!
//! The Gaussian with Dirichlet energy `(1/2π)·Σ_edges (f(u)−f(v))²` has
//! covariance `2π·L⁻¹` for the unnormalised grid Laplacian `L`; that scaling
//! makes the discrete Green's function converge to
//! `log|z−w̄| − log|z−w|` on half-plane rectangles with no mesh factor.
//! Dirichlet rectangles diagonalise in the DST-I basis, free-boundary
//! cell-centred grids in the DCT basis (zero mode excluded, which fixes the
//! zero-grid-mean convention).

use super::grid::{
    BoundaryCondition, DomainShape, FieldSample, GridDomain, MeanConvention,
};
use super::transform::{dct2, dct3, dst1, separable_2d};
use crate::error::{SimError, SimResult};
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

fn dirichlet_eigenvalue(p: usize, m: usize) -> f64 {
    2.0 - 2.0 * (PI * p as f64 / (m + 1) as f64).cos()
}

fn free_eigenvalue(p: usize, m: usize) -> f64 {
    2.0 - 2.0 * (PI * p as f64 / m as f64).cos()
}

fn check_dirichlet(domain: &GridDomain) -> SimResult<(usize, usize)> {
    if domain.shape != DomainShape::HalfplaneRect
        || domain.bc.iter().any(|&b| b != BoundaryCondition::Dirichlet)
    {
        return Err(SimError::invalid(
            "spectral Dirichlet sampler needs a half-plane rectangle with Dirichlet edges",
        ));
    }
    let (ncx, ncy) = domain.cells();
    if ncx < 2 || ncy < 2 {
        return Err(SimError::invalid("grid too coarse: needs at least 2 cells per side"));
    }
    Ok((ncx - 1, ncy - 1)) // interior vertex counts
}

/// Exact sample of the zero-boundary discrete GFF on a Dirichlet rectangle.
pub fn sample_dirichlet_gff<R: Rng + ?Sized>(
    domain: &GridDomain,
    rng: &mut R,
) -> SimResult<FieldSample> {
    let (m, n) = check_dirichlet(domain)?;
    let norm = 2.0 / (((m + 1) * (n + 1)) as f64).sqrt();
    let mut coeff = vec![0.0; m * n];
    for q in 1..=n {
        let ly = dirichlet_eigenvalue(q, n);
        for p in 1..=m {
            let lam = dirichlet_eigenvalue(p, m) + ly;
            let xi: f64 = rng.sample(StandardNormal);
            coeff[(q - 1) * m + (p - 1)] = xi * (TWO_PI / lam).sqrt() * norm;
        }
    }
    let interior = separable_2d(&coeff, m, n, dst1);
    Ok(embed_interior(domain, m, n, &interior, MeanConvention::ZeroBoundary))
}

fn embed_interior(
    domain: &GridDomain,
    m: usize,
    n: usize,
    interior: &[f64],
    mc: MeanConvention,
) -> FieldSample {
    let (nx, ny) = domain.nodes();
    let mut values = vec![0.0; nx * ny];
    for j in 0..n {
        for i in 0..m {
            values[(j + 1) * nx + (i + 1)] = interior[j * m + i];
        }
    }
    FieldSample::new(domain.clone(), values, mc)
}

/// Apply `2π·L⁻¹` to interior data on a Dirichlet rectangle (the Green
/// operator). `rhs` is indexed over the full vertex grid; boundary entries
/// are ignored and the result carries zeros there.
pub fn green_apply_dirichlet(domain: &GridDomain, rhs: &[f64]) -> SimResult<Vec<f64>> {
    let (m, n) = check_dirichlet(domain)?;
    let (nx, _) = domain.nodes();
    let mut interior = vec![0.0; m * n];
    for j in 0..n {
        for i in 0..m {
            interior[j * m + i] = rhs[(j + 1) * nx + (i + 1)];
        }
    }
    // analysis, scale by 2π/λ, synthesis; DST-I is self-transposed with
    // squared norm (m+1)(n+1)/4
    let mut coeff = separable_2d(&interior, m, n, dst1);
    let scale = 4.0 / (((m + 1) * (n + 1)) as f64);
    for q in 1..=n {
        let ly = dirichlet_eigenvalue(q, n);
        for p in 1..=m {
            let lam = dirichlet_eigenvalue(p, m) + ly;
            coeff[(q - 1) * m + (p - 1)] *= scale * TWO_PI / lam;
        }
    }
    let out = separable_2d(&coeff, m, n, dst1);
    let (nx, ny) = domain.nodes();
    let mut full = vec![0.0; nx * ny];
    for j in 0..n {
        for i in 0..m {
            full[(j + 1) * nx + (i + 1)] = out[j * m + i];
        }
    }
    Ok(full)
}

/// Discrete Dirichlet Green's function `2π·(L⁻¹)_{zw}` between the grid
/// vertices nearest to `z` and `w`; symmetric by construction.
pub fn green_discrete(domain: &GridDomain, z: (f64, f64), w: (f64, f64)) -> SimResult<f64> {
    let (m, n) = check_dirichlet(domain)?;
    let (zi, zj) = domain.nearest_node(z.0, z.1)?;
    let (wi, wj) = domain.nearest_node(w.0, w.1)?;
    if zi == wi && zj == wj {
        return Err(SimError::invalid(
            "green_discrete needs distinct vertices (the continuum diagonal diverges); \
             use green_discrete_diagonal for the regularised diagonal entry",
        ));
    }
    for (i, j) in [(zi, zj), (wi, wj)] {
        if i == 0 || j == 0 || i > m || j > n {
            return Err(SimError::invalid("green_discrete needs interior vertices"));
        }
    }
    Ok(green_mode_sum(m, n, (zi, zj), (wi, wj)))
}

/// Discrete diagonal `2π(L⁻¹)_{zz}` (finite at fixed mesh), exposed apart.
pub fn green_discrete_diagonal(domain: &GridDomain, z: (f64, f64)) -> SimResult<f64> {
    let (m, n) = check_dirichlet(domain)?;
    let (zi, zj) = domain.nearest_node(z.0, z.1)?;
    if zi == 0 || zj == 0 || zi > m || zj > n {
        return Err(SimError::invalid("needs an interior vertex"));
    }
    Ok(green_mode_sum(m, n, (zi, zj), (zi, zj)))
}

fn green_mode_sum(m: usize, n: usize, a: (usize, usize), b: (usize, usize)) -> f64 {
    // Σ_pq φ_pq(a) φ_pq(b) / (λ_pq ‖φ‖²), ‖φ‖² = (m+1)(n+1)/4
    let norm2 = ((m + 1) * (n + 1)) as f64 / 4.0;
    let mut acc = 0.0;
    for q in 1..=n {
        let ly = dirichlet_eigenvalue(q, n);
        let sy_a = (PI * q as f64 * a.1 as f64 / (n + 1) as f64).sin();
        let sy_b = (PI * q as f64 * b.1 as f64 / (n + 1) as f64).sin();
        if sy_a == 0.0 || sy_b == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for p in 1..=m {
            let lam = dirichlet_eigenvalue(p, m) + ly;
            let sx_a = (PI * p as f64 * a.0 as f64 / (m + 1) as f64).sin();
            let sx_b = (PI * p as f64 * b.0 as f64 / (m + 1) as f64).sin();
            row += sx_a * sx_b / lam;
        }
        acc += row * sy_a * sy_b;
    }
    TWO_PI * acc / norm2
}

/// Continuum half-plane Green's function `log|z−w̄| − log|z−w|`.
pub fn green_halfplane(z: crate::C64, w: crate::C64) -> f64 {
    ((z - w.conj()).norm() / (z - w).norm()).ln()
}

fn check_strip(domain: &GridDomain) -> SimResult<(usize, usize)> {
    if domain.shape != DomainShape::Strip {
        return Err(SimError::invalid("free-boundary sampler needs a strip domain"));
    }
    Ok(domain.nodes())
}

/// Which spectral blocks of the free-boundary strip field to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripBlock {
    /// All modes except the global constant: zero-grid-mean free field.
    Full,
    /// Only modes varying in y (zero mean on every vertical line).
    Lateral,
}

/// Sample a free-boundary GFF block on the truncated strip (Neumann sides,
/// cell-centred). `Full` yields the zero-grid-mean free field; `Lateral`
/// yields the lateral projection, exact on the grid.
pub fn sample_strip_gff<R: Rng + ?Sized>(
    domain: &GridDomain,
    block: StripBlock,
    rng: &mut R,
) -> SimResult<FieldSample> {
    let (nx, ny) = check_strip(domain)?;
    let mut coeff = vec![0.0; nx * ny];
    for q in 0..ny {
        let ly = free_eigenvalue(q, ny);
        let wq = if q == 0 { 1.0 } else { 0.5 };
        for p in 0..nx {
            if q == 0 && (block == StripBlock::Lateral || p == 0) {
                continue; // radial block, or the excluded constant mode
            }
            let lam = free_eigenvalue(p, nx) + ly;
            let wp = if p == 0 { 1.0 } else { 0.5 };
            let norm2 = (nx * ny) as f64 * wp * wq;
            let xi: f64 = rng.sample(StandardNormal);
            coeff[q * nx + p] = xi * (TWO_PI / lam).sqrt() / norm2.sqrt();
        }
    }
    let values = separable_2d(&coeff, nx, ny, dct3);
    let mc = match block {
        StripBlock::Full => MeanConvention::ZeroGridMean,
        StripBlock::Lateral => MeanConvention::RadialAnchored,
    };
    Ok(FieldSample::new(domain.clone(), values, mc))
}

/// Zero-mean Green's function (pseudo-inverse `2π·L⁺`) between distinct
/// strip nodes nearest to `z` and `w`.
pub fn green_strip(domain: &GridDomain, z: (f64, f64), w: (f64, f64)) -> SimResult<f64> {
    check_strip(domain)?;
    let a = domain.nearest_node(z.0, z.1)?;
    let b = domain.nearest_node(w.0, w.1)?;
    if a == b {
        return Err(SimError::invalid("green_strip needs distinct nodes"));
    }
    Ok(green_strip_nodes(domain, a, b))
}

/// Node-indexed pseudo-inverse entry `2π(L⁺)_{ab}`; the diagonal is allowed
/// (finite at fixed mesh).
pub fn green_strip_nodes(domain: &GridDomain, a: (usize, usize), b: (usize, usize)) -> f64 {
    let (nx, ny) = domain.nodes();
    let mut acc = 0.0;
    for q in 0..ny {
        let ly = free_eigenvalue(q, ny);
        let wq = if q == 0 { 1.0 } else { 0.5 };
        let cy_a = (PI * q as f64 * (a.1 as f64 + 0.5) / ny as f64).cos();
        let cy_b = (PI * q as f64 * (b.1 as f64 + 0.5) / ny as f64).cos();
        let wy = cy_a * cy_b / wq;
        if wy == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for p in 0..nx {
            if p == 0 && q == 0 {
                continue;
            }
            let lam = free_eigenvalue(p, nx) + ly;
            let wp = if p == 0 { 1.0 } else { 0.5 };
            let cx_a = (PI * p as f64 * (a.0 as f64 + 0.5) / nx as f64).cos();
            let cx_b = (PI * p as f64 * (b.0 as f64 + 0.5) / nx as f64).cos();
            row += cx_a * cx_b / (lam * wp);
        }
        acc += row * wy;
    }
    TWO_PI * acc / (nx * ny) as f64
}

/// Per-vertical-line means of a strip field, as a path over the x grid.
pub fn radial_part(field: &FieldSample) -> SimResult<crate::path::SamplePath> {
    let (nx, ny) = check_strip(&field.domain)?;
    let mut means = Vec::with_capacity(nx);
    for i in 0..nx {
        let mut acc = 0.0;
        for j in 0..ny {
            acc += field.value(i, j);
        }
        means.push(acc / ny as f64);
    }
    let (x_first, _) = field.domain.node_pos(0, 0);
    crate::path::SamplePath::new(x_first, field.domain.delta, means)
}

/// Residual after subtracting the vertical-line means; the decomposition is
/// exact: `radial + lateral = field` node by node.
pub fn lateral_part(field: &FieldSample) -> SimResult<FieldSample> {
    let (nx, ny) = check_strip(&field.domain)?;
    let radial = radial_part(field)?;
    let mut values = field.values.clone();
    for i in 0..nx {
        for j in 0..ny {
            values[j * nx + i] -= radial.values[i];
        }
    }
    Ok(FieldSample::new(field.domain.clone(), values, MeanConvention::RadialAnchored))
}

/// Conformal radius of the upper half-plane seen from `z`: `2·Im z`.
pub fn conformal_radius(z: crate::C64) -> SimResult<f64> {
    if !(z.im > 0.0) {
        return Err(SimError::invalid(format!("conformal radius needs Im(z) > 0, got {}", z.im)));
    }
    Ok(2.0 * z.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, StreamKind};
    use crate::C64;
    use approx::assert_relative_eq;

    /// Dense `2π·L⁻¹` by Gauss elimination, for tiny grids.
    fn dense_green(m: usize, n: usize) -> Vec<Vec<f64>> {
        let size = m * n;
        let idx = |i: usize, j: usize| j * m + i;
        let mut a = vec![vec![0.0; 2 * size]; size];
        for j in 0..n {
            for i in 0..m {
                let r = idx(i, j);
                a[r][r] = 4.0;
                if i > 0 {
                    a[r][idx(i - 1, j)] = -1.0;
                }
                if i + 1 < m {
                    a[r][idx(i + 1, j)] = -1.0;
                }
                if j > 0 {
                    a[r][idx(i, j - 1)] = -1.0;
                }
                if j + 1 < n {
                    a[r][idx(i, j + 1)] = -1.0;
                }
                a[r][size + r] = 1.0;
            }
        }
        for col in 0..size {
            let piv = (col..size).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
            a.swap(col, piv);
            let d = a[col][col];
            for v in a[col].iter_mut() {
                *v /= d;
            }
            for r in 0..size {
                if r != col && a[r][col] != 0.0 {
                    let f = a[r][col];
                    for c in 0..2 * size {
                        let sub = f * a[col][c];
                        a[r][c] -= sub;
                    }
                }
            }
        }
        (0..size)
            .map(|r| (0..size).map(|c| TWO_PI * a[r][size + c]).collect())
            .collect()
    }

    #[test]
    fn green_mode_sum_matches_dense_inverse() {
        let domain = GridDomain::halfplane_rect(0.0, 1.0, 0.75, 0.25).unwrap(); // 3×2 interior
        let g = dense_green(3, 2);
        let idx = |i: usize, j: usize| (j - 1) * 3 + (i - 1);
        for (a, b) in [((1, 1), (2, 1)), ((1, 1), (3, 2)), ((2, 2), (1, 1))] {
            let za = domain.node_pos(a.0, a.1);
            let zb = domain.node_pos(b.0, b.1);
            let got = green_discrete(&domain, za, zb).unwrap();
            let want = g[idx(a.0, a.1)][idx(b.0, b.1)];
            assert_relative_eq!(got, want, epsilon = 1e-10, max_relative = 1e-10);
        }
        let zd = domain.node_pos(2, 1);
        let got = green_discrete_diagonal(&domain, zd).unwrap();
        assert_relative_eq!(got, g[idx(2, 1)][idx(2, 1)], epsilon = 1e-10);
    }

    #[test]
    fn green_apply_matches_mode_sum() {
        let domain = GridDomain::halfplane_rect(0.0, 2.0, 1.0, 0.25).unwrap();
        let (nx, ny) = domain.nodes();
        let mut rhs = vec![0.0; nx * ny];
        let src = domain.nearest_node(0.75, 0.5).unwrap();
        rhs[src.1 * nx + src.0] = 1.0;
        let u = green_apply_dirichlet(&domain, &rhs).unwrap();
        let dst = domain.nearest_node(1.5, 0.75).unwrap();
        let want = green_discrete(
            &domain,
            domain.node_pos(src.0, src.1),
            domain.node_pos(dst.0, dst.1),
        )
        .unwrap();
        assert_relative_eq!(u[dst.1 * nx + dst.0], want, epsilon = 1e-9, max_relative = 1e-9);
    }

    #[test]
    fn green_is_symmetric_and_decays_at_boundary() {
        let domain = GridDomain::halfplane_rect(-1.0, 1.0, 1.0, 0.125).unwrap();
        let z = (-0.25, 0.5);
        let w = (0.25, 0.625);
        let a = green_discrete(&domain, z, w).unwrap();
        let b = green_discrete(&domain, w, z).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-12);
        // maximum principle: moving w next to the boundary decreases G
        let near = green_discrete(&domain, z, (0.25, 0.125)).unwrap();
        assert!(near < a, "near={near} center={a}");
        assert!(green_discrete(&domain, z, z).is_err());
    }

    #[test]
    fn green_matches_continuum_on_large_rectangle() {
        // resolved separation, far from the lateral/top truncation
        let domain = GridDomain::halfplane_rect(-4.0, 4.0, 4.0, 1.0 / 64.0).unwrap();
        let z = C64::new(0.0, 1.0);
        let w = C64::new(0.5, 1.0);
        let got = green_discrete(&domain, (z.re, z.im), (w.re, w.im)).unwrap();
        let want = green_halfplane(z, w);
        assert_relative_eq!(want, 1.4166056392062551, epsilon = 1e-12);
        assert!((got - want).abs() / want < 0.05, "got={got} want={want}");
    }

    #[test]
    fn sampler_covariance_matches_green_small_grid() {
        let domain = GridDomain::halfplane_rect(0.0, 1.25, 1.0, 0.25).unwrap(); // 4×3 interior
        let za = domain.node_pos(1, 1);
        let zb = domain.node_pos(3, 2);
        let g_ab = green_discrete(&domain, za, zb).unwrap();
        let g_aa = green_discrete_diagonal(&domain, za).unwrap();
        let n = 40_000;
        let mut rng = stream_rng(99, StreamKind::Field, 0);
        let (mut s_ab, mut s_aa, mut s_a) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let f = sample_dirichlet_gff(&domain, &mut rng).unwrap();
            let va = f.value(1, 1);
            let vb = f.value(3, 2);
            s_ab += va * vb;
            s_aa += va * va;
            s_a += va;
        }
        let nf = n as f64;
        let mean = s_a / nf;
        let cov_ab = s_ab / nf;
        let var_a = s_aa / nf;
        // stderr of the covariance estimates ~ g_aa/√n at this scale
        let se = g_aa * (2.0 / nf).sqrt() * 2.0;
        assert!((cov_ab - g_ab).abs() < 3.0 * se, "cov={cov_ab} want={g_ab}");
        assert!((var_a - g_aa).abs() < 3.0 * se, "var={var_a} want={g_aa}");
        assert!(mean.abs() < 3.0 * (g_aa / nf).sqrt(), "mean={mean}");
    }

    #[test]
    fn strip_radial_increments_are_exactly_brownian() {
        // With the cell-centred grid (ny·δ = π), the variance of a radial
        // increment is 2π·(Δ/δ)/ny = 2Δ exactly; check the pseudo-inverse
        // quadratic form of the line-mean difference functional.
        let delta = std::f64::consts::PI / 16.0;
        let domain = GridDomain::strip(0.0, 2.0 * std::f64::consts::PI, delta).unwrap();
        let (_, ny) = domain.nodes();
        let (ia, ib) = (3usize, 11usize);
        let mut var = 0.0;
        for ja in 0..ny {
            for jb in 0..ny {
                let g_aa = green_strip_nodes(&domain, (ia, ja), (ia, jb));
                let g_bb = green_strip_nodes(&domain, (ib, ja), (ib, jb));
                let g_ab = green_strip_nodes(&domain, (ia, ja), (ib, jb));
                var += (g_aa + g_bb - 2.0 * g_ab) / (ny * ny) as f64;
            }
        }
        let dt = (ib - ia) as f64 * delta;
        assert_relative_eq!(var, 2.0 * dt, epsilon = 1e-9, max_relative = 1e-9);
    }

    #[test]
    fn strip_field_has_zero_grid_mean_and_exact_decomposition() {
        let delta = std::f64::consts::PI / 8.0;
        let domain = GridDomain::strip(0.0, std::f64::consts::PI, delta).unwrap();
        let mut rng = stream_rng(4, StreamKind::Field, 0);
        let f = sample_strip_gff(&domain, StripBlock::Full, &mut rng).unwrap();
        let mean: f64 = f.values.iter().sum::<f64>() / f.values.len() as f64;
        assert!(mean.abs() < 1e-12, "grid mean {mean}");

        let r = radial_part(&f).unwrap();
        let l = lateral_part(&f).unwrap();
        let (nx, ny) = domain.nodes();
        for i in 0..nx {
            for j in 0..ny {
                let recon = r.values[i] + l.value(i, j);
                assert!((recon - f.value(i, j)).abs() < 1e-12);
            }
        }
        // lateral line means vanish
        let lr = radial_part(&l).unwrap();
        assert!(lr.values.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn lateral_block_sampler_has_zero_line_means() {
        let delta = std::f64::consts::PI / 8.0;
        let domain = GridDomain::strip(-1.0 * std::f64::consts::PI, std::f64::consts::PI, delta)
            .unwrap();
        let mut rng = stream_rng(5, StreamKind::Lateral, 1);
        let f = sample_strip_gff(&domain, StripBlock::Lateral, &mut rng).unwrap();
        let r = radial_part(&f).unwrap();
        assert!(r.values.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn lateral_of_vertically_constant_field_is_zero() {
        let delta = std::f64::consts::PI / 8.0;
        let domain = GridDomain::strip(0.0, std::f64::consts::PI, delta).unwrap();
        let (nx, ny) = domain.nodes();
        let mut values = vec![0.0; nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                values[j * nx + i] = (i as f64).sin() + 2.0;
            }
        }
        let f = FieldSample::new(domain, values, MeanConvention::Derived);
        let l = lateral_part(&f).unwrap();
        assert!(l.values.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn conformal_radius_cases() {
        assert_relative_eq!(conformal_radius(C64::new(0.0, 1.0)).unwrap(), 2.0);
        assert_relative_eq!(conformal_radius(C64::new(3.0, 0.5)).unwrap(), 1.0);
        let a = 3.7;
        let z = C64::new(0.4, 1.1);
        assert_relative_eq!(
            conformal_radius(z * a).unwrap(),
            a * conformal_radius(z).unwrap()
        );
        assert!(conformal_radius(C64::new(1.0, 0.0)).is_err());
    }
}
