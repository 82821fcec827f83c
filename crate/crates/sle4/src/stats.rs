//! Estimates, confidence intervals and distributional tests.

use serde::{Deserialize, Serialize};

/// Point estimate with uncertainty for a Monte Carlo quantity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MCEstimate {
    pub estimate: f64,
    /// Standard error; `None` when n < 2 (check must be marked inconclusive).
    pub stderr: Option<f64>,
    pub n: usize,
    /// Fraction of per-replica values clipped at zero, when clipping applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clipped_fraction: Option<f64>,
    /// Regularisation-ladder spread, when a ladder was involved.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rung_spread: Option<f64>,
}

impl MCEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let estimate = mean(samples);
        let stderr = if n >= 2 { Some(stderr_of_mean(samples)) } else { None };
        MCEstimate { estimate, stderr, n, clipped_fraction: None, rung_spread: None }
    }

    /// Two-sided normal confidence interval at z = 2.576 (99%).
    pub fn ci99(&self) -> Option<(f64, f64)> {
        self.stderr.map(|s| (self.estimate - 2.576 * s, self.estimate + 2.576 * s))
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

pub fn stderr_of_mean(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Batch-means standard error: split into `batches` contiguous blocks, take
/// the stderr of the block means. Falls back to the plain stderr when the
/// sample is too short to form two batches.
pub fn batch_means_stderr(xs: &[f64], batches: usize) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let b = batches.clamp(2, n);
    let size = n / b;
    if size == 0 {
        return Some(stderr_of_mean(xs));
    }
    let means: Vec<f64> = (0..b).map(|i| mean(&xs[i * size..(i + 1) * size])).collect();
    Some(stderr_of_mean(&means))
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample_statistic(xs: &[f64], ys: &[f64]) -> f64 {
    let mut a: Vec<f64> = xs.to_vec();
    let mut b: Vec<f64> = ys.to_vec();
    a.sort_by(|u, v| u.total_cmp(v));
    b.sort_by(|u, v| u.total_cmp(v));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2 k² λ²)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of the two-sample KS test.
pub fn ks_two_sample_pvalue(xs: &[f64], ys: &[f64]) -> f64 {
    let d = ks_two_sample_statistic(xs, ys);
    let (m, n) = (xs.len() as f64, ys.len() as f64);
    let ne = m * n / (m + n);
    kolmogorov_sf(ne.sqrt() * d)
}

/// Least-squares line fit `y = a + b x`; returns `(slope, slope_stderr)`.
///
/// The slope stderr uses the residual variance with n−2 degrees of freedom.
pub fn fit_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    assert!(x.len() >= 2, "need at least two points to fit a slope");
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    if x.len() == 2 {
        return (slope, 0.0);
    }
    let a = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(u, v)| {
        let r = v - (a + slope * u);
        r * r
    }).sum();
    let s2 = ss_res / (n - 2.0);
    (slope, (s2 / sxx).sqrt())
}

/// Weighted least-squares slope with per-point variances; returns
/// `(slope, slope_stderr)` from the error propagation of the weights.
pub fn fit_slope_weighted(x: &[f64], y: &[f64], var: &[f64]) -> (f64, f64) {
    assert!(x.len() == y.len() && y.len() == var.len());
    let w: Vec<f64> = var.iter().map(|v| 1.0 / v.max(1e-300)).collect();
    let sw: f64 = w.iter().sum();
    let mx: f64 = x.iter().zip(&w).map(|(u, wi)| u * wi).sum::<f64>() / sw;
    let my: f64 = y.iter().zip(&w).map(|(v, wi)| v * wi).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(u, wi)| wi * (u - mx) * (u - mx)).sum();
    let sxy: f64 = x
        .iter()
        .zip(y)
        .zip(&w)
        .map(|((u, v), wi)| wi * (u - mx) * (v - my))
        .sum();
    (sxy / sxx, (1.0 / sxx).sqrt())
}

/// Half-width of a simultaneous binomial confidence band over `k` abscissae
/// at overall level `alpha` (Bonferroni + normal approximation).
pub fn simultaneous_binomial_halfwidth(p: f64, n: usize, k: usize, alpha: f64) -> f64 {
    let a = alpha / k as f64;
    let z = normal_quantile(1.0 - a / 2.0);
    // Wald width floored by the exact worst case 1/(2n) to stay honest at p≈0.
    let w = z * (p * (1.0 - p) / n as f64).sqrt();
    w.max(0.5 / n as f64)
}

/// Inverse standard-normal CDF (Acklam's rational approximation, |err| < 1.2e-8).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let plow = 0.02425;
    if p < plow {
        let q = (-2.0 * p.ln()).sqrt();
        return (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    }
    if p > 1.0 - plow {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        return -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    }
    let q = p - 0.5;
    let r = q * q;
    (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
        / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mean_and_stderr_hand_computed() {
        let xs = [1.0, 3.0];
        assert_relative_eq!(mean(&xs), 2.0);
        // var = 2, stderr = sqrt(2/2) = 1
        assert_relative_eq!(stderr_of_mean(&xs), 1.0);
    }

    #[test]
    fn constant_inputs_have_zero_stderr() {
        let xs = [5.0; 100];
        assert_eq!(stderr_of_mean(&xs), 0.0);
        let est = MCEstimate::from_samples(&xs);
        assert_eq!(est.stderr, Some(0.0));
    }

    #[test]
    fn single_sample_is_inconclusive() {
        let est = MCEstimate::from_samples(&[1.0]);
        assert!(est.stderr.is_none());
        assert!(est.ci99().is_none());
    }

    #[test]
    fn two_batches_ci_hand_computed() {
        // two batches of 2: means 1.0 and 3.0 -> stderr over means = 1.0
        let xs = [0.5, 1.5, 2.5, 3.5];
        let se = batch_means_stderr(&xs, 2).unwrap();
        assert_relative_eq!(se, 1.0);
    }

    #[test]
    fn ks_statistic_matches_known_cases() {
        // identical samples
        assert_relative_eq!(
            ks_two_sample_statistic(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]),
            0.0
        );
        assert_relative_eq!(
            ks_two_sample_statistic(&[1.0, 1.0, 4.0, 4.0], &[1.0, 1.0, 1.0, 4.0]),
            0.25
        );
    }

    #[test]
    fn kolmogorov_sf_reference_value() {
        // Q(1.0) = 2(e^{-2} - e^{-8} + e^{-18} - ...) ≈ 0.2699996716...
        assert_relative_eq!(kolmogorov_sf(1.0), 0.26999967, epsilon = 1e-7);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn slope_fit_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        let (b, se) = fit_slope(&x, &y);
        assert_relative_eq!(b, 2.0, epsilon = 1e-12);
        assert_relative_eq!(se, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn normal_quantile_reference_values() {
        assert_relative_eq!(normal_quantile(0.975), 1.959964, epsilon = 1e-5);
        assert_relative_eq!(normal_quantile(0.5), 0.0, epsilon = 1e-8);
        assert_relative_eq!(normal_quantile(0.995), 2.575829, epsilon = 1e-5);
    }

    #[test]
    fn split_halves_agree_for_well_behaved_inputs() {
        // deterministic smooth sequence: halves share the same mean scale
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37 % 101) as f64) / 101.0).collect();
        let (a, b) = xs.split_at(500);
        let ea = MCEstimate::from_samples(a);
        let eb = MCEstimate::from_samples(b);
        let tol = 2.576 * (ea.stderr.unwrap().powi(2) + eb.stderr.unwrap().powi(2)).sqrt();
        assert!((ea.estimate - eb.estimate).abs() <= tol);
    }
}
