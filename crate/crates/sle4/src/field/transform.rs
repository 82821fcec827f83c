//! Fast trigonometric transforms used by the spectral field samplers.
//!
//! DST-I diagonalises the Dirichlet path Laplacian on interior vertices;
//! DCT-II/III diagonalise the free-end path Laplacian on cell centres. All
//! are reduced to complex FFTs.

use crate::C64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(len: usize) -> Arc<dyn rustfft::Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

fn plan_inverse(len: usize) -> Arc<dyn rustfft::Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// DST-I: `out[k-1] = Σ_{j=1..n} x[j-1] sin(π j k / (n+1))`, k = 1..n.
///
/// Self-transpose; applying it twice multiplies by `(n+1)/2`.
pub fn dst1(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let nn = 2 * (n + 1);
    let mut buf = vec![C64::new(0.0, 0.0); nn];
    for j in 1..=n {
        buf[j].re = x[j - 1];
        buf[nn - j].re = -x[j - 1];
    }
    plan_forward(nn).process(&mut buf);
    (1..=n).map(|k| -buf[k].im / 2.0).collect()
}

/// DCT-II: `out[q] = Σ_{j=0..n-1} x[j] cos(π q (j+1/2) / n)`, q = 0..n-1.
pub fn dct2(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let nn = 2 * n;
    let mut buf = vec![C64::new(0.0, 0.0); nn];
    for j in 0..n {
        buf[j].re = x[j];
        buf[nn - 1 - j].re = x[j];
    }
    plan_forward(nn).process(&mut buf);
    (0..n)
        .map(|q| {
            let phase = C64::from_polar(1.0, -std::f64::consts::PI * q as f64 / (2.0 * n as f64));
            0.5 * (phase * buf[q]).re
        })
        .collect()
}

/// DCT-III synthesis: `out[j] = Σ_{q=0..n-1} a[q] cos(π q (j+1/2) / n)`.
///
/// Transpose of [`dct2`]; `dct2(dct3(a))[q] = a[q]·n·ε_q` with ε_0 = 1,
/// ε_q = 1/2 otherwise.
pub fn dct3(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let nn = 2 * n;
    let mut buf = vec![C64::new(0.0, 0.0); nn];
    for q in 0..n {
        let phase = C64::from_polar(1.0, std::f64::consts::PI * q as f64 / (2.0 * n as f64));
        buf[q] = phase * a[q];
    }
    plan_inverse(nn).process(&mut buf);
    (0..n).map(|j| buf[j].re).collect()
}

/// Apply a 1D transform along both axes of a row-major `ny × nx` grid.
pub fn separable_2d(values: &[f64], nx: usize, ny: usize, tf: fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    assert_eq!(values.len(), nx * ny);
    let mut out = vec![0.0; nx * ny];
    // rows (x direction)
    for j in 0..ny {
        let row = tf(&values[j * nx..(j + 1) * nx]);
        out[j * nx..(j + 1) * nx].copy_from_slice(&row);
    }
    // columns (y direction)
    let mut col = vec![0.0; ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = out[j * nx + i];
        }
        let tc = tf(&col);
        for j in 0..ny {
            out[j * nx + i] = tc[j];
        }
    }
    out
}
