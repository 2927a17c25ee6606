//! One-dimensional quadrature rules used throughout the crate.
//!
//! `tanh_sinh` handles integrable algebraic endpoint singularities; the
//! integrand receives the distances to both endpoints so that factors such
//! as `(b - x)^γ` can be formed without cancellation near the ends.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const T_MAX: f64 = 4.5;
const MAX_LEVEL: u32 = 13;

/// Double-exponential quadrature of `f(x, x - a, b - x)` over `[a, b]`.
///
/// Converges when two successive step halvings agree to within
/// `tol * max(1, |I|)`.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::arg("interval", "endpoints must be finite"));
    }
    if b <= a {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let half = 0.5 * (b - a);
    let mut evaluations = 0usize;

    let node = |t: f64, evals: &mut usize| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cu * cu);
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        let da = half * 2.0 / (1.0 + (-2.0 * u).exp());
        let db = half * 2.0 / (1.0 + (2.0 * u).exp());
        if da <= 0.0 || db <= 0.0 {
            return 0.0;
        }
        let x = if u < 0.0 { a + da } else { b - db };
        *evals += 1;
        w * f(x, da, db)
    };

    // Level 0: unit step.
    let kmax = T_MAX as i64;
    let mut sum = 0.0;
    for k in -kmax..=kmax {
        sum += node(k as f64, &mut evaluations);
    }
    let mut step = 1.0;
    let mut estimate = sum * step;
    let mut last_diff = f64::INFINITY;
    for _level in 1..=MAX_LEVEL {
        step *= 0.5;
        let mut added = 0.0;
        let n = (T_MAX / step) as i64;
        let mut k = -n;
        if k % 2 == 0 {
            k += 1;
        }
        while k <= n {
            added += node(k as f64 * step, &mut evaluations);
            k += 2;
        }
        sum += added;
        let next = sum * step;
        if !next.is_finite() {
            return Err(Error::Numeric(format!(
                "tanh-sinh produced a non-finite sum on [{a}, {b}]"
            )));
        }
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= tol * estimate.abs().max(1.0) && last_diff.is_finite() {
            return Ok(QuadResult {
                value: estimate,
                error: diff,
                evaluations,
            });
        }
        last_diff = diff;
    }
    Err(Error::Numeric(format!(
        "tanh-sinh did not reach tolerance {tol:e} on [{a}, {b}] (last change {last_diff:e})"
    )))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "at least one node required");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule over the panels delimited by `breaks`.
pub fn composite_gauss<F: Fn(f64) -> f64>(f: F, breaks: &[f64], order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    breaks
        .windows(2)
        .map(|ab| {
            let (a, b) = (ab[0], ab[1]);
            let h = 0.5 * (b - a);
            let c = 0.5 * (a + b);
            x.iter().zip(&w).map(|(&xi, &wi)| wi * f(c + h * xi)).sum::<f64>() * h
        })
        .sum()
}
