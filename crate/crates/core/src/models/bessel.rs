//! Radial operator `-d²/dr² - (n-1)/r d/dr + c/r²` on `(0, R)` with
//! Dirichlet condition at `R`.

use super::{ModelKind, SpectralModel};
use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

/// `(J_ν(x), J_{ν+1}(x))` for `ν >= 0`, `x >= 0`, by Miller's backward
/// recurrence normalized with `(x/2)^ν = Σ_k (ν+2k) Γ(ν+k)/k! J_{ν+2k}(x)`.
pub fn bessel_j_pair(nu: f64, x: f64) -> (f64, f64) {
    assert!(nu >= 0.0 && x >= 0.0, "bessel_j_pair needs nu >= 0, x >= 0");
    if x == 0.0 {
        return (if nu == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    if x < 1e-6 {
        let a = (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)).exp();
        let b = ((nu + 1.0) * (0.5 * x).ln() - ln_gamma(nu + 2.0)).exp();
        return (a, b);
    }
    let top = (x + 30.0 + 10.0 * x.sqrt()).ceil() as usize + 20;
    let mut vals = vec![0.0f64; top + 2];
    vals[top + 1] = 0.0;
    vals[top] = 1e-300;
    for m in (1..=top).rev() {
        let mu = nu + m as f64;
        vals[m - 1] = 2.0 * mu / x * vals[m] - vals[m + 1];
        if vals[m - 1].abs() > 1e250 {
            for v in vals[m - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    // normalization sum over even offsets, in log space for the weights
    let mut sum = 0.0;
    let mut k = 0usize;
    while 2 * k <= top {
        let c = if k == 0 {
            ln_gamma(nu + 1.0).exp()
        } else {
            ((nu + 2.0 * k as f64).ln() + ln_gamma(nu + k as f64) - ln_gamma(k as f64 + 1.0)).exp()
        };
        sum += c * vals[2 * k];
        k += 1;
    }
    let scale = (nu * (0.5 * x).ln()).exp() / sum;
    (vals[0] * scale, vals[1] * scale)
}

pub fn bessel_j(nu: f64, x: f64) -> f64 {
    bessel_j_pair(nu, x).0
}

/// First `count` positive zeros of `J_ν`, by a sign-change scan refined with
/// bisection.
pub fn bessel_zeros(nu: f64, count: usize) -> Vec<f64> {
    let mut zeros = Vec::with_capacity(count);
    let step = 0.1;
    let mut a = nu.max(0.05);
    let mut fa = bessel_j(nu, a);
    while zeros.len() < count {
        let b = a + step;
        let fb = bessel_j(nu, b);
        if fa == 0.0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = bessel_j(nu, mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
                if hi - lo < 1e-15 * hi {
                    break;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    zeros
}

/// Dirichlet truncation of the inverse-square radial operator on `(0, R)`.
pub fn bessel_model(n: usize, c: f64, modes: usize, r_domain: f64, grid: usize) -> Result<SpectralModel> {
    if n <= 2 {
        return Err(Error::Config(format!("radial dimension n = {n} must exceed 2")));
    }
    let hardy = -((n as f64 - 2.0).powi(2)) / 4.0;
    if !(c > hardy) {
        return Err(Error::Domain(format!(
            "c = {c} is at or below the Hardy threshold {hardy}"
        )));
    }
    if modes == 0 || grid < 4 * modes {
        return Err(Error::Config("bessel grid must hold at least four points per mode".into()));
    }
    let nu = ((n as f64 - 2.0).powi(2) / 4.0 + c).sqrt();
    let space = MetricMeasureSpace::half_line_grid(r_domain, grid, n as f64)?;
    let zeros = bessel_zeros(nu, modes);
    let eigenvalues = zeros.iter().map(|j| (j / r_domain).powi(2)).collect();
    let labels = (1..=modes as i64).map(|k| [k, 0]).collect();
    let shift = (n as f64 - 2.0) / 2.0;
    let mut basis = Vec::with_capacity(modes * grid);
    for &j in &zeros {
        let norm = 2f64.sqrt() / (r_domain * bessel_j_pair(nu, j).1.abs());
        for i in 0..grid {
            let r = space.point(i)[0];
            basis.push(Complex64::new(norm * r.powf(-shift) * bessel_j(nu, j * r / r_domain), 0.0));
        }
    }
    SpectralModel::from_parts(space, ModelKind::BesselRadial, eigenvalues, labels, basis, 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_integer_closed_form() {
        for &x in &[0.3, 1.0, 7.5, 40.0, 120.0] {
            let (j, j1) = bessel_j_pair(0.5, x);
            let s = (2.0 / (PI * x)).sqrt();
            assert!((j - s * x.sin()).abs() < 1e-12, "x={x}");
            assert!((j1 - s * (x.sin() / x - x.cos())).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn integer_order_values() {
        // J_0(1), J_1(1), J_0(10)
        assert!((bessel_j(0.0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-13);
        assert!((bessel_j(1.0, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-13);
        assert!((bessel_j(0.0, 10.0) + 0.245_935_764_451_348_3).abs() < 1e-13);
    }

    #[test]
    fn zeros_of_half_order_are_multiples_of_pi() {
        for (k, z) in bessel_zeros(0.5, 10).iter().enumerate() {
            assert!((z - (k + 1) as f64 * PI).abs() < 1e-11);
        }
        assert!((bessel_zeros(0.0, 1)[0] - 2.404_825_557_695_773).abs() < 1e-12);
    }

    #[test]
    fn model_reduces_to_sines() {
        let m = bessel_model(3, 0.0, 8, 1.0, 2000).unwrap();
        for (k, l) in m.eigenvalues().iter().enumerate() {
            assert!((l - ((k + 1) as f64 * PI).powi(2)).abs() < 1e-8);
        }
        // e_k(r) = √2 sin(kπ r)/r /(√(4π)) up to sign: compare the ratio
        let r0 = m.space().point(100)[0];
        let r1 = m.space().point(700)[0];
        let ratio = m.eigenfunction(2, 100).re / m.eigenfunction(2, 700).re;
        let want = ((3.0 * PI * r0).sin() / r0) / ((3.0 * PI * r1).sin() / r1);
        assert!((ratio - want).abs() < 1e-9);
        assert!(m.orthonormality_error() < 1e-6);
    }

    #[test]
    fn hardy_threshold() {
        assert!(matches!(bessel_model(3, -0.25, 4, 1.0, 100), Err(Error::Domain(_))));
        assert!(bessel_model(3, -0.2, 4, 1.0, 400).is_ok());
    }
}
