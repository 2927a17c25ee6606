//! Mellin transform `𝔪_F(u) = (2π)^{-1} ∫_0^∞ F(λ) λ^{-1-iu} dλ`, computed as
//! the Fourier transform of `G(ν) = F(e^ν)`.
//!
//! When `F(0) != 0`, `G` tends to `F(0)` as `ν → -∞` and its transform has
//! a point mass at `u = 0`. The value `F(0)` is therefore carried as a
//! separate term: `F = F(0) e^{-λ} + F♭`, and only `F♭` is transformed, so
//! `F(λ) = F(0) e^{-λ} + ∫ 𝔪_{F♭}(u) λ^{iu} du`.

use super::Symbol;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const NU_MIN: f64 = -40.0;
const NU_MAX: f64 = 3.7;
const OVERSAMPLE: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinData {
    /// Ascending, symmetric about 0, spacing `du`.
    pub u_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub du: f64,
    /// `F(0)`, carried as the additive term `F(0) e^{-λ}`.
    pub f0: f64,
}

/// Transforms `F` (a function of `λ` supported in `[0, 2]`) on
/// `|u| <= u_max` with at least `n_u` samples there.
pub fn mellin(f: &Symbol, u_max: f64, n_u: usize) -> Result<MellinData> {
    match f.support() {
        Some((a, b)) if a >= 0.0 && b <= 2.0 => {}
        Some((a, b)) => {
            return Err(Error::arg("F", format!("support [{a}, {b}] is not inside [0, 2]")))
        }
        None => return Err(Error::arg("F", "symbol has no declared compact support")),
    }
    if !(u_max > 0.0) || n_u < 2 {
        return Err(Error::arg("u_max", "need u_max > 0 and n_u >= 2"));
    }
    let f0 = f.eval_re(0.0);
    let h = PI / (OVERSAMPLE * u_max);
    let period = (NU_MAX - NU_MIN).max(PI * n_u as f64 / u_max);
    let n = ((period / h).ceil() as usize).next_power_of_two();
    let mut buf: Vec<Complex64> = (0..n)
        .map(|m| {
            let nu = NU_MIN + m as f64 * h;
            let lam = nu.exp();
            Complex64::new(f.eval_re(lam) - f0 * (-lam).exp(), 0.0)
        })
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let du = 2.0 * PI / (n as f64 * h);
    let kmax = (u_max / du).floor() as i64;
    let mut u_grid = Vec::with_capacity(2 * kmax as usize + 1);
    let mut values = Vec::with_capacity(2 * kmax as usize + 1);
    for k in -kmax..=kmax {
        let idx = if k >= 0 { k as usize } else { (n as i64 + k) as usize };
        let u = k as f64 * du;
        let phase = Complex64::from_polar(1.0, -u * NU_MIN);
        u_grid.push(u);
        values.push(buf[idx] * phase * (h / (2.0 * PI)));
    }
    Ok(MellinData {
        u_grid,
        values,
        du,
        f0,
    })
}

impl MellinData {
    pub fn u_max(&self) -> f64 {
        *self.u_grid.last().expect("grid is nonempty")
    }

    /// `F(0) e^{-λ} + Σ_k 𝔪(u_k) λ^{iu_k} du`.
    pub fn reconstruct(&self, lambda: f64) -> Complex64 {
        if lambda <= 0.0 {
            return Complex64::new(self.f0, 0.0);
        }
        let nu = lambda.ln();
        let s: Complex64 = self
            .u_grid
            .iter()
            .zip(&self.values)
            .map(|(u, m)| m * Complex64::from_polar(1.0, u * nu))
            .sum();
        s * self.du + self.f0 * (-lambda).exp()
    }

    /// Truncated `∫_{|u|<=cut} |𝔪(u)| (1+|u|)^s du`.
    pub fn weight_upto(&self, s: f64, cut: f64) -> f64 {
        self.u_grid
            .iter()
            .zip(&self.values)
            .filter(|(u, _)| u.abs() <= cut)
            .map(|(u, m)| m.norm() * (1.0 + u.abs()).powf(s))
            .sum::<f64>()
            * self.du
    }
}

/// `C_{F,s}(u_max)` on the full computed grid.
pub fn mellin_weight(data: &MellinData, s: f64) -> f64 {
    data.weight_upto(s, f64::INFINITY)
}

/// Behaviour of `C_{F,s}(U)` as `U` doubles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinConvergence {
    pub cutoffs: Vec<f64>,
    pub values: Vec<f64>,
    pub increments: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Increments shrink geometrically at every doubling.
    pub convergent: bool,
    /// Values increase and increments never shrink.
    pub growing: bool,
}

impl MellinConvergence {
    pub fn study(f: &Symbol, s: f64, u0: f64, doublings: usize) -> Result<Self> {
        if doublings < 2 {
            return Err(Error::arg("doublings", "need at least two doublings"));
        }
        let top = u0 * 2f64.powi(doublings as i32);
        let data = mellin(f, top, 4096)?;
        let cutoffs: Vec<f64> = (0..=doublings).map(|k| u0 * 2f64.powi(k as i32)).collect();
        let values: Vec<f64> = cutoffs.iter().map(|&c| data.weight_upto(s, c)).collect();
        let increments: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let ratios: Vec<f64> = increments.windows(2).map(|w| w[1] / w[0]).collect();
        let convergent = ratios.iter().all(|&r| r < 1.0);
        let growing = increments.iter().all(|&d| d > 0.0) && ratios.iter().all(|&r| r >= 1.0);
        Ok(MellinConvergence {
            cutoffs,
            values,
            increments,
            ratios,
            convergent,
            growing,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{bumps, ArgumentKind};
    use super::*;

    fn bump() -> Symbol {
        Symbol::real("bump", ArgumentKind::OfL, Some((0.25, 1.75)), |l| bumps::mollifier((l - 1.0) / 1.5))
    }

    fn br(alpha: f64) -> Symbol {
        Symbol::real("br", ArgumentKind::OfL, Some((0.0, 1.0)), move |l| {
            if (0.0..1.0).contains(&l) {
                (1.0 - l * l).powf(alpha)
            } else {
                0.0
            }
        })
    }

    #[test]
    fn reconstruction_of_smooth_symbols() {
        let plateau = Symbol::real("eta", ArgumentKind::OfL, Some((0.0, 2.0)), bumps::eta);
        for f in [bump(), plateau] {
            let d = mellin(&f, 400.0, 4096).unwrap();
            for lam in [0.5, 1.0, 1.5] {
                let r = (d.reconstruct(lam) - f.eval_re(lam)).norm();
                assert!(r <= 1e-6, "{} at {lam}: {r}", f.name());
            }
        }
    }

    #[test]
    fn conjugate_symmetry_for_real_symbols() {
        let d = mellin(&br(1.0), 50.0, 512).unwrap();
        let n = d.u_grid.len();
        for k in 0..n {
            assert!((d.values[k] - d.values[n - 1 - k].conj()).norm() < 1e-14);
            assert!((d.u_grid[k] + d.u_grid[n - 1 - k]).abs() < 1e-9);
        }
    }

    #[test]
    fn weight_convergence_iff_alpha_exceeds_s() {
        let c = MellinConvergence::study(&br(1.0), 0.5, 25.0, 4).unwrap();
        assert!(c.convergent, "{:?}", c.ratios);
        let d = MellinConvergence::study(&br(0.3), 0.5, 25.0, 4).unwrap();
        assert!(!d.convergent && d.growing, "{:?}", d.ratios);
    }

    #[test]
    fn rejects_noncompact() {
        let g = Symbol::real("gauss", ArgumentKind::OfL, None, |l| (-l).exp());
        assert!(mellin(&g, 10.0, 64).is_err());
        let wide = Symbol::indicator(0.0, 3.0, ArgumentKind::OfL);
        assert!(mellin(&wide, 10.0, 64).is_err());
    }
}
