//! The Riesz-mean subordination identity
//!
//! `(1 - m²/R²)^α = C_{α,ρ} R^{-2α} ∫_m^R (R² - t²)^{α-ρ-1} t^{2ρ+1} (1 - m²/t²)^ρ dt`,
//! `C_{α,ρ} = 2Γ(α+1) / (Γ(ρ+1)Γ(α-ρ))`.

use crate::error::{Error, Result};
use crate::quadrature::tanh_sinh;
use statrs::function::gamma::ln_gamma;

fn check_orders(alpha: f64, rho: f64) -> Result<()> {
    if !(rho > -0.5) {
        return Err(Error::arg("rho", format!("{rho} must exceed -1/2")));
    }
    if !(alpha > rho + 0.5) {
        return Err(Error::arg("alpha", format!("{alpha} must exceed rho + 1/2 = {}", rho + 0.5)));
    }
    Ok(())
}

pub fn subordination_constant(alpha: f64, rho: f64) -> f64 {
    2.0 * (ln_gamma(alpha + 1.0) - ln_gamma(rho + 1.0) - ln_gamma(alpha - rho)).exp()
}

/// Right-hand side of the identity by double-exponential quadrature.
pub fn subordination_rhs(alpha: f64, rho: f64, r: f64, m: f64, tol: f64) -> Result<f64> {
    check_orders(alpha, rho)?;
    if !(r > 0.0) || !(0.0..=r).contains(&m.abs()) {
        return Err(Error::arg("m", "need R > 0 and |m| <= R"));
    }
    let m = m.abs();
    if m == r {
        return Ok(0.0);
    }
    let c = subordination_constant(alpha, rho);
    let g = alpha - rho - 1.0;
    let q = tanh_sinh(
        |t, dm, dr| {
            // (R² - t²) = dr (R + t), (t² - m²) = dm (t + m)
            let a = (dr * (r + t)).powf(g);
            let b = t * (dm * (t + m)).powf(rho);
            a * b
        },
        m,
        r,
        tol,
    )
    .map_err(|e| Error::Numeric(format!("subordination quadrature (alpha={alpha}, rho={rho}, m={m}): {e}")))?;
    // t^{2ρ+1}(1 - m²/t²)^ρ = t (t² - m²)^ρ
    Ok(c * r.powf(-2.0 * alpha) * q.value)
}

/// Largest `|LHS - RHS|` over `m_grid`.
pub fn subordination_check(alpha: f64, rho: f64, r: f64, m_grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &m in m_grid {
        let lhs = (1.0 - (m / r).powi(2)).max(0.0).powf(alpha);
        let rhs = subordination_rhs(alpha, rho, r, m, 1e-13)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// `C' = C_{α,ρ} (∫_0^1 (1-u²)^{2(α-ρ-1)} u^{2(2ρ+1)} du)^{1/2}`, the
/// Cauchy-Schwarz constant of the maximal subordination bound.
pub fn subordination_cprime(alpha: f64, rho: f64) -> Result<f64> {
    check_orders(alpha, rho)?;
    let e1 = 2.0 * (alpha - rho - 1.0);
    let e2 = 2.0 * (2.0 * rho + 1.0);
    let q = tanh_sinh(|u, _, d1| (d1 * (1.0 + u)).powf(e1) * u.powf(e2), 0.0, 1.0, 1e-13)?;
    Ok(subordination_constant(alpha, rho) * q.value.sqrt())
}
