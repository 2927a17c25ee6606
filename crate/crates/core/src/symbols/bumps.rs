//! The shipped smooth cutoffs.
//!
//! Everything is built from `e(y) = exp(-1/y)` (`y > 0`) and the smooth
//! step `S(y) = e(y) / (e(y) + e(1 - y))`, which is `0` for `y <= 0`, `1` for
//! `y >= 1`, and satisfies `S(y) + S(1 - y) = 1`.
//!
//! | name | definition | support | identity |
//! |---|---|---|---|
//! | `mollifier` | `exp(1 - 1/(1 - 4x²))` | `[-1/2, 1/2]` | peak value 1 at 0 |
//! | `eta` | `1 - S(|s| - 1)` | `[-2, 2]` | `≡ 1` on `[-1, 1]` |
//! | `theta` | `eta(s/2)` | `[-4, 4]` | `≡ 1` on `[-2, 2]` |
//! | `unit_translate` | `S(x + 1) - S(x)` | `(-1, 1)` | `Σ_λ b(x - λ) = 1` |
//! | `dyadic` | `S(log₂x + 2) - S(log₂x + 1)` | `(1/4, 1)` | `Σ_k ψ(2^k x) = 1`, `x > 0` |
//! | `lp_psi` | `√dyadic` | `(1/4, 1)` | `Σ_k ψ²(2^k x) = 1` |

use super::{ArgumentKind, Symbol};

fn e(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        (-1.0 / y).exp()
    }
}

pub fn smooth_step(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else if y >= 1.0 {
        1.0
    } else {
        let a = e(y);
        a / (a + e(1.0 - y))
    }
}

pub fn mollifier(x: f64) -> f64 {
    let q = 1.0 - 4.0 * x * x;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

pub fn eta(s: f64) -> f64 {
    1.0 - smooth_step(s.abs() - 1.0)
}

pub fn theta(s: f64) -> f64 {
    eta(0.5 * s)
}

pub fn unit_translate(x: f64) -> f64 {
    smooth_step(x + 1.0) - smooth_step(x)
}

pub fn dyadic(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let l = x.log2();
    smooth_step(l + 2.0) - smooth_step(l + 1.0)
}

pub fn lp_psi(x: f64) -> f64 {
    dyadic(x).max(0.0).sqrt()
}

pub fn mollifier_symbol() -> Symbol {
    Symbol::real("mollifier", ArgumentKind::OfSqrtL, Some((-0.5, 0.5)), mollifier)
}

pub fn eta_symbol() -> Symbol {
    Symbol::real("eta", ArgumentKind::OfSqrtL, Some((-2.0, 2.0)), eta)
}

pub fn theta_symbol() -> Symbol {
    Symbol::real("theta", ArgumentKind::OfSqrtL, Some((-4.0, 4.0)), theta)
}

pub fn unit_translate_symbol() -> Symbol {
    Symbol::real("unit-translate", ArgumentKind::OfSqrtL, Some((-1.0, 1.0)), unit_translate)
}

pub fn dyadic_symbol() -> Symbol {
    Symbol::real("dyadic", ArgumentKind::OfSqrtL, Some((0.25, 1.0)), dyadic)
}

pub fn lp_psi_symbol() -> Symbol {
    Symbol::real("lp-psi", ArgumentKind::OfSqrtL, Some((0.25, 1.0)), lp_psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_symmetry_and_limits() {
        for i in 0..=100 {
            let y = i as f64 / 100.0;
            assert!((smooth_step(y) + smooth_step(1.0 - y) - 1.0).abs() < 1e-15);
        }
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.1), 1.0);
    }

    #[test]
    fn plateaus_and_supports() {
        assert_eq!(mollifier(0.0), 1.0);
        for s in [-1.0, -0.3, 0.0, 0.9, 1.0] {
            assert_eq!(eta(s), 1.0);
            assert_eq!(theta(2.0 * s), 1.0);
        }
        for sym in [
            mollifier_symbol(),
            eta_symbol(),
            theta_symbol(),
            unit_translate_symbol(),
            dyadic_symbol(),
            lp_psi_symbol(),
        ] {
            sym.verify_support(1000).unwrap();
        }
    }

    #[test]
    fn partitions_of_unity() {
        for i in 0..1000 {
            let x = -7.3 + 14.6 * i as f64 / 999.0;
            let s: f64 = (-12..=12).map(|l| unit_translate(x - l as f64)).sum();
            assert!((s - 1.0).abs() < 1e-14);
            let y = 2f64.powf(-10.0 + 20.0 * i as f64 / 999.0);
            let d: f64 = (-20..=20).map(|k| dyadic(2f64.powi(k) * y)).sum();
            let q: f64 = (-20..=20).map(|k| lp_psi(2f64.powi(k) * y).powi(2)).sum();
            assert!((d - 1.0).abs() < 1e-14);
            assert!((q - 1.0).abs() < 1e-14);
        }
    }
}
