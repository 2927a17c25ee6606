use super::{ArgumentKind, Symbol};
use crate::error::{Error, Result};

/// Bochner-Riesz symbol `λ ↦ (1 - λ/R²)₊^α` of `L`; for `α = 0` the
/// indicator of `[0, R²)`.
pub fn br_symbol(alpha: f64, r: f64) -> Result<Symbol> {
    if !(alpha >= 0.0) {
        return Err(Error::arg("alpha", format!("order {alpha} must be >= 0")));
    }
    if !(r > 0.0) {
        return Err(Error::arg("R", "scale must be positive"));
    }
    let r2 = r * r;
    Ok(Symbol::real(
        format!("br(alpha={alpha},R={r})"),
        ArgumentKind::OfL,
        Some((0.0, r2)),
        move |lambda| {
            if !(0.0..r2).contains(&lambda) {
                0.0
            } else if alpha == 0.0 {
                1.0
            } else {
                (1.0 - lambda / r2).powf(alpha)
            }
        },
    ))
}

/// `(1 - ξ²)₊^ρ = φ₀^ρ(ξ) + Σ_{k>=1} 2^{-kρ} φ_k^ρ(ξ)` with
/// `φ_k^ρ(ξ) = φ(2^k (1 - ξ²))`, `φ(x) = x^ρ b(x)`.
#[derive(Debug, Clone)]
pub struct DyadicDecomposition {
    pub rho: f64,
    pub phi0: Symbol,
    /// `terms[k - 1] = φ_k^ρ`, `k = 1..=k_max`
    pub terms: Vec<Symbol>,
    bump_support: (f64, f64),
}

impl DyadicDecomposition {
    pub fn k_max(&self) -> usize {
        self.terms.len()
    }

    pub fn partial_sum(&self, xi: f64) -> f64 {
        let mut s = self.phi0.eval_re(xi);
        for (k, t) in self.terms.iter().enumerate() {
            s += 2f64.powf(-((k + 1) as f64) * self.rho) * t.eval_re(xi);
        }
        s
    }

    /// `max |partial_sum(ξ) - (1 - ξ²)^ρ|` over `samples + 1` equispaced
    /// points of `[0, xi_max]`.
    pub fn max_residual(&self, xi_max: f64, samples: usize) -> f64 {
        (0..=samples)
            .map(|i| {
                let xi = xi_max * i as f64 / samples.max(1) as f64;
                (self.partial_sum(xi) - (1.0 - xi * xi).max(0.0).powf(self.rho)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Open range of `|ξ|` on which `φ_k^ρ` can be nonzero:
    /// `1 - ξ² ∈ (a 2^{-k}, b 2^{-k})` for the bump support `(a, b)`.
    pub fn term_support(&self, k: usize) -> (f64, f64) {
        let (a, b) = self.bump_support;
        let scale = 2f64.powi(-(k as i32));
        ((1.0 - b * scale).max(0.0).sqrt(), (1.0 - a * scale).sqrt())
    }
}

/// Splits `(1 - ξ²)₊^ρ` along the dyadic partition generated by `bump`,
/// which must satisfy `Σ_k bump(2^k x) = 1` on `(0, 1]` and be supported in
/// `(a, b)` with `0 < a < b <= 1`.
pub fn dyadic_decompose(rho: f64, bump: &Symbol, k_max: usize) -> Result<DyadicDecomposition> {
    let Some((a, b)) = bump.support() else {
        return Err(Error::arg("phi", "bump must declare its support"));
    };
    if !(a > 0.0 && a < b && b <= 1.0) {
        return Err(Error::arg("phi", format!("support [{a}, {b}] is not inside (0, 1]")));
    }
    bump.verify_support(200)?;
    let kspan = ((b / a).log2().ceil() as i32) + 1;
    let partition = |x: f64| -> f64 {
        let base = (x.log2()).floor() as i32;
        (-base - kspan - 1..=-base + kspan + 1)
            .map(|k| bump.eval_re(2f64.powi(k) * x))
            .sum()
    };
    for i in 0..500 {
        let x = 2f64.powf(-12.0 * (i as f64 + 0.5) / 500.0);
        let s = partition(x);
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::arg("phi", format!("dilates sum to {s} at x = {x}, not 1")));
        }
    }
    let b0 = bump.clone();
    // φ₀^ρ = y^ρ Σ_{k<=0} bump(2^k y)
    let phi0 = Symbol::real(format!("phi0(rho={rho})"), ArgumentKind::OfSqrtL, Some((-1.0, 1.0)), move |xi| {
        let y = 1.0 - xi * xi;
        if y <= 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        let mut k = 0;
        while 2f64.powi(k) * y > a * 0.5 {
            s += b0.eval_re(2f64.powi(k) * y);
            k -= 1;
        }
        if s == 0.0 {
            0.0
        } else {
            y.powf(rho) * s
        }
    });
    let terms = (1..=k_max)
        .map(|k| {
            let bk = bump.clone();
            let scale = 2f64.powi(k as i32);
            let lo = (1.0 - b / scale).max(0.0).sqrt();
            let hi = (1.0 - a / scale).sqrt();
            Symbol::real(format!("phi{k}(rho={rho})"), ArgumentKind::OfSqrtL, Some((-hi, hi)), move |xi| {
                let ax = xi.abs();
                if ax <= lo || ax >= hi {
                    return 0.0;
                }
                let x = scale * (1.0 - xi * xi);
                let v = bk.eval_re(x);
                if v == 0.0 {
                    0.0
                } else {
                    x.powf(rho) * v
                }
            })
        })
        .collect();
    Ok(DyadicDecomposition {
        rho,
        phi0,
        terms,
        bump_support: (a, b),
    })
}

fn check_eta(eta: &Symbol) -> Result<()> {
    for i in 0..=400 {
        let s = -3.0 + 6.0 * i as f64 / 400.0;
        let v = eta.eval_re(s);
        if (v - eta.eval_re(-s)).abs() > 1e-15 {
            return Err(Error::arg("eta", "cutoff is not even"));
        }
        if s.abs() <= 1.0 && (v - 1.0).abs() > 1e-15 {
            return Err(Error::arg("eta", "cutoff is not 1 on [-1, 1]"));
        }
        if s.abs() >= 2.0 && v.abs() > 1e-15 {
            return Err(Error::arg("eta", "cutoff is not supported in [-2, 2]"));
        }
    }
    Ok(())
}

/// `max |Σ_f f(s) - 1|` over `probes` equispaced points of `[lo, hi]`.
pub fn partition_defect(family: &[Symbol], lo: f64, hi: f64, probes: usize) -> f64 {
    (0..probes)
        .map(|i| {
            let s = lo + (hi - lo) * i as f64 / (probes.max(2) - 1) as f64;
            (family.iter().map(|f| f.eval_re(s)).sum::<f64>() - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// `ζ_{j0}(s) = η(2^{-j0} s)`, `ζ_j(s) = η(2^{-j} s) - η(2^{-j+1} s)` for
/// `j0 < j <= j_max`; returned in order `j0..=j_max`.
pub fn zeta_family(j0: i32, j_max: i32, eta: &Symbol) -> Result<Vec<Symbol>> {
    check_eta(eta)?;
    if j_max < j0 {
        return Err(Error::arg("j_max", "must be >= j0"));
    }
    Ok((j0..=j_max)
        .map(|j| {
            let e = eta.clone();
            let (c0, c1) = (2f64.powi(-j), 2f64.powi(-j + 1));
            let support = 2f64.powi(j + 1);
            if j == j0 {
                Symbol::real(format!("zeta{j}"), ArgumentKind::OfSqrtL, Some((-support, support)), move |s| {
                    e.eval_re(c0 * s)
                })
            } else {
                Symbol::real(format!("zeta{j}"), ArgumentKind::OfSqrtL, Some((-support, support)), move |s| {
                    e.eval_re(c0 * s) - e.eval_re(c1 * s)
                })
            }
        })
        .collect())
}

/// `ψ_{0,δ}(s) = θ(δ^{-1}(1-s))`,
/// `ψ_{ℓ,δ}(s) = θ(2^{-ℓ}δ^{-1}(1-s)) - θ(2^{-ℓ+1}δ^{-1}(1-s))`, `ℓ = 0..=l_max`.
pub fn psi_family(delta: f64, l_max: usize, theta: &Symbol) -> Result<Vec<Symbol>> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::arg("delta", "must lie in (0, 1]"));
    }
    Ok((0..=l_max as i32)
        .map(|l| {
            let t = theta.clone();
            let c0 = 2f64.powi(-l) / delta;
            let c1 = 2f64.powi(-l + 1) / delta;
            let w = 2f64.powi(l + 2) * delta;
            Symbol::real(format!("psi{l}(delta={delta})"), ArgumentKind::OfSqrtL, Some((1.0 - w, 1.0 + w)), move |s| {
                if l == 0 {
                    t.eval_re(c0 * (1.0 - s))
                } else {
                    t.eval_re(c0 * (1.0 - s)) - t.eval_re(c1 * (1.0 - s))
                }
            })
        })
        .collect())
}

/// `η_λ(s) = b(λ + (2^{k-1} - s)/(2^{k-1} δ))` for `λ = 0..=[8/δ] + 1`,
/// where `Σ_λ b(· - λ) = 1`.
pub fn eta_lambda_family(k: i32, delta: f64, bump: &Symbol) -> Result<Vec<Symbol>> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::arg("delta", "must lie in (0, 1]"));
    }
    let lambda0 = (8.0 / delta).floor() as i64 + 1;
    let base = 2f64.powi(k - 1);
    Ok((0..=lambda0)
        .map(|lambda| {
            let b = bump.clone();
            let lf = lambda as f64;
            let lo = base + (lf - 1.0) * base * delta;
            let hi = base + (lf + 1.0) * base * delta;
            Symbol::real(format!("eta_lambda{lambda}(k={k})"), ArgumentKind::OfSqrtL, Some((lo, hi)), move |s| {
                b.eval_re(lf + (base - s) / (base * delta))
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::bumps;
    use super::*;

    #[test]
    fn br_symbol_values() {
        let s = br_symbol(1.0, 2.0).unwrap();
        assert_eq!(s.eval_re(2.0), 0.5);
        assert_eq!(br_symbol(0.7, 3.0).unwrap().eval_re(0.0), 1.0);
        let ind = br_symbol(0.0, 2.0).unwrap();
        assert_eq!(ind.eval_re(3.99), 1.0);
        assert_eq!(ind.eval_re(4.0), 0.0);
        assert!(br_symbol(-0.1, 1.0).is_err());
        ind.verify_support(100).unwrap();
    }

    #[test]
    fn dyadic_terms() {
        let d = dyadic_decompose(1.0, &bumps::dyadic_symbol(), 20).unwrap();
        assert_eq!(d.phi0.eval_re(0.0), 1.0);
        for t in &d.terms {
            assert_eq!(t.eval_re(0.0), 0.0);
        }
        // 1 - ξ² = 3·2^{-k-2}: only k-1, k may be active
        for k in 2..15usize {
            let xi = (1.0 - 3.0 * 2f64.powi(-(k as i32) - 2)).sqrt();
            for (i, t) in d.terms.iter().enumerate() {
                let kk = i + 1;
                if kk + 1 < k || kk > k + 1 {
                    assert_eq!(t.eval_re(xi), 0.0, "k={k} term {kk}");
                }
            }
        }
        for k in 1..=20 {
            let (lo, hi) = d.term_support(k);
            let t = &d.terms[k - 1];
            for i in 0..200 {
                let xi = i as f64 / 199.0;
                if xi <= lo || xi >= hi {
                    assert!(t.eval_re(xi).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn dyadic_reconstruction() {
        for rho in [0.5, 1.0, 2.0] {
            let d = dyadic_decompose(rho, &bumps::dyadic_symbol(), 20).unwrap();
            let top = 1.0 - 2f64.powi(-18);
            let mut worst = 0.0f64;
            for i in 0..=4000 {
                let xi = top * i as f64 / 4000.0;
                let want = (1.0 - xi * xi).powf(rho);
                worst = worst.max((d.partial_sum(xi) - want).abs());
            }
            assert!(worst <= 1e-5, "rho={rho}: {worst}");
        }
    }

    #[test]
    fn dyadic_rejects_bad_bump() {
        let narrow = Symbol::real("narrow", ArgumentKind::OfSqrtL, Some((0.25, 0.5)), |x| {
            bumps::mollifier(4.0 * (x - 0.375))
        });
        assert!(matches!(dyadic_decompose(1.0, &narrow, 5), Err(Error::Argument { .. })));
    }

    #[test]
    fn zeta_partial_sums() {
        let z = zeta_family(2, 14, &bumps::eta_symbol()).unwrap();
        assert_eq!(z[0].eval_re(0.0), 1.0);
        assert!(z[1..].iter().all(|s| s.eval_re(0.0) == 0.0));
        for i in 0..1000 {
            let s = 2f64.powi(13) * i as f64 / 999.0;
            let total: f64 = z.iter().map(|f| f.eval_re(s)).sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
        // s = 3·2^{j-1} lies only in the supports of ζ_j and ζ_{j+1}
        let j = 6;
        let s = 3.0 * 2f64.powi(j - 1);
        for (idx, f) in z.iter().enumerate() {
            let jj = idx as i32 + 2;
            if jj != j && jj != j + 1 {
                assert_eq!(f.eval_re(s), 0.0);
            }
        }
    }

    #[test]
    fn psi_identities() {
        let delta = 1.0 / 32.0;
        let l_max = 6;
        let p = psi_family(delta, l_max, &bumps::theta_symbol()).unwrap();
        assert_eq!(p[0].eval_re(1.0), 1.0);
        assert!(p[1..].iter().all(|f| f.eval_re(1.0) == 0.0));
        for i in 0..1000 {
            let s = 1.0 - 2f64.powi(l_max as i32) * delta + 2.0 * 2f64.powi(l_max as i32) * delta * i as f64 / 999.0;
            let total: f64 = p.iter().map(|f| f.eval_re(s)).sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
        assert_eq!(p[3].eval_re(1.0 + 8.0 * delta / 2.0), 0.0);
        assert!(p[3].eval_re(1.0 + 5.0 * 8.0 * delta / 2.0) != 0.0);
        for (l, f) in p.iter().enumerate() {
            f.verify_support(500).unwrap();
            if l >= 1 {
                let w = 2f64.powi(l as i32) * delta;
                for i in 0..100 {
                    let s = 1.0 - w + 2.0 * w * (i as f64 + 0.5) / 100.0;
                    assert_eq!(f.eval_re(s), 0.0);
                }
            }
        }
    }

    #[test]
    fn eta_lambda_covers_band() {
        for (k, delta) in [(0, 0.25), (3, 0.1), (-2, 1.0 / 16.0)] {
            let f = eta_lambda_family(k, delta, &bumps::unit_translate_symbol()).unwrap();
            let lo = 2f64.powi(k - 1);
            let hi = 2f64.powi(k + 2);
            for i in 0..1000 {
                let s = lo + (hi - lo) * i as f64 / 999.0;
                let total: f64 = f.iter().map(|g| g.eval_re(s)).sum();
                assert!((total - 1.0).abs() < 1e-12, "k={k} s={s} total={total}");
            }
        }
    }
}
