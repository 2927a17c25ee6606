use super::Symbol;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

const SOBOLEV_POINTS: usize = 1 << 14;
const PROBES_PER_CELL: usize = 64;

/// `‖(1+u²)^{β/2} F̂‖_{L²(du/2π)}` for `q = 2`; for `q = ∞` the surrogate
/// `sup_u (1+|u|)^β |F̂(u)|`. `F` must declare a compact support.
pub fn sobolev_norm(f: &Symbol, beta: f64, q: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::arg("beta", "must be >= 0"));
    }
    if q != 2.0 && q != f64::INFINITY {
        return Err(Error::arg("q", format!("only q = 2 and q = inf are supported, got {q}")));
    }
    let Some((a, b)) = f.support() else {
        return Err(Error::arg("F", "symbol has no declared compact support"));
    };
    let width = (b - a).max(1e-12);
    let lo = a - width;
    let n = SOBOLEV_POINTS;
    let h = 3.0 * width / n as f64;
    let mut buf: Vec<Complex64> = (0..n).map(|m| f.eval(lo + (m as f64 + 0.5) * h) * h).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let du = 2.0 * PI / (n as f64 * h);
    let freq = |k: usize| if k < n / 2 { k as f64 } else { k as f64 - n as f64 } * du;
    if q == 2.0 {
        let s: f64 = buf
            .iter()
            .enumerate()
            .map(|(k, v)| (1.0 + freq(k).powi(2)).powf(beta) * v.norm_sqr())
            .sum();
        Ok((s * du / (2.0 * PI)).sqrt())
    } else {
        Ok(buf
            .iter()
            .enumerate()
            .map(|(k, v)| (1.0 + freq(k).abs()).powf(beta) * v.norm())
            .fold(0.0, f64::max))
    }
}

/// `‖F‖_{N,q} = ((2N)^{-1} Σ_{ℓ=1-N}^{N} sup_{[(ℓ-1)/N, ℓ/N)} |F|^q)^{1/q}`,
/// `q = ∞` giving the plain maximum. Suprema are taken over 64 equispaced
/// probes per cell, left endpoint included.
pub fn cluster_seminorm(f: &Symbol, n: usize, q: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::arg("N", "must be positive"));
    }
    if !(q >= 1.0) {
        return Err(Error::arg("q", "must be >= 1"));
    }
    if let Some((a, b)) = f.support() {
        if a < -1.0 || b > 1.0 {
            return Err(Error::arg("F", format!("support [{a}, {b}] is not inside [-1, 1]")));
        }
    }
    let nf = n as f64;
    let sups: Vec<f64> = (1 - n as i64..=n as i64)
        .map(|l| {
            let left = (l as f64 - 1.0) / nf;
            (0..PROBES_PER_CELL)
                .map(|i| f.eval(left + i as f64 / (PROBES_PER_CELL as f64 * nf)).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    if q.is_infinite() {
        return Ok(sups.into_iter().fold(0.0, f64::max));
    }
    let s: f64 = sups.iter().map(|v| v.powf(q)).sum::<f64>() / (2.0 * nf);
    Ok(s.powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::super::{bumps, ArgumentKind};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_symbol_norms() {
        let z = Symbol::real("zero", ArgumentKind::OfSqrtL, Some((0.0, 1.0)), |_| 0.0);
        assert_eq!(sobolev_norm(&z, 1.0, 2.0).unwrap(), 0.0);
        assert_eq!(sobolev_norm(&z, 1.0, f64::INFINITY).unwrap(), 0.0);
        assert_eq!(cluster_seminorm(&z, 8, 2.0).unwrap(), 0.0);
        assert!(sobolev_norm(&z, 1.0, 3.0).is_err());
    }

    #[test]
    fn beta_zero_is_l2() {
        let b = bumps::mollifier_symbol();
        let w0 = sobolev_norm(&b, 0.0, 2.0).unwrap();
        let l2 = crate::quadrature::composite_gauss(|x| bumps::mollifier(x).powi(2), &[-0.5, 0.0, 0.5], 40).sqrt();
        assert!((w0 - l2).abs() < 1e-8, "{w0} vs {l2}");
        assert!(sobolev_norm(&b, 1.0, 2.0).unwrap() > w0);
    }

    #[test]
    fn indicator_cluster_norm() {
        let ind = Symbol::indicator(0.0, 1.0, ArgumentKind::OfSqrtL);
        for n in [1, 4, 17] {
            let v = cluster_seminorm(&ind, n, 2.0).unwrap();
            assert!((v - (n as f64 / (2.0 * n as f64)).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn cluster_norm_below_sup_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let pieces: Vec<f64> = (0..10).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let sup = pieces.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let f = Symbol::real("pw", ArgumentKind::OfSqrtL, Some((-1.0, 1.0)), move |x| {
                if !(-1.0..1.0).contains(&x) {
                    0.0
                } else {
                    pieces[((x + 1.0) * 5.0).floor() as usize]
                }
            });
            let n = rng.gen_range(1..30);
            let two = cluster_seminorm(&f, n, 2.0).unwrap();
            let inf = cluster_seminorm(&f, n, f64::INFINITY).unwrap();
            assert!(two <= inf + 1e-15);
            assert_eq!(inf, sup);
        }
    }
}
