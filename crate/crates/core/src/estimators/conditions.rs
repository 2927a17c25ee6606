//! Checkers for finite propagation speed, the weighted heat conditions and
//! Gaussian bounds. They report measured constants rather than verdicts.

use super::bracket::{opnorm_bracket, opnorm_p_2, AscentOptions, MultipliedOp, NormBracket};
use crate::calculus::{heat, wave_cosine, OperatorHandle};
use crate::error::{Error, Result};
use crate::field::{CoefficientVector, Field};
use crate::models::SpectralModel;
use crate::quadrature::composite_gauss;
use crate::stats::linear_regression;
use crate::symbols::bumps::mollifier;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Smooth bump `φ(d(x, x0) / 2s)²` supported in `B(x0, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsBump {
    pub center: usize,
    pub radius: f64,
}

/// `φ(d(·, x0) / 2s)²` projected onto the band-limited modes.
pub fn fs_bump_field(model: &SpectralModel, bump: FsBump) -> Result<Field> {
    let s = model.space();
    if bump.center >= s.len() || !(bump.radius > 0.0) {
        return Err(Error::arg("bump", "center out of range or radius not positive"));
    }
    let c = s.point(bump.center).to_vec();
    let raw = Field::from_fn(s.len(), |i| Complex64::new(mollifier(s.distance_to(i, &c) / (2.0 * bump.radius)).powi(2), 0.0));
    let mut coef = model.analysis(&raw)?;
    for z in coef.0.iter_mut().skip(model.band_limit()) {
        *z = Complex64::new(0.0, 0.0);
    }
    model.synthesis(&coef)
}

/// `‖g 1_{d(·, x0) >= r}‖_2 / ‖f‖_2`.
pub fn outside_mass(model: &SpectralModel, g: &Field, f_norm: f64, center: usize, r: f64) -> f64 {
    let s = model.space();
    let c = s.point(center).to_vec();
    let out: f64 = (0..s.len())
        .filter(|&i| s.distance_to(i, &c) >= r)
        .map(|i| g[i].norm_sqr() * s.weights()[i])
        .sum();
    out.sqrt() / f_norm
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsEntry {
    pub t: f64,
    pub bump: FsBump,
    /// Relative `L²` mass outside `B(x0, s + t + guard)`.
    pub outside: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsReport {
    pub model: String,
    pub guard: f64,
    /// Only models with finite speed in the continuum are asserted.
    pub asserted: bool,
    /// Outside mass of the bumps themselves at `s + guard`.
    pub leakage: Vec<f64>,
    pub entries: Vec<FsEntry>,
    pub max_outside: f64,
}

/// Applies `cos(t√L)` to each bump and measures the mass outside the light
/// cone.
pub fn check_fs(model: &SpectralModel, t_list: &[f64], bumps: &[FsBump], guard: f64) -> Result<FsReport> {
    let fields = bumps.iter().map(|&b| fs_bump_field(model, b)).collect::<Result<Vec<_>>>()?;
    let norms = fields.iter().map(|f| model.space().lp_norm(f, 2.0)).collect::<Result<Vec<_>>>()?;
    let leakage = bumps
        .iter()
        .zip(&fields)
        .zip(&norms)
        .map(|((b, f), &nf)| outside_mass(model, f, nf, b.center, b.radius + guard))
        .collect();
    let mut entries = Vec::new();
    for &t in t_list {
        let w = wave_cosine(model, t)?;
        for ((b, f), &nf) in bumps.iter().zip(&fields).zip(&norms) {
            let g = w.apply(f)?;
            entries.push(FsEntry { t, bump: *b, outside: outside_mass(model, &g, nf, b.center, b.radius + t + guard) });
        }
    }
    let max_outside = entries.iter().map(|e| e.outside).fold(0.0, f64::max);
    Ok(FsReport {
        model: model.kind().name().to_string(),
        guard,
        asserted: model.kind().has_finite_speed(),
        leakage,
        entries,
        max_outside,
    })
}

/// `F(λ) = ∫_{-r}^{r} φ(u / 2r) cos(λu) du`, whose cosine transform is
/// supported in `[-r, r]`.
pub fn compact_fourier_symbol_value(r: f64, lambda: f64) -> f64 {
    let breaks: Vec<f64> = (0..=32).map(|i| r * i as f64 / 32.0).collect();
    2.0 * composite_gauss(|u| mollifier(u / (2.0 * r)) * (lambda * u).cos(), &breaks, 20)
}

/// Same cone check for `F(√L)` with `supp F̂ ⊆ [-r, r]`: mass outside
/// `B(x0, s + r + guard)`.
pub fn check_fs_symbol(model: &SpectralModel, r: f64, bumps: &[FsBump], guard: f64) -> Result<FsReport> {
    if !(r > 0.0) {
        return Err(Error::arg("r", "must be positive"));
    }
    let diag = model
        .eigenvalues()
        .iter()
        .map(|&l| Complex64::new(compact_fourier_symbol_value(r, l.sqrt()), 0.0))
        .collect();
    let h = OperatorHandle::from_diag(model, format!("compact-fourier(r={r})"), diag)?;
    let mut entries = Vec::new();
    let mut leakage = Vec::new();
    for b in bumps {
        let f = fs_bump_field(model, *b)?;
        let nf = model.space().lp_norm(&f, 2.0)?;
        leakage.push(outside_mass(model, &f, nf, b.center, b.radius + guard));
        let g = h.apply(&f)?;
        entries.push(FsEntry { t: r, bump: *b, outside: outside_mass(model, &g, nf, b.center, b.radius + r + guard) });
    }
    let max_outside = entries.iter().map(|e| e.outside).fold(0.0, f64::max);
    Ok(FsReport {
        model: model.kind().name().to_string(),
        guard,
        asserted: model.kind().has_finite_speed(),
        leakage,
        entries,
        max_outside,
    })
}

fn check_sub_two(p: f64) -> Result<()> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::arg("p", format!("{p} must lie in [1, 2)")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvReport {
    pub p: f64,
    pub entries: Vec<(f64, NormBracket)>,
    pub sup_lower: f64,
    pub sup_upper: Option<f64>,
}

/// Brackets `‖e^{-t²L} V_t^{1/p-1/2}‖_{p→2}` for each `t`.
pub fn check_ev(model: &SpectralModel, p: f64, t_list: &[f64], opts: &AscentOptions) -> Result<EvReport> {
    check_sub_two(p)?;
    let s = model.space();
    let gamma = 1.0 / p - 0.5;
    let mut entries = Vec::new();
    for &t in t_list {
        let h = heat(model, t)?;
        let v = (0..s.len()).map(|x| s.ball_volume(x, t)).collect::<Result<Vec<_>>>()?;
        let op = MultipliedOp { inner: &h, multiplier: v.iter().map(|x| x.powf(gamma)).collect() };
        entries.push((t, opnorm_p_2(&op, p, opts)?.without_witness()));
    }
    let sup_lower = entries.iter().map(|e| e.1.lower).fold(0.0, f64::max);
    let sup_upper = entries.iter().map(|e| e.1.upper).try_fold(0.0f64, |a, u| u.map(|u| a.max(u)));
    Ok(EvReport { p, entries, sup_lower, sup_upper })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GEntry {
    pub x: usize,
    pub s: f64,
    pub t: f64,
    pub bracket: NormBracket,
    /// `V(x,s)^{1/2-1/p} (s/t)^{n(1/p-1/2)}`
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GReport {
    pub p: f64,
    pub entries: Vec<GEntry>,
    /// Smallest constant consistent with every lower bound.
    pub c_lower: f64,
    /// Constant implied by the upper bounds, when all exist.
    pub c_upper: Option<f64>,
}

/// Brackets `‖e^{-t²L} χ_{B(x,s)}‖_{p→2}` against the scale
/// `V(x,s)^{1/2-1/p} (s/t)^{n(1/p-1/2)}` on `(x, s, t)` samples.
pub fn check_g(model: &SpectralModel, p: f64, samples: &[(usize, f64, f64)], opts: &AscentOptions) -> Result<GReport> {
    check_sub_two(p)?;
    let sp = model.space();
    let n = sp.dimension_n();
    let mut entries = Vec::new();
    for &(x, s, t) in samples {
        if !(t > 0.0 && s >= t) || x >= sp.len() {
            return Err(Error::arg("s_t_pairs", format!("need s >= t > 0 and a valid point, got ({x}, {s}, {t})")));
        }
        let c = sp.point(x).to_vec();
        let chi: Vec<f64> = (0..sp.len()).map(|i| if sp.distance_to(i, &c) < s { 1.0 } else { 0.0 }).collect();
        let h = heat(model, t)?;
        let op = MultipliedOp { inner: &h, multiplier: chi };
        let bracket = opnorm_p_2(&op, p, opts)?.without_witness();
        let scale = sp.ball_volume(x, s)?.powf(0.5 - 1.0 / p) * (s / t).powf(n * (1.0 / p - 0.5));
        entries.push(GEntry { x, s, t, bracket, scale });
    }
    let c_lower = entries.iter().map(|e| e.bracket.lower / e.scale).fold(0.0, f64::max);
    let c_upper = entries
        .iter()
        .map(|e| e.bracket.upper.map(|u| u / e.scale))
        .try_fold(0.0f64, |a, u| u.map(|u| a.max(u)));
    Ok(GReport { p, entries, c_lower, c_upper })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeReport {
    /// Fitted `C` in `p_t(x,y) ≈ C / V(x,√t) · exp(-c d²/t)`.
    pub c_amplitude: f64,
    /// Fitted `c`.
    pub c_exponent: f64,
    /// Largest residual in `log(p_t V)`, relative to the sampled log range.
    pub log_residual: f64,
    pub samples: usize,
    /// `c > 0` and residual at most 10%.
    pub fit_ok: bool,
}

/// Fits heat-kernel values `p_t = e^{-tL}(x, y)` for `x` in `centers`,
/// keeping entries above `1e-8 p_t(x, x)`.
pub fn check_ge(model: &SpectralModel, t_list: &[f64], centers: &[usize]) -> Result<GeReport> {
    let s = model.space();
    let mut pts = Vec::new();
    for &t in t_list {
        if !(t > 0.0) {
            return Err(Error::arg("t", "must be positive"));
        }
        let h = heat(model, t.sqrt())?;
        for &x in centers {
            let mut c = CoefficientVector::zeros(model.truncation_k());
            for (k, z) in c.0.iter_mut().enumerate() {
                *z = h.diag[k] * model.eigenfunction(k, x).conj();
            }
            let col = model.synthesis(&c)?;
            let v = s.ball_volume(x, t.sqrt())?;
            let diag = col[x].re;
            for i in 0..s.len() {
                let val = col[i].re;
                if val > 1e-8 * diag {
                    pts.push((s.distance(x, i).powi(2) / t, (val * v).ln()));
                }
            }
        }
    }
    let (a, b, _, _) = linear_regression(&pts).ok_or_else(|| Error::Data("too few heat-kernel samples".into()))?;
    let lo = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let resid = pts.iter().map(|p| (p.1 - (a * p.0 + b)).abs()).fold(0.0, f64::max) / (hi - lo).max(1e-300);
    Ok(GeReport {
        c_amplitude: b.exp(),
        c_exponent: -a,
        log_residual: resid,
        samples: pts.len(),
        fit_ok: -a > 0.0 && resid <= 0.1,
    })
}

/// `γ = n(κ-1)(1/p0 - 1/2) + κν`.
pub fn gamma_exponent(n: f64, kappa: f64, p0: f64, nu: f64) -> f64 {
    n * (kappa - 1.0) * (1.0 / p0 - 0.5) + kappa * nu
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativePowerReport {
    pub gamma: f64,
    pub p_prime: f64,
    /// `‖(1+L)^{-γ/2}‖_{p'→2}`
    pub bracket: NormBracket,
    /// `‖(1+L)^{-γ/2}‖_{2→2}`, exact.
    pub norm_2_2: f64,
}

/// Brackets `‖(1+L)^{-γ/2}‖_{p'→2}`, `p' >= 2`; this equals the `2 → p`
/// norm of the (self-adjoint) operator.
pub fn negative_power_norm(model: &SpectralModel, gamma: f64, p_prime: f64, opts: &AscentOptions) -> Result<NegativePowerReport> {
    if !(gamma >= 0.0) {
        return Err(Error::arg("gamma", format!("{gamma} must be >= 0")));
    }
    if !(p_prime >= 2.0) {
        return Err(Error::arg("p_prime", format!("{p_prime} must be >= 2")));
    }
    let diag = model
        .eigenvalues()
        .iter()
        .map(|&l| Complex64::new((1.0 + l).powf(-gamma / 2.0), 0.0))
        .collect();
    let h = OperatorHandle::from_diag(model, format!("(1+L)^(-{gamma}/2)"), diag)?;
    let norm_2_2 = h.diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bracket = opnorm_bracket(&h, p_prime, 2.0, opts)?.without_witness();
    Ok(NegativePowerReport { gamma, p_prime, bracket, norm_2_2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::probes::central_point;

    #[test]
    fn fs_torus_cone_and_zero_time() {
        let mut worst = Vec::new();
        for k in [128, 256] {
            let m = SpectralModel::torus(1, k, 5 * k / 2).unwrap();
            let h = m.space().distance(0, 1);
            let c = central_point(&m);
            let bumps = [FsBump { center: c, radius: 1.0 }];
            let rep = check_fs(&m, &[0.0, 0.2, std::f64::consts::FRAC_PI_4, 0.5, 1.0], &bumps, 4.0 * h).unwrap();
            assert!(rep.asserted);
            assert!(rep.entries[0].outside <= rep.leakage[0] + 1e-14);
            assert!(rep.max_outside <= 1e-6, "{rep:?}");
            worst.push(rep.max_outside);
        }
        assert!(worst[1] <= 0.5 * worst[0], "{worst:?}");
        let m = SpectralModel::hermite(1, 64, 16.0, 256).unwrap();
        let rep = check_fs(&m, &[0.5], &[FsBump { center: 128, radius: 1.0 }], 0.2).unwrap();
        assert!(!rep.asserted);
    }

    #[test]
    fn fs_compact_fourier_variant() {
        let m = SpectralModel::torus(1, 128, 320).unwrap();
        let h = m.space().distance(0, 1);
        let c = central_point(&m);
        let rep = check_fs_symbol(&m, 0.75, &[FsBump { center: c, radius: 1.0 }], 4.0 * h).unwrap();
        assert!(rep.max_outside <= 1e-6, "{rep:?}");
        // the symbol is the cosine transform of the bump: value at 0 is its integral
        let breaks: Vec<f64> = (0..=96).map(|i| -0.75 + i as f64 / 64.0).collect();
        let integral = composite_gauss(|u| mollifier(u / 1.5), &breaks, 16);
        assert!((compact_fourier_symbol_value(0.75, 0.0) - integral).abs() < 1e-12);
    }

    #[test]
    fn ev_stable_under_grid_doubling() {
        let mut sups = Vec::new();
        for (modes, grid) in [(16, 64), (32, 128)] {
            let m = SpectralModel::torus(1, modes, grid).unwrap();
            let h = m.space().distance(0, 1);
            let ts: Vec<f64> = (0..8).map(|i| h * 2f64.powi(i)).filter(|&t| t <= m.space().diameter()).collect();
            let rep = check_ev(&m, 1.0, &ts, &AscentOptions::default()).unwrap();
            assert!(rep.sup_lower.is_finite());
            sups.push(rep.sup_lower);
        }
        assert!((sups[1] / sups[0] - 1.0).abs() < 0.5, "{sups:?}");
        let m = SpectralModel::torus(1, 8, 32).unwrap();
        assert!(check_ev(&m, 2.0, &[0.5], &AscentOptions::default()).is_err());
    }

    #[test]
    fn g_condition_constant_is_finite() {
        let m = SpectralModel::torus(1, 16, 64).unwrap();
        let c = central_point(&m);
        let samples = [(c, 0.5, 0.25), (c, 1.0, 0.25), (c, 1.0, 1.0), (0, 2.0, 0.5)];
        let rep = check_g(&m, 1.0, &samples, &AscentOptions::default()).unwrap();
        assert!(rep.c_lower.is_finite() && rep.c_lower > 0.0);
        assert_eq!(rep.c_upper, Some(rep.c_lower));
        assert!(check_g(&m, 1.0, &[(c, 0.1, 0.5)], &AscentOptions::default()).is_err());
    }

    #[test]
    fn ge_fit_on_torus() {
        let m = SpectralModel::torus(1, 64, 160).unwrap();
        let ts = [0.01, 0.03, 0.1, 0.3, 1.0];
        let rep = check_ge(&m, &ts, &[central_point(&m)]).unwrap();
        assert!(rep.fit_ok, "{rep:?}");
        assert!(rep.c_exponent > 0.0);
    }

    #[test]
    fn negative_power_identity_and_hermite() {
        let m = SpectralModel::torus(1, 8, 32).unwrap();
        let r = negative_power_norm(&m, 0.0, 2.0, &AscentOptions::default()).unwrap();
        assert_eq!(r.norm_2_2, 1.0);
        assert!((r.bracket.lower - 1.0).abs() < 1e-12);
        assert!(negative_power_norm(&m, -1.0, 2.0, &AscentOptions::default()).is_err());
        let mut uppers = Vec::new();
        for (k, g) in [(16, 192), (32, 384)] {
            let h = SpectralModel::hermite(1, k, 14.0, g).unwrap();
            let r = negative_power_norm(&h, 1.0, 4.0, &AscentOptions::default()).unwrap();
            assert!(r.bracket.is_sound() && r.bracket.upper.unwrap().is_finite());
            uppers.push(r.bracket.lower);
        }
        assert!((uppers[1] / uppers[0] - 1.0).abs() < 0.25, "{uppers:?}");
        assert!((gamma_exponent(2.0, 2.0, 1.0, 0.0) - 1.0).abs() < 1e-15);
    }
}
