//! Scaling sweeps: restriction and cluster constants, the maximal threshold,
//! square-function decay in `δ` and the weighted square-function bound.

use super::bracket::{opnorm_p_2, AscentOptions, NormBracket};
use super::probes::{central_point, dirichlet_probe, random_sign_coefficients};
use crate::calculus::{br_maximal, default_r_grid, geometric_grid, square_tdelta, tdelta_l2_constant, OperatorHandle, TGrid};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::models::SpectralModel;
use crate::quadrature::composite_gauss;
use crate::stats::SlopeFit;
use crate::symbols::{br_symbol, bumps, cluster_seminorm, ArgumentKind, Symbol};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn fit_at_least_four(xs: &[f64], ys: &[f64], what: &str) -> Result<SlopeFit> {
    let fit = SlopeFit::from_points(xs, ys).ok_or_else(|| Error::Data(format!("{what}: no usable samples")))?;
    if fit.samples.len() < 4 {
        return Err(Error::Data(format!("{what}: {} usable samples, need 4", fit.samples.len())));
    }
    Ok(fit)
}

/// `‖F‖_{L²(0,1)}` on 64 Gauss panels.
fn l2_unit(f: &Symbol) -> f64 {
    let breaks: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
    composite_gauss(|x| f.eval(x).norm_sqr(), &breaks, 12).sqrt()
}

const MIN_RESOLVED: usize = 4;

/// Number of distinct `√λ_k` where `f` is nonzero.
fn resolved_values(model: &SpectralModel, f: &Symbol) -> usize {
    let mut v: Vec<f64> = model
        .eigenvalues()
        .iter()
        .map(|l| l.sqrt())
        .filter(|&x| f.eval(x).norm() > 0.0)
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    v.len()
}

/// Indicator of `[0,1]`, a wide bump and two narrow bumps, all on `[0,1]`.
pub fn restriction_probes() -> Vec<Symbol> {
    vec![
        Symbol::real("1[0,1]", ArgumentKind::OfSqrtL, Some((0.0, 1.0)), |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }),
        Symbol::real("bump-wide", ArgumentKind::OfSqrtL, Some((0.0, 1.0)), |x| bumps::mollifier(x - 0.5)),
        Symbol::real("bump-mid", ArgumentKind::OfSqrtL, Some((0.4375, 0.5625)), |x| {
            bumps::mollifier((x - 0.5) * 8.0)
        }),
        Symbol::real("bump-edge", ArgumentKind::OfSqrtL, Some((0.75, 1.0)), |x| {
            bumps::mollifier((x - 0.875) * 4.0)
        }),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleEntry {
    pub scale: f64,
    pub probe: String,
    pub bracket: NormBracket,
    /// Bracket lower bound divided by the probe normalization.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub p: f64,
    pub entries: Vec<ScaleEntry>,
    /// `(R, probe)` pairs whose dilate sees fewer than 4 distinct `√λ`.
    pub skipped: Vec<(f64, String)>,
    /// Sup over probes at each `R`.
    pub sup_by_scale: Vec<(f64, f64)>,
    pub fit: SlopeFit,
    /// `n (1/p - 1/2)`
    pub reference_exponent: f64,
}

/// Measures `sup_F ‖F(√L)‖_{p→2} / ‖δ_R F‖_2` over probes `G` on `[0,1]`
/// with `F = G(·/R)`, and fits the growth in `R`.
pub fn restriction_probe(
    model: &SpectralModel,
    p: f64,
    r_list: &[f64],
    probes: &[Symbol],
    opts: &AscentOptions,
) -> Result<RestrictionReport> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::arg("p", format!("{p} must lie in [1, 2)")));
    }
    if probes.is_empty() {
        return Err(Error::arg("probe_symbols", "probe set is empty"));
    }
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    let mut sup_by_scale = Vec::new();
    for &r in r_list {
        let mut best = None::<f64>;
        for g in probes {
            let f = g.dilate(1.0 / r);
            if resolved_values(model, &f) < MIN_RESOLVED {
                skipped.push((r, g.name().to_string()));
                continue;
            }
            let h = OperatorHandle::from_symbol(model, &f)?;
            let bracket = opnorm_p_2(&h, p, opts)?.without_witness();
            let normalized = bracket.lower / l2_unit(g);
            best = Some(best.map_or(normalized, |b| b.max(normalized)));
            entries.push(ScaleEntry { scale: r, probe: g.name().to_string(), bracket, normalized });
        }
        if let Some(b) = best {
            sup_by_scale.push((r, b));
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = sup_by_scale.iter().copied().unzip();
    let fit = fit_at_least_four(&xs, &ys, "restriction sweep")?;
    Ok(RestrictionReport {
        p,
        entries,
        skipped,
        sup_by_scale,
        fit,
        reference_exponent: model.space().dimension_n() * (1.0 / p - 0.5),
    })
}

/// Where a unit spectral window is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterWindow {
    /// `√λ_k ∈ [λ, λ+1)`
    SqrtL,
    /// `λ_k ∈ [λ, λ+1)`
    L,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub lambda: f64,
    pub modes: Vec<usize>,
    /// `‖E[λ,λ+1)‖_{p→p'}`
    pub bracket: NormBracket,
    /// `lower / (1+λ)^{reference}`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub p: f64,
    pub window: ClusterWindow,
    pub entries: Vec<ClusterEntry>,
    pub skipped: Vec<f64>,
    /// `n(1/p - 1/p') - 1`
    pub reference_exponent: f64,
    /// Growth of the measured norms in `1 + λ` (needs 4 clusters).
    pub fit: Option<SlopeFit>,
    /// Growth of the normalized ratios; consistency means "not growing".
    pub ratio_fit: Option<SlopeFit>,
    pub constant_spread: f64,
    pub consistent: bool,
}

/// Brackets `‖E[λ, λ+1)‖_{p→p'} = ‖E[λ, λ+1)‖²_{p→2}` across `lambda_list`.
pub fn cluster_constant(
    model: &SpectralModel,
    p: f64,
    lambda_list: &[f64],
    window: ClusterWindow,
    opts: &AscentOptions,
) -> Result<ClusterReport> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::arg("p", format!("{p} must lie in [1, 2)")));
    }
    let pp = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
    let reference_exponent = model.space().dimension_n() * (1.0 / p - 1.0 / pp) - 1.0;
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for &lam in lambda_list {
        let inside = |l: f64| match window {
            ClusterWindow::SqrtL => (lam..lam + 1.0).contains(&l.sqrt()),
            ClusterWindow::L => (lam..lam + 1.0).contains(&l),
        };
        let modes: Vec<usize> = (0..model.truncation_k()).filter(|&k| inside(model.eigenvalues()[k])).collect();
        if modes.is_empty() {
            skipped.push(lam);
            continue;
        }
        let mut diag = vec![Complex64::new(0.0, 0.0); model.truncation_k()];
        for &k in &modes {
            diag[k] = Complex64::new(1.0, 0.0);
        }
        let h = OperatorHandle::from_diag(model, format!("E[{lam},{})", lam + 1.0), diag)?;
        let bracket = opnorm_p_2(&h, p, opts)?.powi(2);
        let ratio = bracket.lower / (1.0 + lam).powf(reference_exponent);
        entries.push(ClusterEntry { lambda: lam, modes, bracket, ratio });
    }
    if entries.is_empty() {
        return Err(Error::Data("every requested cluster is empty".into()));
    }
    let xs: Vec<f64> = entries.iter().map(|e| 1.0 + e.lambda).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.bracket.lower).collect();
    let rs: Vec<f64> = entries.iter().map(|e| e.ratio).collect();
    let fit = fit_at_least_four(&xs, &ys, "cluster sweep").ok();
    let ratio_fit = fit_at_least_four(&xs, &rs, "cluster ratios").ok();
    let hi = rs.iter().copied().fold(0.0, f64::max);
    let lo = rs.iter().copied().fold(f64::INFINITY, f64::min);
    let consistent = ratio_fit.as_ref().is_none_or(|f| !f.is_growing());
    Ok(ClusterReport {
        p,
        window,
        entries,
        skipped,
        reference_exponent,
        fit,
        ratio_fit,
        constant_spread: hi / lo,
        consistent,
    })
}

/// Even probes on `[-1, 1]` for the cluster-norm condition.
pub fn sc_probes() -> Vec<Symbol> {
    vec![
        Symbol::indicator(-1.0, 1.0, ArgumentKind::OfSqrtL),
        Symbol::real("bump-wide", ArgumentKind::OfSqrtL, Some((-1.0, 1.0)), |x| bumps::mollifier(x / 2.0)),
        Symbol::real("bump-ring", ArgumentKind::OfSqrtL, Some((-0.875, 0.875)), |x| {
            bumps::mollifier((x.abs() - 0.75) * 4.0)
        }),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScReport {
    pub p: f64,
    pub q: f64,
    pub kappa: u32,
    pub entries: Vec<ScaleEntry>,
    pub sup_by_scale: Vec<(f64, f64)>,
    /// Growth of the sup ratio in `N`.
    pub fit: SlopeFit,
    /// The ratio sequence does not grow under the 3-stderr rule.
    pub bounded: bool,
}

/// Measures `sup_F ‖F(√L)‖_{p→2} / (N^{n(1/p-1/2)} ‖F(N·)‖_{N^κ, q})` with
/// `F = G(·/N)` for even probes `G` on `[-1, 1]`.
pub fn sc_kappa_probe(
    model: &SpectralModel,
    p: f64,
    q: f64,
    kappa: u32,
    n_list: &[usize],
    probes: &[Symbol],
    opts: &AscentOptions,
) -> Result<ScReport> {
    if kappa < 1 {
        return Err(Error::arg("kappa", "must be >= 1"));
    }
    if !(1.0..2.0).contains(&p) {
        return Err(Error::arg("p", format!("{p} must lie in [1, 2)")));
    }
    if probes.is_empty() {
        return Err(Error::arg("probe_symbols", "probe set is empty"));
    }
    let n_dim = model.space().dimension_n();
    let mut entries = Vec::new();
    let mut sup_by_scale = Vec::new();
    for &nn in n_list {
        let nf = nn as f64;
        let mut best = 0.0f64;
        for g in probes {
            let h = OperatorHandle::from_symbol(model, &g.dilate(1.0 / nf))?;
            let bracket = opnorm_p_2(&h, p, opts)?.without_witness();
            let denom = nf.powf(n_dim * (1.0 / p - 0.5)) * cluster_seminorm(g, nn.pow(kappa), q)?;
            let normalized = bracket.lower / denom;
            best = best.max(normalized);
            entries.push(ScaleEntry { scale: nf, probe: g.name().to_string(), bracket, normalized });
        }
        sup_by_scale.push((nf, best));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = sup_by_scale.iter().copied().unzip();
    let fit = fit_at_least_four(&xs, &ys, "cluster-condition sweep")?;
    let bounded = !fit.is_growing();
    Ok(ScReport { p, q, kappa, entries, sup_by_scale, fit, bounded })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalSweepEntry {
    pub alpha: f64,
    /// `(size, lower bound for ‖S_*^α‖_{p→p})`
    pub lower_bounds: Vec<(f64, f64)>,
    pub fit: SlopeFit,
    pub growing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalSweep {
    pub p: f64,
    /// `max{n |1/p - 1/2| - 1/2, 0}`
    pub alpha_p: f64,
    pub entries: Vec<MaximalSweepEntry>,
}

/// `α(p) = max{n|1/p - 1/2| - 1/2, 0}`.
pub fn critical_index(n: f64, p: f64) -> f64 {
    let ip = if p.is_infinite() { 0.0 } else { 1.0 / p };
    (n * (ip - 0.5).abs() - 0.5).max(0.0)
}

/// Adversarial probes for `S_*^α`: the band Dirichlet kernel, unimodular
/// fields aligned with the Riesz kernel at two scales, and seeded random
/// sign fields.
pub fn maximal_probes(model: &SpectralModel, alpha: f64, seed: u64) -> Result<Vec<Field>> {
    let x0 = central_point(model);
    let n = model.n_points();
    let top = model.eigenvalues().last().copied().unwrap_or(0.0).sqrt();
    let mut out = vec![dirichlet_probe(model, x0)];
    for r in [top, top / 2.0] {
        let sym = br_symbol(alpha, r.max(1e-12))?;
        let mut c = crate::field::CoefficientVector::zeros(model.truncation_k());
        for (k, z) in c.0.iter_mut().enumerate() {
            *z = sym.on_eigenvalue(model.eigenvalues()[k]) * model.eigenfunction(k, x0).conj();
        }
        // K(x, x0) as a function of x; (Tf)(x0) is largest for f = phase(conj K(x0, ·)) = phase(K(·, x0))
        let col = model.synthesis(&c)?;
        out.push(Field(col.values().iter().map(|z| if z.norm() > 0.0 { z / z.norm() } else { *z }).collect()));
    }
    out.push(random_sign_coefficients(model, seed));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    out.push(Field::from_fn(n, |_| Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0)));
    Ok(out)
}

/// For each `α`, fits measured lower bounds of `‖S_*^α‖_{p→p}` against model
/// size and classifies growth by the 3-stderr rule.
pub fn maximal_threshold_sweep(
    make_model: &(dyn Fn(usize) -> Result<SpectralModel> + Sync),
    p: f64,
    alpha_grid: &[f64],
    sizes: &[usize],
    seed: u64,
) -> Result<MaximalSweep> {
    if sizes.len() < 4 {
        return Err(Error::arg("sizes", "need at least 4 sizes"));
    }
    let models = sizes.iter().map(|&s| make_model(s)).collect::<Result<Vec<_>>>()?;
    let n = models[0].space().dimension_n();
    let tasks: Vec<(usize, usize)> = (0..alpha_grid.len()).flat_map(|a| (0..sizes.len()).map(move |s| (a, s))).collect();
    let values = tasks
        .par_iter()
        .map(|&(a, s)| {
            let m = &models[s];
            let grid = default_r_grid(m);
            let mut best = 0.0f64;
            for f in maximal_probes(m, alpha_grid[a], seed.wrapping_add(s as u64))? {
                let mx = br_maximal(m, alpha_grid[a], &grid, &f)?;
                best = best.max(m.space().lp_norm(&mx, p)? / m.space().lp_norm(&f, p)?);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut entries = Vec::new();
    for (a, &alpha) in alpha_grid.iter().enumerate() {
        let lower_bounds: Vec<(f64, f64)> =
            sizes.iter().enumerate().map(|(s, &size)| (size as f64, values[a * sizes.len() + s])).collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = lower_bounds.iter().copied().unzip();
        let fit = fit_at_least_four(&xs, &ys, "maximal sweep")?;
        let growing = fit.is_growing();
        entries.push(MaximalSweepEntry { alpha, lower_bounds, fit, growing });
    }
    Ok(MaximalSweep { p, alpha_p: critical_index(n, p), entries })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdeltaScaling {
    pub p: f64,
    /// `(δ, sup over probes of ‖T_δ f‖_p / ‖f‖_p)`
    pub measured: Vec<(f64, f64)>,
    /// `(∫ φ²(δ^{-1}(1-t²)) dt/t)^{1/2}` per `δ`.
    pub l2_constants: Vec<f64>,
    pub fit: SlopeFit,
    /// `1/2 + 1/q + n(1/2 - 1/p0)`
    pub reference_exponent: f64,
    /// `measured / δ^{reference}` against `1/δ`.
    pub ratio_fit: SlopeFit,
    pub consistent: bool,
}

/// Fits `‖T_δ‖_{p→p}` lower bounds against `δ`.
#[allow(clippy::too_many_arguments)]
pub fn tdelta_scaling(
    model: &SpectralModel,
    p: f64,
    q_param: f64,
    p0: f64,
    delta_list: &[f64],
    probes: &[Field],
    phi: &Symbol,
    density: f64,
) -> Result<TdeltaScaling> {
    if delta_list.len() < 5 {
        return Err(Error::arg("delta_list", "need at least 5 values"));
    }
    if probes.is_empty() {
        return Err(Error::arg("probes", "probe set is empty"));
    }
    let mut measured = Vec::new();
    let mut l2_constants = Vec::new();
    for &delta in delta_list {
        let grid = TGrid::for_model(model, delta, density);
        let mut best = 0.0f64;
        for f in probes {
            let t = square_tdelta(model, delta, phi, f, &grid)?;
            best = best.max(model.space().lp_norm(&t, p)? / model.space().lp_norm(f, p)?);
        }
        measured.push((delta, best));
        l2_constants.push(tdelta_l2_constant(delta, phi)?);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = measured.iter().copied().unzip();
    let fit = fit_at_least_four(&xs, &ys, "T_delta sweep")?;
    let reference_exponent = 0.5 + 1.0 / q_param + model.space().dimension_n() * (0.5 - 1.0 / p0);
    let inv: Vec<f64> = xs.iter().map(|d| 1.0 / d).collect();
    let ratios: Vec<f64> = measured.iter().map(|(d, v)| v / d.powf(reference_exponent)).collect();
    let ratio_fit = fit_at_least_four(&inv, &ratios, "T_delta ratios")?;
    let consistent = !ratio_fit.is_growing();
    Ok(TdeltaScaling { p, measured, l2_constants, fit, reference_exponent, ratio_fit, consistent })
}

/// Versioned weight probes: constant, two point masses, a Gaussian bump and
/// a seeded random nonnegative field.
pub fn weight_family(model: &SpectralModel, seed: u64) -> Vec<(String, Vec<f64>)> {
    let n = model.n_points();
    let x0 = central_point(model);
    let mut out = vec![("constant".to_string(), vec![1.0; n])];
    for (tag, i) in [("center", x0), ("offset", n / 5)] {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        out.push((format!("point-{tag}"), w));
    }
    let g = super::probes::gaussian_bump(model, x0, model.space().diameter() / 16.0);
    out.push(("gauss".into(), g.values().iter().map(|z| z.re).collect()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.push(("random".into(), (0..n).map(|_| rng.gen_range(0.0..1.0)).collect()));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    pub delta: f64,
    pub field: usize,
    pub weight: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSquareReport {
    pub r0: f64,
    pub exponent: f64,
    pub samples: Vec<WeightedSample>,
    /// Best-fit `C(δ)`: the largest `lhs / rhs` at each `δ`.
    pub constants: Vec<(f64, f64)>,
    /// `C(δ) δ^{-exponent}`
    pub normalized: Vec<(f64, f64)>,
    /// `max / min` of the normalized constants.
    pub spread: f64,
    /// Triples with `lhs > C(δ) rhs`.
    pub violations: usize,
    /// `max |lhs/rhs - c(δ)²| / c(δ)²` over the constant weight.
    pub unit_weight_mismatch: f64,
}

/// Both sides of `∫ |T_δ f|² w ≤ C(δ) ∫ |f|² M_{r0} w` over `(f, w, δ)`,
/// `1/r0 = 2/p0 - 1`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_square(
    model: &SpectralModel,
    delta_list: &[f64],
    p0: f64,
    q_param: f64,
    fields: &[Field],
    weights: &[(String, Vec<f64>)],
    phi: &Symbol,
    density: f64,
) -> Result<WeightedSquareReport> {
    if !(1.0..2.0).contains(&p0) {
        return Err(Error::arg("p0", format!("{p0} must lie in [1, 2)")));
    }
    let r0 = 1.0 / (2.0 / p0 - 1.0);
    let s = model.space();
    let h = s.distance(0, 1);
    let radii = geometric_grid(0.5 * h, s.diameter(), 2f64.sqrt());
    let mut maximal = Vec::new();
    for (name, w) in weights {
        if w.len() != s.len() {
            return Err(Error::arg("w", format!("weight {name} has the wrong length")));
        }
        if w.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::arg("w", format!("weight {name} is not nonnegative")));
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(Error::Data(format!("weight {name} vanishes everywhere")));
        }
        maximal.push(s.maximal_function(&Field::from_real(w), r0, &radii)?);
    }
    let n = s.dimension_n();
    let exponent = 1.0 + 2.0 / q_param + n * (1.0 - 2.0 / p0);
    let mu = s.weights();
    let mut samples = Vec::new();
    let mut constants = Vec::new();
    let mut unit_weight_mismatch = 0.0f64;
    for &delta in delta_list {
        let grid = TGrid::for_model(model, delta, density);
        let c2 = tdelta_l2_constant(delta, phi)?.powi(2);
        let mut best = 0.0f64;
        for (fi, f) in fields.iter().enumerate() {
            let t = square_tdelta(model, delta, phi, f, &grid)?;
            for ((name, w), mw) in weights.iter().zip(&maximal) {
                let lhs: f64 = (0..s.len()).map(|i| t[i].norm_sqr() * w[i] * mu[i]).sum();
                let rhs: f64 = (0..s.len()).map(|i| f[i].norm_sqr() * mw[i] * mu[i]).sum();
                if rhs > 0.0 {
                    best = best.max(lhs / rhs);
                }
                if name == "constant" {
                    unit_weight_mismatch = unit_weight_mismatch.max((lhs / rhs - c2).abs() / c2);
                }
                samples.push(WeightedSample { delta, field: fi, weight: name.clone(), lhs, rhs });
            }
        }
        constants.push((delta, best));
    }
    let violations = samples
        .iter()
        .filter(|smp| {
            let c = constants.iter().find(|(d, _)| *d == smp.delta).map(|x| x.1).unwrap_or(0.0);
            smp.lhs > c * smp.rhs * (1.0 + 1e-12)
        })
        .count();
    let normalized: Vec<(f64, f64)> = constants.iter().map(|(d, c)| (*d, c * d.powf(-exponent))).collect();
    let hi = normalized.iter().map(|x| x.1).fold(0.0, f64::max);
    let lo = normalized.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    Ok(WeightedSquareReport {
        r0,
        exponent,
        samples,
        constants,
        normalized,
        spread: hi / lo,
        violations,
        unit_weight_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_slope_torus_p1() {
        let m = SpectralModel::torus(1, 100, 208).unwrap();
        let rs = [4.0, 8.0, 16.0, 32.0, 64.0];
        let rep = restriction_probe(&m, 1.0, &rs, &restriction_probes(), &AscentOptions::default()).unwrap();
        assert!((rep.fit.exponent - 0.5).abs() <= 0.1, "{:?}", rep.fit);
        assert_eq!(rep.reference_exponent, 0.5);
        assert!(restriction_probe(&m, 2.0, &rs, &restriction_probes(), &AscentOptions::default()).is_err());
        assert!(restriction_probe(&m, 1.0, &rs, &[], &AscentOptions::default()).is_err());
    }

    #[test]
    fn hermite_clusters_are_single_functions() {
        let m = SpectralModel::hermite(1, 48, 16.0, 512).unwrap();
        let lams: Vec<f64> = (0..=40).map(|k| (2 * k + 1) as f64).collect();
        let rep = cluster_constant(&m, 1.0, &lams, ClusterWindow::L, &AscentOptions::default()).unwrap();
        assert!(rep.skipped.is_empty());
        for (e, k) in rep.entries.iter().zip(0..) {
            assert_eq!(e.modes, vec![k]);
            let want = m.mode(k).iter().map(|z| z.norm()).fold(0.0, f64::max).powi(2);
            assert!((e.bracket.lower - want).abs() <= 1e-8 * want.max(1.0));
        }
        let rep = cluster_constant(&m, 1.0, &[2.0, 4.0], ClusterWindow::L, &AscentOptions::default()).unwrap_err();
        assert!(matches!(rep, Error::Data(_)));
    }

    #[test]
    fn torus_clusters_bounded() {
        let m = SpectralModel::torus(1, 70, 160).unwrap();
        let lams: Vec<f64> = (1..=64).map(|l| l as f64).collect();
        let rep = cluster_constant(&m, 1.0, &lams, ClusterWindow::SqrtL, &AscentOptions::default()).unwrap();
        assert_eq!(rep.reference_exponent, 0.0);
        assert!(rep.consistent, "{:?}", rep.ratio_fit);
        let two_modes = 2.0 / (2.0 * std::f64::consts::PI);
        assert!(rep.entries.iter().all(|e| (e.bracket.lower - two_modes).abs() < 1e-10));
    }

    #[test]
    fn sc_probe_hermite_kappa_two() {
        let m = SpectralModel::hermite(1, 520, 37.0, 1280).unwrap();
        let rep = sc_kappa_probe(&m, 1.0, 2.0, 2, &[4, 8, 16, 32], &sc_probes(), &AscentOptions::default()).unwrap();
        assert!(rep.sup_by_scale.iter().all(|x| x.1.is_finite() && x.1 > 0.0));
    }

    #[test]
    fn critical_index_values() {
        assert_eq!(critical_index(1.0, f64::INFINITY), 0.0);
        assert_eq!(critical_index(3.0, 1.0), 1.0);
        assert_eq!(critical_index(2.0, 2.0), 0.0);
    }

    #[test]
    fn tdelta_scaling_l2_slope() {
        let m = SpectralModel::torus(1, 24, 64).unwrap();
        let probes: Vec<Field> = (0..3).map(|s| m.random_band_limited(s, true)).collect();
        let deltas = [0.25, 0.125, 0.0625, 0.03125, 0.015625];
        let rep = tdelta_scaling(&m, 2.0, 2.0, 1.0, &deltas, &probes, &bumps::mollifier_symbol(), 64.0).unwrap();
        assert!((rep.fit.exponent - 0.5).abs() <= 0.02, "{:?}", rep.fit);
        for ((_, v), c) in rep.measured.iter().zip(&rep.l2_constants) {
            assert!((v - c).abs() < 1e-6);
        }
        assert!(tdelta_scaling(&m, 2.0, 2.0, 1.0, &deltas[..3], &probes, &bumps::mollifier_symbol(), 64.0).is_err());
    }

    #[test]
    fn weighted_square_reduction() {
        let m = SpectralModel::torus(1, 16, 48).unwrap();
        let fields: Vec<Field> = (0..3).map(|s| m.random_band_limited(s, true)).collect();
        let w = weight_family(&m, 1);
        let rep = weighted_square(&m, &[1.0, 0.5, 0.25], 1.0, 2.0, &fields, &w, &bumps::mollifier_symbol(), 64.0).unwrap();
        assert_eq!(rep.r0, 1.0);
        assert!(rep.unit_weight_mismatch < 1e-6, "{}", rep.unit_weight_mismatch);
        assert_eq!(rep.violations, 0);
        assert!(rep.samples.iter().all(|s| s.lhs.is_finite() && s.rhs.is_finite()));
        let zero = vec![("zero".to_string(), vec![0.0; m.n_points()])];
        assert!(matches!(
            weighted_square(&m, &[0.5], 1.0, 2.0, &fields, &zero, &bumps::mollifier_symbol(), 64.0),
            Err(Error::Data(_))
        ));
    }
}
