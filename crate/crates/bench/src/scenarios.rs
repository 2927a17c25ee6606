//! Scenario parameters, defaults and task plans.

use crate::error::Result;
use crate::record::{BracketRecord, Check, CheckKind, FitRecord, TaskRecord};
use brlab::calculus::{
    default_r_grid, heat, square_tdelta, subordination_bound_check, tdelta_l2_constant, TGrid,
};
use brlab::estimators::probes::central_point;
use brlab::estimators::{
    check_ev, check_fs, check_fs_symbol, check_g, check_ge, cluster_constant, maximal_threshold_sweep,
    restriction_probe, restriction_probes, sc_kappa_probe, sc_probes, tdelta_scaling, weight_family,
    weighted_square, AscentOptions, ClusterWindow, FsBump,
};
use brlab::symbols::{
    br_symbol, bumps, dyadic_decompose, eta_lambda_family, mellin, partition_defect, phi_delta_family, psi_family,
    subordination_check, zeta_family, MellinConvergence, PhiDeltaSpec,
};
use brlab::{ArgumentKind, Field, ModelSpec, SlopeFit, SpectralModel, Symbol};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Names and one-line descriptions of every scenario.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("verify-identities", "exact identities: subordination, dyadic and frequency pieces, partitions, L2 law, nets"),
    ("fs-check", "wave propagation stays inside the light cone"),
    ("ev-g-ge-check", "weighted heat bounds and Gaussian heat-kernel fit"),
    ("restriction-sweep", "p->2 norms of dilated spectral windows against R"),
    ("cluster-sweep", "unit spectral-cluster norms against lambda"),
    ("sc-sweep", "cluster-norm condition ratios against N"),
    ("tdelta-sweep", "square-function norms against delta"),
    ("maximal-threshold", "Bochner-Riesz maximal lower bounds across model sizes"),
    ("weighted-square", "weighted square-function inequality with maximal weights"),
];

type FieldError = (String, String);

fn bad(field: &str, msg: impl Into<String>) -> FieldError {
    (format!("parameters.{field}"), msg.into())
}

fn sub_two(field: &str, p: f64) -> std::result::Result<(), FieldError> {
    if (1.0..2.0).contains(&p) {
        Ok(())
    } else {
        Err(bad(field, format!("{p} must lie in [1, 2)")))
    }
}

fn at_least_one(field: &str, p: f64) -> std::result::Result<(), FieldError> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(bad(field, format!("{p} must be >= 1")))
    }
}

fn positive_list(field: &str, v: &[f64], min_len: usize) -> std::result::Result<(), FieldError> {
    if v.len() < min_len {
        return Err(bad(field, format!("need at least {min_len} values")));
    }
    if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(bad(field, "values must be positive and finite"));
    }
    Ok(())
}

fn deltas(field: &str, v: &[f64], min_len: usize) -> std::result::Result<(), FieldError> {
    positive_list(field, v, min_len)?;
    if v.iter().any(|d| *d > 1.0) {
        return Err(bad(field, "delta values must lie in (0, 1]"));
    }
    Ok(())
}

fn dyadic_deltas(count: i32) -> Vec<f64> {
    (2..2 + count).map(|k| 2f64.powi(-k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityParams {
    pub rho_values: Vec<f64>,
    /// `α - ρ` offsets; each must exceed 1/2.
    pub alpha_gaps: Vec<f64>,
    pub r_values: Vec<f64>,
    pub m_points: usize,
    pub tol_subordination: f64,
    pub dyadic_rho: Vec<f64>,
    pub k_max: usize,
    pub tol_dyadic: f64,
    pub phi_deltas: Vec<f64>,
    pub tol_phi: f64,
    pub max_decay_slope: f64,
    pub partition_probes: usize,
    pub tol_partition: f64,
    pub tdelta_deltas: Vec<f64>,
    pub tdelta_fields: usize,
    pub tdelta_density: f64,
    pub tol_l2_law: f64,
    pub tol_l2_slope: f64,
    pub tol_mellin: f64,
    pub tol_kernel: f64,
    pub tol_bound: f64,
}

impl Default for IdentityParams {
    fn default() -> Self {
        IdentityParams {
            rho_values: vec![-0.25, 0.0, 0.5, 1.0, 2.0],
            alpha_gaps: vec![0.6, 0.75, 1.0, 1.5, 2.5],
            r_values: vec![1.0, 2.0],
            m_points: 9,
            tol_subordination: 1e-8,
            dyadic_rho: vec![0.5, 1.0, 2.0],
            k_max: 20,
            tol_dyadic: 1e-5,
            phi_deltas: vec![0.25, 0.125, 0.0625],
            tol_phi: 1e-6,
            max_decay_slope: -4.0,
            partition_probes: 1000,
            tol_partition: 1e-12,
            tdelta_deltas: dyadic_deltas(5),
            tdelta_fields: 20,
            tdelta_density: 64.0,
            tol_l2_law: 1e-6,
            tol_l2_slope: 0.02,
            tol_mellin: 1e-6,
            tol_kernel: 1e-10,
            tol_bound: 1e-6,
        }
    }
}

impl IdentityParams {
    fn validate(&self) -> std::result::Result<(), FieldError> {
        if self.rho_values.iter().any(|r| !(*r > -0.5)) {
            return Err(bad("rho_values", "each rho must exceed -1/2"));
        }
        if self.alpha_gaps.iter().any(|g| !(*g > 0.5)) {
            return Err(bad("alpha_gaps", "each alpha - rho must exceed 1/2"));
        }
        positive_list("r_values", &self.r_values, 1)?;
        if self.m_points < 2 {
            return Err(bad("m_points", "need at least 2"));
        }
        positive_list("dyadic_rho", &self.dyadic_rho, 1)?;
        deltas("phi_deltas", &self.phi_deltas, 1)?;
        deltas("tdelta_deltas", &self.tdelta_deltas, 2)?;
        if self.tdelta_fields == 0 {
            return Err(bad("tdelta_fields", "need at least one field"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FsParams {
    pub t_list: Vec<f64>,
    pub radius: f64,
    /// Grid index of the bump center; the central point when absent.
    pub center: Option<usize>,
    /// Guard band in grid spacings.
    pub guard_cells: f64,
    pub threshold: f64,
    /// Also run the model with twice the modes and require the worst mass to halve.
    pub refine: bool,
    /// Radius of the compact-Fourier-support variant; skipped when absent.
    pub compact_fourier_r: Option<f64>,
}

impl Default for FsParams {
    fn default() -> Self {
        FsParams {
            t_list: vec![0.2, 0.5, 1.0],
            radius: 1.0,
            center: None,
            guard_cells: 4.0,
            threshold: 1e-6,
            refine: true,
            compact_fourier_r: Some(0.75),
        }
    }
}

impl FsParams {
    fn validate(&self) -> std::result::Result<(), FieldError> {
        if self.t_list.iter().any(|t| !(*t >= 0.0)) {
            return Err(bad("t_list", "times must be >= 0"));
        }
        if !(self.radius > 0.0) {
            return Err(bad("radius", "must be positive"));
        }
        if !(self.guard_cells >= 0.0) {
            return Err(bad("guard_cells", "must be >= 0"));
        }
        if let Some(r) = self.compact_fourier_r {
            if !(r > 0.0) {
                return Err(bad("compact_fourier_r", "must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvParams {
    pub p: f64,
    /// Number of geometric `t` values between the grid spacing and the diameter.
    pub t_count: usize,
    /// `(s, t)` pairs with `s >= t > 0`, taken at the central point.
    pub g_pairs: Vec<(f64, f64)>,
    pub ge_t_list: Vec<f64>,
}

impl Default for EvParams {
    fn default() -> Self {
        EvParams {
            p: 1.0,
            t_count: 8,
            g_pairs: vec![(0.25, 0.25), (1.0, 0.25), (1.0, 0.5), (2.0, 1.0)],
            ge_t_list: vec![0.05, 0.1, 0.2, 0.4],
        }
    }
}

impl EvParams {
    fn validate(&self) -> std::result::Result<(), FieldError> {
        sub_two("p", self.p)?;
        if self.t_count < 2 {
            return Err(bad("t_count", "need at least 2"));
        }
        if self.g_pairs.iter().any(|(s, t)| !(*t > 0.0 && s >= t)) {
            return Err(bad("g_pairs", "need s >= t > 0"));
        }
        positive_list("ge_t_list", &self.ge_t_list, 2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RestrictionParams {
    pub p: f64,
    pub r_list: Vec<f64>,
    pub slope_tol: f64,
}

impl Default for RestrictionParams {
    fn default() -> Self {
        RestrictionParams { p: 1.0, r_list: vec![4.0, 8.0, 16.0, 32.0, 64.0], slope_tol: 0.1 }
    }
}

impl RestrictionParams {
    fn validate(&self) -> std::result::Result<(), FieldError> {
        sub_two("p", self.p)?;
        positive_list("r_list", &self.r_list, 4)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterParams {
    pub p: f64,
    pub lambda_list: Vec<f64>,
    pub window: ClusterWindow,
    /// Compare single-eigenfunction clusters with `sup |e_k|²`.
    pub closed_form: bool,
    pub closed_form_tol: f64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            p: 1.0,
            lambda_list: (1..=64).map(f64::from).collect(),
            window: ClusterWindow::SqrtL,
            closed_form: false,
            closed_form_tol: 1e-8,
        }
    }
}

impl ClusterParams {
    fn validate(&self) -> std::result::Result<(), FieldError> {
        sub_two("p", self.p)?;
        if self.lambda_list.is_empty() || self.lambda_list.iter().any(|l| !(*l >= 0.0)) {
            return Err(bad("lambda_list", "need nonnegative values"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScParams {
    pub p: f64,
    pub q: f64,
    pub kappa: u32,
    pub n_list: Vec<usize>,
}

impl Default for ScParams {
    fn default() -> Self {
        ScParams { p: 1.0, q: 2.0, kappa: 2, n_list: vec![4, 8, 16, 32] }
    }
}

impl ScParams {
    fn validate(&self) -> std::result::Result<(), FieldError> {
        sub_two("p", self.p)?;
        at_least_one("q", self.q)?;
        if self.kappa < 1 {
            return Err(bad("kappa", "must be >= 1"));
        }
        if self.n_list.len() < 4 || self.n_list.contains(&0) {
            return Err(bad("n_list", "need at least 4 positive values"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TdeltaParams {
    pub p: f64,
    pub q: f64,
    pub p0: f64,
    pub delta_list: Vec<f64>,
    pub n_probes: usize,
    pub density: f64,
    pub l2_tol: f64,
    pub slope_tol: f64,
}

impl Default for TdeltaParams {
    fn default() -> Self {
        TdeltaParams {
            p: 2.0,
            q: 2.0,
            p0: 1.0,
            delta_list: dyadic_deltas(5),
            n_probes: 4,
            density: 64.0,
            l2_tol: 1e-6,
            slope_tol: 0.02,
        }
    }
}

impl TdeltaParams {
    fn validate(&self) -> std::result::Result<(), FieldError> {
        at_least_one("p", self.p)?;
        at_least_one("q", self.q)?;
        sub_two("p0", self.p0)?;
        deltas("delta_list", &self.delta_list, 5)?;
        if self.n_probes == 0 {
            return Err(bad("n_probes", "need at least one probe"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaximalParams {
    pub p: f64,
    pub alpha_grid: Vec<f64>,
    /// Mode counts; the model's grid is scaled along.
    pub sizes: Vec<usize>,
    /// Expected classification per `α` (`true` = growing).
    pub expect_growing: Option<Vec<bool>>,
}

impl Default for MaximalParams {
    fn default() -> Self {
        MaximalParams {
            p: 64.0,
            alpha_grid: vec![0.1, 0.8],
            sizes: vec![64, 128, 256, 512],
            expect_growing: Some(vec![true, false]),
        }
    }
}

impl MaximalParams {
    fn validate(&self) -> std::result::Result<(), FieldError> {
        at_least_one("p", self.p)?;
        if self.alpha_grid.is_empty() || self.alpha_grid.iter().any(|a| !(*a >= 0.0)) {
            return Err(bad("alpha_grid", "need nonnegative orders"));
        }
        if self.sizes.len() < 4 || self.sizes.contains(&0) {
            return Err(bad("sizes", "need at least 4 positive sizes"));
        }
        if let Some(e) = &self.expect_growing {
            if e.len() != self.alpha_grid.len() {
                return Err(bad("expect_growing", "one entry per alpha"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightedParams {
    pub delta_list: Vec<f64>,
    pub p0: f64,
    pub q: f64,
    pub n_fields: usize,
    pub density: f64,
    pub unit_tol: f64,
    /// Largest acceptable `max/min` of the normalized constants.
    pub spread_max: f64,
}

impl Default for WeightedParams {
    fn default() -> Self {
        WeightedParams {
            delta_list: vec![1.0, 0.5, 0.25, 0.125],
            p0: 1.0,
            q: 2.0,
            n_fields: 3,
            density: 64.0,
            unit_tol: 1e-6,
            spread_max: 2.0,
        }
    }
}

impl WeightedParams {
    fn validate(&self) -> std::result::Result<(), FieldError> {
        deltas("delta_list", &self.delta_list, 1)?;
        sub_two("p0", self.p0)?;
        at_least_one("q", self.q)?;
        if self.n_fields == 0 {
            return Err(bad("n_fields", "need at least one field"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", content = "parameters", rename_all = "kebab-case")]
pub enum ScenarioParams {
    VerifyIdentities(IdentityParams),
    FsCheck(FsParams),
    EvGGeCheck(EvParams),
    RestrictionSweep(RestrictionParams),
    ClusterSweep(ClusterParams),
    ScSweep(ScParams),
    TdeltaSweep(TdeltaParams),
    MaximalThreshold(MaximalParams),
    WeightedSquare(WeightedParams),
}

fn typed<P: DeserializeOwned>(table: toml::Table) -> std::result::Result<P, FieldError> {
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ("parameters".to_string(), e.message().to_string()))
}

impl ScenarioParams {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioParams::VerifyIdentities(_) => "verify-identities",
            ScenarioParams::FsCheck(_) => "fs-check",
            ScenarioParams::EvGGeCheck(_) => "ev-g-ge-check",
            ScenarioParams::RestrictionSweep(_) => "restriction-sweep",
            ScenarioParams::ClusterSweep(_) => "cluster-sweep",
            ScenarioParams::ScSweep(_) => "sc-sweep",
            ScenarioParams::TdeltaSweep(_) => "tdelta-sweep",
            ScenarioParams::MaximalThreshold(_) => "maximal-threshold",
            ScenarioParams::WeightedSquare(_) => "weighted-square",
        }
    }

    /// Typed, validated parameters; errors name the offending field.
    pub fn from_table(scenario: &str, table: toml::Table) -> std::result::Result<Self, FieldError> {
        let params = match scenario {
            "verify-identities" => ScenarioParams::VerifyIdentities(typed(table)?),
            "fs-check" => ScenarioParams::FsCheck(typed(table)?),
            "ev-g-ge-check" => ScenarioParams::EvGGeCheck(typed(table)?),
            "restriction-sweep" => ScenarioParams::RestrictionSweep(typed(table)?),
            "cluster-sweep" => ScenarioParams::ClusterSweep(typed(table)?),
            "sc-sweep" => ScenarioParams::ScSweep(typed(table)?),
            "tdelta-sweep" => ScenarioParams::TdeltaSweep(typed(table)?),
            "maximal-threshold" => ScenarioParams::MaximalThreshold(typed(table)?),
            "weighted-square" => ScenarioParams::WeightedSquare(typed(table)?),
            other => {
                let known: Vec<&str> = SCENARIOS.iter().map(|s| s.0).collect();
                return Err(("scenario".into(), format!("unknown scenario `{other}`; expected one of {}", known.join(", "))));
            }
        };
        params.validate()?;
        Ok(params)
    }

    pub fn default_for(scenario: &str) -> Option<(ScenarioParams, ModelSpec)> {
        let torus = |modes, grid| ModelSpec::Torus1d { modes, grid };
        Some(match scenario {
            "verify-identities" => (ScenarioParams::VerifyIdentities(Default::default()), torus(24, 64)),
            "fs-check" => (ScenarioParams::FsCheck(Default::default()), torus(128, 320)),
            "ev-g-ge-check" => (ScenarioParams::EvGGeCheck(Default::default()), torus(32, 96)),
            "restriction-sweep" => (ScenarioParams::RestrictionSweep(Default::default()), torus(100, 208)),
            "cluster-sweep" => (ScenarioParams::ClusterSweep(Default::default()), torus(70, 160)),
            "sc-sweep" => (
                ScenarioParams::ScSweep(Default::default()),
                ModelSpec::Hermite1d { modes: 520, halfwidth: 37.0, grid: 1280 },
            ),
            "tdelta-sweep" => (ScenarioParams::TdeltaSweep(Default::default()), torus(24, 64)),
            "maximal-threshold" => (ScenarioParams::MaximalThreshold(Default::default()), torus(64, 130)),
            "weighted-square" => (ScenarioParams::WeightedSquare(Default::default()), torus(16, 48)),
            _ => return None,
        })
    }

    fn validate(&self) -> std::result::Result<(), FieldError> {
        match self {
            ScenarioParams::VerifyIdentities(p) => p.validate(),
            ScenarioParams::FsCheck(p) => p.validate(),
            ScenarioParams::EvGGeCheck(p) => p.validate(),
            ScenarioParams::RestrictionSweep(p) => p.validate(),
            ScenarioParams::ClusterSweep(p) => p.validate(),
            ScenarioParams::ScSweep(p) => p.validate(),
            ScenarioParams::TdeltaSweep(p) => p.validate(),
            ScenarioParams::MaximalThreshold(p) => p.validate(),
            ScenarioParams::WeightedSquare(p) => p.validate(),
        }
    }

    /// Cross-checks that need the model description.
    pub fn validate_model(&self, model: &ModelSpec) -> std::result::Result<(), FieldError> {
        if let ScenarioParams::MaximalThreshold(_) = self {
            if !matches!(model, ModelSpec::Torus1d { .. } | ModelSpec::IntervalDirichlet { .. }) {
                return Err(("model.kind".into(), "maximal-threshold runs on torus-1d or interval-dirichlet".into()));
            }
        }
        if let ScenarioParams::FsCheck(p) = self {
            if let Some(c) = p.center {
                if c >= model.point_count() {
                    return Err(bad("center", format!("{c} is not a grid index (model has {} points)", model.point_count())));
                }
            }
        }
        Ok(())
    }

    /// Dense kernel entries the scenario forms regardless of estimator fallbacks.
    pub fn required_kernel_entries(&self, model: &ModelSpec) -> usize {
        match self {
            ScenarioParams::VerifyIdentities(_) => model.point_count().pow(2),
            _ => 0,
        }
    }
}

/// Shared inputs of every task in one experiment.
pub struct Ctx<'a> {
    pub spec: &'a ModelSpec,
    pub model: &'a SpectralModel,
    pub max_kernel_entries: usize,
}

impl Ctx<'_> {
    fn opts(&self, seed: u64) -> AscentOptions {
        AscentOptions { seed, max_kernel_entries: self.max_kernel_entries, ..AscentOptions::default() }
    }
}

pub type TaskFn<'a> = Box<dyn Fn(&Ctx, u64) -> Result<TaskRecord> + Send + Sync + 'a>;

pub struct Task<'a> {
    pub name: String,
    pub run: TaskFn<'a>,
}

fn task<'a>(name: impl Into<String>, run: impl Fn(&Ctx, u64) -> Result<TaskRecord> + Send + Sync + 'a) -> Task<'a> {
    Task { name: name.into(), run: Box::new(run) }
}

/// Scales a one-dimensional model to `modes` and keeps the grid ratio.
pub fn with_modes(spec: &ModelSpec, modes: usize) -> ModelSpec {
    match *spec {
        ModelSpec::Torus1d { modes: m, grid } => {
            ModelSpec::Torus1d { modes, grid: (grid * modes).div_ceil(m).max(2 * modes + 1) }
        }
        ModelSpec::IntervalDirichlet { modes: m, grid } => {
            ModelSpec::IntervalDirichlet { modes, grid: (grid * modes).div_ceil(m).max(modes) }
        }
        ref other => other.clone(),
    }
}

impl ScenarioParams {
    pub fn plan(&self) -> Vec<Task<'_>> {
        match self {
            ScenarioParams::VerifyIdentities(p) => identity_tasks(p),
            ScenarioParams::FsCheck(p) => fs_tasks(p),
            ScenarioParams::EvGGeCheck(p) => ev_tasks(p),
            ScenarioParams::RestrictionSweep(p) => vec![task("restriction", move |c, s| restriction_task(p, c, s))],
            ScenarioParams::ClusterSweep(p) => vec![task("clusters", move |c, s| cluster_task(p, c, s))],
            ScenarioParams::ScSweep(p) => vec![task("sc-ratio", move |c, s| sc_task(p, c, s))],
            ScenarioParams::TdeltaSweep(p) => vec![task("tdelta", move |c, s| tdelta_task(p, c, s))],
            ScenarioParams::MaximalThreshold(p) => vec![task("maximal", move |c, s| maximal_task(p, c, s))],
            ScenarioParams::WeightedSquare(p) => vec![task("weighted", move |c, s| weighted_task(p, c, s))],
        }
    }
}

fn identity_tasks(p: &IdentityParams) -> Vec<Task<'_>> {
    use CheckKind::Identity;
    vec![
        task("subordination-identity", move |_, seed| {
            let mut rec = TaskRecord::new("subordination-identity", seed);
            let mut worst = 0.0f64;
            for &rho in &p.rho_values {
                for &gap in &p.alpha_gaps {
                    for &r in &p.r_values {
                        let m: Vec<f64> =
                            (0..p.m_points).map(|i| r * i as f64 / (p.m_points - 1) as f64).collect();
                        worst = worst.max(subordination_check(rho + gap, rho, r, &m)?);
                    }
                }
            }
            rec.check(Check::at_most("max-residual", Identity, worst, p.tol_subordination));
            Ok(rec)
        }),
        task("dyadic-reconstruction", move |_, seed| {
            let mut rec = TaskRecord::new("dyadic-reconstruction", seed);
            let top = 1.0 - 2f64.powi(-18);
            for &rho in &p.dyadic_rho {
                let d = dyadic_decompose(rho, &bumps::dyadic_symbol(), p.k_max)?;
                let err = d.max_residual(top, 4000);
                rec.check(Check::at_most(&format!("rho={rho}"), Identity, err, p.tol_dyadic));
            }
            Ok(rec)
        }),
        task("frequency-pieces", move |_, seed| {
            let mut rec = TaskRecord::new("frequency-pieces", seed);
            for &delta in &p.phi_deltas {
                let fam = phi_delta_family(delta, &bumps::mollifier_symbol(), PhiDeltaSpec::default())?;
                rec.check(Check::at_most(&format!("sum(delta={delta})"), Identity, fam.reconstruction_error(4.0), p.tol_phi));
                match fam.decay_fit(fam.j0 + 6, 1e-12, 5) {
                    Some(fit) => {
                        rec.check(Check::at_most(&format!("decay(delta={delta})"), Identity, fit.exponent, p.max_decay_slope));
                        rec.fits.push(FitRecord::new(&format!("decay(delta={delta})"), &fit, None));
                    }
                    None => {
                        rec.check(Check::holds(&format!("decay(delta={delta})"), Identity, false, "decay fit has samples"));
                    }
                }
            }
            Ok(rec)
        }),
        task("partitions", move |_, seed| {
            let mut rec = TaskRecord::new("partitions", seed);
            let n = p.partition_probes;
            let z = zeta_family(2, 14, &bumps::eta_symbol())?;
            rec.check(Check::at_most("zeta", Identity, partition_defect(&z, 0.0, 2f64.powi(13), n), p.tol_partition));
            let delta = 1.0 / 32.0;
            let w = 64.0 * delta;
            let psi = psi_family(delta, 6, &bumps::theta_symbol())?;
            rec.check(Check::at_most("psi", Identity, partition_defect(&psi, 1.0 - w, 1.0 + w, n), p.tol_partition));
            let mut worst = 0.0f64;
            for (k, d) in [(0, 0.25), (3, 0.1), (-2, 1.0 / 16.0)] {
                let eta = eta_lambda_family(k, d, &bumps::unit_translate_symbol())?;
                worst = worst.max(partition_defect(&eta, 2f64.powi(k - 1), 2f64.powi(k + 2), n));
            }
            rec.check(Check::at_most("eta-lambda", Identity, worst, p.tol_partition));
            Ok(rec)
        }),
        task("model-basis", move |c, seed| {
            let mut rec = TaskRecord::new("model-basis", seed);
            let m = c.model;
            rec.check(Check::at_most("orthonormality", Identity, m.orthonormality_error(), m.ortho_tol()));
            let f = m.random_band_limited(seed, false);
            let back = m.synthesis(&m.analysis(&f)?)?;
            rec.check(Check::at_most("round-trip", Identity, back.sub(&f).max_abs() / f.max_abs(), 10.0 * m.ortho_tol()));
            Ok(rec)
        }),
        task("kernel-two-path", move |c, seed| {
            let mut rec = TaskRecord::new("kernel-two-path", seed);
            let h = heat(c.model, 0.3)?;
            let k = h.kernel(c.max_kernel_entries)?;
            let f = c.model.random_band_limited(seed, false);
            let a = h.apply(&f)?;
            let b = k.apply(&f)?;
            rec.check(Check::at_most("relative-gap", Identity, a.sub(&b).max_abs() / a.max_abs().max(1e-300), p.tol_kernel));
            rec.check(Check::at_most("hermitian-defect", Identity, k.hermitian_defect(), p.tol_kernel));
            Ok(rec)
        }),
        task("tdelta-l2-law", move |c, seed| {
            let mut rec = TaskRecord::new("tdelta-l2-law", seed);
            let m = c.model;
            let phi = bumps::mollifier_symbol();
            let fields: Vec<Field> =
                (0..p.tdelta_fields as u64).map(|i| m.random_band_limited(seed.wrapping_add(i), true)).collect();
            let mut worst = 0.0f64;
            let mut consts = Vec::new();
            for &delta in &p.tdelta_deltas {
                let grid = TGrid::for_model(m, delta, p.tdelta_density);
                let want = tdelta_l2_constant(delta, &phi)?;
                for f in &fields {
                    let got = m.space().lp_norm(&square_tdelta(m, delta, &phi, f, &grid)?, 2.0)? / m.space().lp_norm(f, 2.0)?;
                    worst = worst.max((got - want).abs());
                }
                consts.push(want);
                rec.value(format!("l2-constant(delta={delta})"), want);
            }
            rec.check(Check::at_most("max-defect", Identity, worst, p.tol_l2_law));
            let fit = fit_or_data(&p.tdelta_deltas, &consts)?;
            rec.check(Check::within("delta-slope", Identity, fit.exponent, 0.5, p.tol_l2_slope));
            rec.fits.push(FitRecord::new("l2-constant", &fit, Some(0.5)));
            Ok(rec)
        }),
        task("mellin", move |_, seed| {
            let mut rec = TaskRecord::new("mellin", seed);
            let bump = Symbol::real("bump", ArgumentKind::OfL, Some((0.25, 1.75)), |l| bumps::mollifier((l - 1.0) / 1.5));
            let d = mellin(&bump, 400.0, 4096)?;
            let worst = [0.5, 1.0, 1.5].iter().map(|&l| (d.reconstruct(l) - bump.eval(l)).norm()).fold(0.0, f64::max);
            rec.check(Check::at_most("reconstruction", Identity, worst, p.tol_mellin));
            let conv = MellinConvergence::study(&br_symbol(1.0, 1.0)?, 0.5, 25.0, 4)?;
            rec.check(Check::holds("alpha=1,s=0.5", Identity, conv.convergent, "increments shrink at every doubling"));
            let div = MellinConvergence::study(&br_symbol(0.3, 1.0)?, 0.5, 25.0, 4)?;
            rec.check(Check::holds("alpha=0.3,s=0.5", Identity, !div.convergent && div.growing, "values grow monotonically"));
            for (i, v) in conv.values.iter().enumerate() {
                rec.value(format!("weight(alpha=1,cut={})", conv.cutoffs[i]), *v);
            }
            for (i, v) in div.values.iter().enumerate() {
                rec.value(format!("weight(alpha=0.3,cut={})", div.cutoffs[i]), *v);
            }
            Ok(rec)
        }),
        task("nets", move |c, seed| {
            let mut rec = TaskRecord::new("nets", seed);
            let s = c.model.space();
            let h = s.distance(0, 1);
            let bound = 41f64.powf(s.dimension_n().ceil());
            for cells in [1.0, 2.0, 4.0] {
                let net = s.build_net(10.0 * cells * h)?;
                rec.check(Check::at_most(&format!("violations(sep={cells}h)"), Identity, s.net_violations(&net) as f64, 0.0));
                rec.check(Check::at_most(&format!("overlap(sep={cells}h)"), Identity, s.overlap_count(&net) as f64, bound));
            }
            Ok(rec)
        }),
        task("subordination-bound", move |c, seed| {
            let mut rec = TaskRecord::new("subordination-bound", seed);
            let f = c.model.random_band_limited(seed, false);
            let grid = default_r_grid(c.model);
            for (alpha, rho) in [(1.5, 0.0), (1.5, 0.5)] {
                let r = subordination_bound_check(c.model, alpha, rho, &f, &grid)?;
                rec.value(format!("cprime(alpha={alpha},rho={rho})"), r.cprime);
                rec.check(Check::at_most(&format!("ratio(alpha={alpha},rho={rho})"), Identity, r.max_ratio, 1.0 + p.tol_bound));
            }
            Ok(rec)
        }),
    ]
}

fn fit_or_data(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    SlopeFit::from_points(xs, ys).ok_or_else(|| brlab::Error::Data("fewer than two usable samples".into()).into())
}

fn fs_tasks(p: &FsParams) -> Vec<Task<'_>> {
    let mut tasks = vec![task("cone", move |c, seed| {
        let mut rec = TaskRecord::new("cone", seed);
        let run = |m: &SpectralModel| {
            let center = p.center.unwrap_or_else(|| central_point(m));
            let guard = p.guard_cells * m.space().distance(0, 1);
            check_fs(m, &p.t_list, &[FsBump { center, radius: p.radius }], guard)
        };
        let rep = run(c.model)?;
        let kind = if rep.asserted { CheckKind::Identity } else { CheckKind::Measured };
        for e in &rep.entries {
            rec.value(format!("outside(t={})", e.t), e.outside);
        }
        rec.value("leakage", rep.leakage[0]);
        rec.check(Check::at_most("max-outside", kind, rep.max_outside, p.threshold));
        if p.refine {
            let fine = c.spec.refined(2).build()?;
            let center = p.center.map(|i| 2 * i);
            let fine_rep = check_fs(
                &fine,
                &p.t_list,
                &[FsBump { center: center.unwrap_or_else(|| central_point(&fine)), radius: p.radius }],
                p.guard_cells * fine.space().distance(0, 1),
            )?;
            rec.value("max-outside(2K)", fine_rep.max_outside);
            let ratio = if rep.max_outside > 0.0 { fine_rep.max_outside / rep.max_outside } else { 0.0 };
            rec.check(Check::at_most("refinement-ratio", kind, ratio, 0.5));
        }
        Ok(rec)
    })];
    if let Some(r) = p.compact_fourier_r {
        tasks.push(task("compact-fourier", move |c, seed| {
            let mut rec = TaskRecord::new("compact-fourier", seed);
            let m = c.model;
            let center = p.center.unwrap_or_else(|| central_point(m));
            let rep = check_fs_symbol(m, r, &[FsBump { center, radius: p.radius }], p.guard_cells * m.space().distance(0, 1))?;
            let kind = if rep.asserted { CheckKind::Identity } else { CheckKind::Measured };
            rec.value("leakage", rep.leakage[0]);
            rec.check(Check::at_most("max-outside", kind, rep.max_outside, p.threshold));
            Ok(rec)
        }));
    }
    tasks
}

fn ev_tasks(p: &EvParams) -> Vec<Task<'_>> {
    use CheckKind::Measured;
    vec![
        task("ev", move |c, seed| {
            let mut rec = TaskRecord::new("ev", seed);
            let s = c.model.space();
            let (h, d) = (s.distance(0, 1), s.diameter());
            let ts: Vec<f64> =
                (0..p.t_count).map(|i| h * (d / h).powf(i as f64 / (p.t_count - 1) as f64)).collect();
            let rep = check_ev(c.model, p.p, &ts, &c.opts(seed))?;
            for (t, b) in &rep.entries {
                rec.brackets.push(BracketRecord::new(format!("t={t}"), b));
            }
            rec.value("sup-lower", rep.sup_lower);
            rec.check(Check::holds("sup-finite", Measured, rep.sup_lower.is_finite(), "sup over t is finite"));
            Ok(rec)
        }),
        task("g", move |c, seed| {
            let mut rec = TaskRecord::new("g", seed);
            let x = central_point(c.model);
            let samples: Vec<(usize, f64, f64)> = p.g_pairs.iter().map(|&(s, t)| (x, s, t)).collect();
            let rep = check_g(c.model, p.p, &samples, &c.opts(seed))?;
            for e in &rep.entries {
                rec.brackets.push(BracketRecord::new(format!("s={},t={}", e.s, e.t), &e.bracket));
            }
            rec.value("c-lower", rep.c_lower);
            rec.check(Check::holds("constant-finite", Measured, rep.c_lower.is_finite(), "best constant is finite"));
            Ok(rec)
        }),
        task("ge", move |c, seed| {
            let mut rec = TaskRecord::new("ge", seed);
            let rep = check_ge(c.model, &p.ge_t_list, &[central_point(c.model)])?;
            rec.value("c-amplitude", rep.c_amplitude);
            rec.value("c-exponent", rep.c_exponent);
            rec.value("log-residual", rep.log_residual);
            rec.check(Check::holds("fit", Measured, rep.fit_ok, "c > 0 and relative log residual <= 0.1"));
            Ok(rec)
        }),
    ]
}

fn restriction_task(p: &RestrictionParams, c: &Ctx, seed: u64) -> Result<TaskRecord> {
    let mut rec = TaskRecord::new("restriction", seed);
    let rep = restriction_probe(c.model, p.p, &p.r_list, &restriction_probes(), &c.opts(seed))?;
    for e in &rep.entries {
        rec.brackets.push(BracketRecord::new(format!("R={},{}", e.scale, e.probe), &e.bracket));
    }
    for (r, probe) in &rep.skipped {
        rec.value(format!("skipped(R={r},{probe})"), 1.0);
    }
    rec.fits.push(FitRecord::new("sup-ratio", &rep.fit, Some(rep.reference_exponent)));
    rec.check(Check::within("slope", CheckKind::Measured, rep.fit.exponent, rep.reference_exponent, p.slope_tol));
    Ok(rec)
}

fn cluster_task(p: &ClusterParams, c: &Ctx, seed: u64) -> Result<TaskRecord> {
    let mut rec = TaskRecord::new("clusters", seed);
    let rep = cluster_constant(c.model, p.p, &p.lambda_list, p.window, &c.opts(seed))?;
    let mut worst = 0.0f64;
    for e in &rep.entries {
        rec.brackets.push(BracketRecord::new(format!("lambda={}", e.lambda), &e.bracket));
        if let [k] = e.modes[..] {
            let want = c.model.mode(k).iter().map(|z| z.norm()).fold(0.0, f64::max).powi(2);
            worst = worst.max((e.bracket.lower - want).abs() / want.max(1.0));
        }
    }
    for l in &rep.skipped {
        rec.value(format!("skipped(lambda={l})"), 1.0);
    }
    rec.value("constant-spread", rep.constant_spread);
    if let Some(f) = &rep.fit {
        rec.fits.push(FitRecord::new("norm", f, Some(rep.reference_exponent)));
    }
    if let Some(f) = &rep.ratio_fit {
        rec.fits.push(FitRecord::new("ratio", f, Some(0.0)));
    }
    rec.check(Check::holds("consistent", CheckKind::Measured, rep.consistent, "normalized ratio not growing (3 stderr)"));
    if p.closed_form {
        rec.check(Check::at_most("closed-form", CheckKind::Identity, worst, p.closed_form_tol));
    }
    Ok(rec)
}

fn sc_task(p: &ScParams, c: &Ctx, seed: u64) -> Result<TaskRecord> {
    let mut rec = TaskRecord::new("sc-ratio", seed);
    let rep = sc_kappa_probe(c.model, p.p, p.q, p.kappa, &p.n_list, &sc_probes(), &c.opts(seed))?;
    for e in &rep.entries {
        rec.brackets.push(BracketRecord::new(format!("N={},{}", e.scale, e.probe), &e.bracket));
    }
    rec.fits.push(FitRecord::new("sup-ratio", &rep.fit, Some(0.0)));
    rec.check(Check::holds("bounded", CheckKind::Measured, rep.bounded, "ratio not growing (3 stderr)"));
    Ok(rec)
}

fn tdelta_task(p: &TdeltaParams, c: &Ctx, seed: u64) -> Result<TaskRecord> {
    let mut rec = TaskRecord::new("tdelta", seed);
    let m = c.model;
    let probes: Vec<Field> = (0..p.n_probes as u64).map(|i| m.random_band_limited(seed.wrapping_add(i), true)).collect();
    let rep = tdelta_scaling(m, p.p, p.q, p.p0, &p.delta_list, &probes, &bumps::mollifier_symbol(), p.density)?;
    for ((d, v), l2) in rep.measured.iter().zip(&rep.l2_constants) {
        rec.value(format!("measured(delta={d})"), *v);
        rec.value(format!("l2-constant(delta={d})"), *l2);
    }
    rec.fits.push(FitRecord::new("norm", &rep.fit, Some(rep.reference_exponent)));
    rec.fits.push(FitRecord::new("ratio", &rep.ratio_fit, Some(0.0)));
    if p.p == 2.0 {
        let worst = rep.measured.iter().zip(&rep.l2_constants).map(|((_, v), l)| (v - l).abs()).fold(0.0, f64::max);
        rec.check(Check::at_most("l2-law", CheckKind::Identity, worst, p.l2_tol));
        rec.check(Check::within("delta-slope", CheckKind::Identity, rep.fit.exponent, 0.5, p.slope_tol));
    }
    rec.check(Check::holds("consistent", CheckKind::Measured, rep.consistent, "measured / delta^e not growing in 1/delta"));
    Ok(rec)
}

fn maximal_task(p: &MaximalParams, c: &Ctx, seed: u64) -> Result<TaskRecord> {
    let mut rec = TaskRecord::new("maximal", seed);
    let make = |s: usize| with_modes(c.spec, s).build();
    let rep = maximal_threshold_sweep(&make, p.p, &p.alpha_grid, &p.sizes, seed)?;
    rec.value("alpha_p", rep.alpha_p);
    for (i, e) in rep.entries.iter().enumerate() {
        for (size, v) in &e.lower_bounds {
            rec.value(format!("lower(alpha={},size={size})", e.alpha), *v);
        }
        rec.fits.push(FitRecord::new(&format!("alpha={}", e.alpha), &e.fit, None));
        if let Some(expect) = &p.expect_growing {
            let label = if expect[i] { "growing" } else { "flat" };
            rec.check(Check::holds(
                &format!("alpha={}", e.alpha),
                CheckKind::Measured,
                e.growing == expect[i],
                &format!("classified {label}: slope > 3 stderr iff growing"),
            ));
        }
    }
    Ok(rec)
}

fn weighted_task(p: &WeightedParams, c: &Ctx, seed: u64) -> Result<TaskRecord> {
    let mut rec = TaskRecord::new("weighted", seed);
    let m = c.model;
    let fields: Vec<Field> = (0..p.n_fields as u64).map(|i| m.random_band_limited(seed.wrapping_add(i), true)).collect();
    let weights = weight_family(m, seed);
    let rep = weighted_square(m, &p.delta_list, p.p0, p.q, &fields, &weights, &bumps::mollifier_symbol(), p.density)?;
    rec.value("r0", rep.r0);
    rec.value("exponent", rep.exponent);
    for (d, v) in &rep.constants {
        rec.value(format!("constant(delta={d})"), *v);
    }
    for (d, v) in &rep.normalized {
        rec.value(format!("normalized(delta={d})"), *v);
    }
    rec.check(Check::at_most("violations", CheckKind::Identity, rep.violations as f64, 0.0));
    rec.check(Check::at_most("unit-weight", CheckKind::Identity, rep.unit_weight_mismatch, p.unit_tol));
    rec.check(Check::at_most("spread", CheckKind::Measured, rep.spread, p.spread_max));
    Ok(rec)
}
