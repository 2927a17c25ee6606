//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use brlab::calculus::{square_tdelta, tdelta_l2_constant, TGrid};
use brlab::estimators::ClusterWindow;
use brlab::space::MetricMeasureSpace;
use brlab::symbols::{
    bumps, dyadic_decompose, eta_lambda_family, partition_defect, phi_delta_family, psi_family, subordination_check,
    zeta_family, PhiDeltaSpec,
};
use brlab::{ModelSpec, SlopeFit};
use brlab_bench::record::{RunRecord, Verdict};
use brlab_bench::scenarios::{ClusterParams, FsParams, IdentityParams, MaximalParams, ScenarioParams, WeightedParams};
use brlab_bench::{run_experiment, Budget, Config, ExperimentSpec};
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn spec(id: &str, model: ModelSpec, params: ScenarioParams) -> ExperimentSpec {
    ExperimentSpec { id: id.into(), model, params, seed: 7, budget: Budget::default() }
}

fn run(s: &ExperimentSpec, workers: usize) -> Result<RunRecord, String> {
    run_experiment(s, workers).map_err(|e| e.to_string())
}

/// PASS iff every check of the named tasks passes; the detail lists measured values.
fn tasks_pass(rec: &RunRecord, names: &[&str]) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for name in names {
        let t = rec.tasks.iter().find(|t| t.name == *name).ok_or(format!("task {name} missing"))?;
        for c in &t.checks {
            ok &= c.verdict == Verdict::Pass;
            detail.push(format!("{}/{}={:.3e}", t.name, c.name, c.measured));
        }
    }
    let detail = detail.join(" ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn identities() -> IdentityParams {
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
        tol_mellin: 1e-6,
        ..IdentityParams::default()
    }
}

fn c1_subordination() -> Outcome {
    let p = identities();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &rho in &p.rho_values {
        for &gap in &p.alpha_gaps {
            for r in [1.0, 2.0] {
                let m: Vec<f64> = (0..9).map(|i| r * i as f64 / 8.0).collect();
                worst = worst.max(subordination_check(rho + gap, rho, r, &m).map_err(|e| e.to_string())?);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("residual {worst:.2e} (<= 1e-8), {secs:.2} s (<= 10 s)");
    if worst <= 1e-8 && secs <= 10.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c2_dyadic() -> Outcome {
    let top = 1.0 - 2f64.powi(-18);
    let mut worst = 0.0f64;
    for rho in [0.5, 1.0, 2.0] {
        let d = dyadic_decompose(rho, &bumps::dyadic_symbol(), 20).map_err(|e| e.to_string())?;
        worst = worst.max(d.max_residual(top, 4000));
    }
    let detail = format!("max error {worst:.2e} (<= 1e-5)");
    if worst <= 1e-5 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c3_phi_delta() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for delta in [0.25, 0.125, 0.0625] {
        let fam = phi_delta_family(delta, &bumps::mollifier_symbol(), PhiDeltaSpec::default()).map_err(|e| e.to_string())?;
        let err = fam.reconstruction_error(4.0);
        let slope = fam.decay_fit(fam.j0 + 6, 1e-12, 5).map(|f| f.exponent);
        ok &= err <= 1e-6 && slope.is_some_and(|s| s <= -4.0);
        detail.push(format!("delta={delta}: sum {err:.2e}, slope {}", slope.map_or("none".into(), |s| format!("{s:.2}"))));
    }
    let detail = detail.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c4_partitions() -> Outcome {
    let e = |x: brlab::Error| x.to_string();
    let z = partition_defect(&zeta_family(2, 14, &bumps::eta_symbol()).map_err(e)?, 0.0, 2f64.powi(13), 1000);
    let d = 1.0 / 32.0;
    let psi = partition_defect(&psi_family(d, 6, &bumps::theta_symbol()).map_err(e)?, 1.0 - 64.0 * d, 1.0 + 64.0 * d, 1000);
    let mut eta = 0.0f64;
    for (k, d) in [(0, 0.25), (3, 0.1), (-2, 1.0 / 16.0)] {
        let fam = eta_lambda_family(k, d, &bumps::unit_translate_symbol()).map_err(e)?;
        eta = eta.max(partition_defect(&fam, 2f64.powi(k - 1), 2f64.powi(k + 2), 1000));
    }
    let detail = format!("zeta {z:.2e}, psi {psi:.2e}, eta {eta:.2e} (<= 1e-12)");
    if z.max(psi).max(eta) <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c5_l2_law() -> Outcome {
    let models = [
        ModelSpec::Torus1d { modes: 24, grid: 64 },
        ModelSpec::Torus2d { modes: 6, grid: 16 },
        ModelSpec::IntervalDirichlet { modes: 24, grid: 64 },
        ModelSpec::Hermite1d { modes: 32, halfwidth: 16.0, grid: 256 },
        ModelSpec::Hermite2d { modes: 8, halfwidth: 10.0, grid: 48 },
    ];
    let deltas: Vec<f64> = (2..=6).map(|k| 2f64.powi(-k)).collect();
    let phi = bumps::mollifier_symbol();
    let e = |x: brlab::Error| x.to_string();
    let mut ok = true;
    let mut detail = Vec::new();
    for spec in models {
        let m = spec.build().map_err(e)?;
        let fields: Vec<_> = (0..20).map(|i| m.random_band_limited(1000 + i, true)).collect();
        let mut worst = 0.0f64;
        let mut consts = Vec::new();
        for &delta in &deltas {
            let want = tdelta_l2_constant(delta, &phi).map_err(e)?;
            let grid = TGrid::for_model(&m, delta, 64.0);
            for f in &fields {
                let t = square_tdelta(&m, delta, &phi, f, &grid).map_err(e)?;
                let got = m.space().lp_norm(&t, 2.0).map_err(e)? / m.space().lp_norm(f, 2.0).map_err(e)?;
                worst = worst.max((got - want).abs());
            }
            consts.push(want);
        }
        let slope = SlopeFit::from_points(&deltas, &consts).map_or(f64::NAN, |f| f.exponent);
        ok &= worst <= 1e-6 && (slope - 0.5).abs() <= 0.02;
        detail.push(format!("{}: {worst:.1e}, slope {slope:.4}", m.kind().name()));
    }
    let detail = detail.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c6_finite_speed() -> Outcome {
    let fs = |center, radius| FsParams {
        t_list: vec![0.2, 0.5, 1.0],
        radius,
        center,
        threshold: 1e-6,
        refine: true,
        compact_fourier_r: None,
        ..FsParams::default()
    };
    let interval = ModelSpec::IntervalDirichlet { modes: 128, grid: 320 };
    let im = interval.build().map_err(|e| e.to_string())?;
    let near = (0..im.n_points())
        .min_by(|&a, &b| im.space().distance_to(a, &[0.95]).total_cmp(&im.space().distance_to(b, &[0.95])))
        .unwrap_or(0);
    let torus = spec("fs_torus", ModelSpec::Torus1d { modes: 128, grid: 320 }, ScenarioParams::FsCheck(fs(None, 1.0)));
    let interval = spec("fs_interval", interval, ScenarioParams::FsCheck(fs(Some(near), 0.9)));
    let a = tasks_pass(&run(&torus, 8)?, &["cone"]);
    let b = tasks_pass(&run(&interval, 8)?, &["cone"]);
    match (a, b) {
        (Ok(a), Ok(b)) => Ok(format!("torus-1d {a}; interval {b}")),
        (a, b) => Err(format!("torus-1d {a:?}; interval {b:?}")),
    }
}

fn c7_nets() -> Outcome {
    let e = |x: brlab::Error| x.to_string();
    let mut ok = true;
    let mut detail = Vec::new();
    let grids = [(1, 64), (1, 128), (1, 256), (2, 12), (2, 18), (2, 24)];
    for (dims, n) in grids {
        for s in [MetricMeasureSpace::torus_grid(dims, n).map_err(e)?, MetricMeasureSpace::line_grid(dims, 4.0, n).map_err(e)?] {
            let h = s.distance(0, 1);
            let bound = 41usize.pow(dims as u32);
            for rho in [3.0 * h, 10.0 * h, 0.5] {
                let net = s.build_net(rho).map_err(e)?;
                let v = s.net_violations(&net);
                let k = s.overlap_count(&net);
                ok &= v == 0 && k <= bound;
                if v != 0 || k > bound {
                    detail.push(format!("dims={dims} n={n} rho={rho:.3}: violations {v}, K {k}"));
                }
            }
        }
    }
    if ok {
        Ok(format!("{} grids x 2 geometries x 3 radii: all invariants exact, K <= 41^n", grids.len()))
    } else {
        Err(detail.join("; "))
    }
}

fn c8_clusters() -> Outcome {
    let hermite = spec(
        "cluster_hermite",
        ModelSpec::Hermite1d { modes: 48, halfwidth: 16.0, grid: 512 },
        ScenarioParams::ClusterSweep(ClusterParams {
            p: 1.0,
            lambda_list: (0..=40).map(|k| (2 * k + 1) as f64).collect(),
            window: ClusterWindow::L,
            closed_form: true,
            closed_form_tol: 1e-8,
        }),
    );
    let torus = spec(
        "cluster_torus",
        ModelSpec::Torus1d { modes: 70, grid: 160 },
        ScenarioParams::ClusterSweep(ClusterParams {
            p: 1.0,
            lambda_list: (1..=64).map(f64::from).collect(),
            window: ClusterWindow::SqrtL,
            closed_form: false,
            closed_form_tol: 1e-8,
        }),
    );
    match (tasks_pass(&run(&hermite, 8)?, &["clusters"]), tasks_pass(&run(&torus, 8)?, &["clusters"])) {
        (Ok(a), Ok(b)) => Ok(format!("hermite-1d {a}; torus-1d {b}")),
        (a, b) => Err(format!("hermite-1d {a:?}; torus-1d {b:?}")),
    }
}

fn c9_maximal() -> Outcome {
    let s = spec(
        "maximal",
        ModelSpec::Torus1d { modes: 64, grid: 130 },
        ScenarioParams::MaximalThreshold(MaximalParams {
            p: 64.0,
            alpha_grid: vec![0.1, 0.8],
            sizes: vec![64, 128, 256, 512],
            expect_growing: Some(vec![true, false]),
        }),
    );
    let start = Instant::now();
    let rec = run(&s, 1)?;
    let secs = start.elapsed().as_secs_f64();
    let slopes: Vec<String> = rec.tasks[0]
        .fits
        .iter()
        .map(|f| format!("{} slope {:.4} +- {:.4}", f.name, f.exponent, f.stderr))
        .collect();
    let res = tasks_pass(&rec, &["maximal"]);
    let detail = format!("{}; {secs:.1} s single-threaded (<= 300 s)", slopes.join(", "));
    if res.is_ok() && secs <= 300.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c10_mellin(rec: &RunRecord) -> Outcome {
    tasks_pass(rec, &["mellin"])
}

fn c11_weighted() -> Outcome {
    let s = spec(
        "weighted",
        ModelSpec::Torus1d { modes: 16, grid: 48 },
        ScenarioParams::WeightedSquare(WeightedParams { unit_tol: 1e-6, ..WeightedParams::default() }),
    );
    let rec = run(&s, 8)?;
    let t = &rec.tasks[0];
    let ok = t.checks.iter().filter(|c| c.name != "spread").all(|c| c.verdict == Verdict::Pass);
    let detail: Vec<String> = t.checks.iter().map(|c| format!("{}={:.3e}", c.name, c.measured)).collect();
    if ok {
        Ok(detail.join(" "))
    } else {
        Err(detail.join(" "))
    }
}

fn strip_timing(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("\"wall_time_s\"")).collect::<Vec<_>>().join("\n")
}

fn c12_determinism() -> Outcome {
    let cfg = Config::parse(&Config::default_text("verify-identities").map_err(|e| e.to_string())?, "default")
        .map_err(|e| e.to_string())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut texts = Vec::new();
    for w in [1usize, 8] {
        let dir = tmp.path().join(w.to_string());
        brlab_bench::run_config(&cfg, &dir, Some(w)).map_err(|e| e.to_string())?;
        let mut files = Vec::new();
        for ext in ["json", "values.csv", "checks.csv"] {
            let text = std::fs::read_to_string(dir.join(format!("verify_identities.{ext}"))).map_err(|e| e.to_string())?;
            files.push(strip_timing(&text));
        }
        texts.push(files);
    }
    if texts[0] == texts[1] {
        Ok(format!("JSON and CSV byte-identical for workers 1 and 8 ({} JSON bytes)", texts[0][0].len()))
    } else {
        Err("records differ between workers 1 and 8".into())
    }
}

fn main() {
    let identity_run = run(
        &spec("identities", ModelSpec::Torus1d { modes: 24, grid: 64 }, ScenarioParams::VerifyIdentities(identities())),
        8,
    );
    let criteria: Vec<Criterion> = vec![
        ("1 subordination identity", Box::new(c1_subordination)),
        ("2 dyadic reconstruction", Box::new(c2_dyadic)),
        ("3 frequency pieces", Box::new(c3_phi_delta)),
        ("4 partitions of unity", Box::new(c4_partitions)),
        ("5 exact L2 square-function law", Box::new(c5_l2_law)),
        ("6 finite propagation speed", Box::new(c6_finite_speed)),
        ("7 nets and overlap", Box::new(c7_nets)),
        ("8 cluster estimates", Box::new(c8_clusters)),
        ("9 maximal threshold sweep", Box::new(c9_maximal)),
        ("10 Mellin machinery", Box::new(|| c10_mellin(identity_run.as_ref().map_err(Clone::clone)?))),
        ("11 weighted square function", Box::new(c11_weighted)),
        ("12 determinism", Box::new(c12_determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {name}: PASS [{secs:.1} s] {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {name}: FAIL [{secs:.1} s] {d}");
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
