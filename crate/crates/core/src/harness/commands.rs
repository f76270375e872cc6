//! The `indices | solve | sweep | verify` commands.
//!
//! Each command has a pure `*_run` form returning its report and fields, and
//! a `cmd_*` form that also writes the output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::RunConfig;
use super::report::{Check, IndicesReport, MeshSummary, Property, RunReport, SweepReport, VerifyReport};
use crate::error::{Error, Result};
use crate::fem::{
    field_norms, norm_modular_sandwich, weak_residual_norm, write_field_csv, write_mesh_elements_csv,
    write_mesh_nodes_csv, Field, Functional, Mesh, ProblemParams, Reaction, RhsMode,
};
use crate::orlicz::{convexity_gap, delta2_ratio, sqrt_convexity_slack, young_gap, YoungPair};
use crate::solver::{
    coercivity_probe, energy_agreement, find_lambda_star, flux_monotonicity_check, lambda1_estimate,
    minimize_multistart, mountain_pass, ring_probe, verify_ordering_and_sign, IterRecord, MountainPassReport,
    SweepRow, Truncation, EPS_NEG, ORDERING_TOL,
};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    /// Two-solution certificate achieved, or the command completed.
    Ok = 0,
    /// Only the trivial solution: λ is below the threshold.
    SubThreshold = 2,
    /// Convergence or geometry failure, or failed checks.
    Failure = 3,
    /// Invalid configuration or bracket.
    ConfigError = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Omits wall-clock times so that reports are byte-identical.
    pub deterministic: bool,
    pub verbosity: u8,
}

impl RunOptions {
    fn seed(&self, cfg: &RunConfig) -> u64 {
        self.seed.unwrap_or(cfg.solver.seed)
    }

    fn out_dir(&self, cfg: &RunConfig) -> PathBuf {
        self.out.clone().unwrap_or_else(|| cfg.output_dir.clone())
    }

    fn wall_time(&self, start: Instant) -> Option<f64> {
        (!self.deterministic).then(|| start.elapsed().as_secs_f64())
    }
}

/// What a command did, for the caller to print and map to an exit code.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub status: ExitStatus,
    pub summary: String,
    pub out_dir: PathBuf,
}

fn mesh_summary(mesh: &Mesh) -> MeshSummary {
    MeshSummary { dim: mesh.dim(), n_nodes: mesh.n_nodes(), n_elements: mesh.n_elements() }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_trace(path: &Path, trace: &[IterRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in trace {
        writeln!(w, "{} iter={} energy={:e} residual={:e} step={:e}", r.phase, r.iter, r.energy, r.residual, r.step)?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- indices

pub fn indices_run(cfg: &RunConfig) -> Result<IndicesReport> {
    let pair = cfg.pair()?;
    let idx = pair.indices();
    let grid = log_grid(1e-6, 1e6, 1000);
    let ratio = delta2_ratio(&pair, &grid);
    let slack = sqrt_convexity_slack(&pair, &grid);
    Ok(IndicesReport {
        command: "indices".into(),
        phi: cfg.phi,
        phi0_lower: idx.lower,
        phi0_upper: idx.upper,
        closed_form: cfg.phi.closed_form_indices(),
        delta2_ratio: ratio,
        delta2_bound: 2f64.powf(idx.upper),
        sqrt_convex: slack >= -crate::DEFAULT_TOL,
        sqrt_convexity_slack: slack,
        a_at_zero: cfg.phi.a_at_zero(),
        wall_time: None,
    })
}

/// Writes `report.json` with the indices, Δ₂ ratio and √-convexity verdict.
pub fn cmd_indices(cfg: &RunConfig, opts: &RunOptions) -> Result<CommandOutcome> {
    let start = Instant::now();
    let mut rep = indices_run(cfg)?;
    rep.wall_time = opts.wall_time(start);
    let out_dir = opts.out_dir(cfg);
    fs::create_dir_all(&out_dir)?;
    write_json(&out_dir.join("report.json"), &rep)?;
    let summary = format!(
        "{}: phi0 = {:.6}, phi^0 = {:.6}, delta2 ratio = {:.6}, sqrt-convex: {}",
        cfg.phi.name(),
        rep.phi0_lower,
        rep.phi0_upper,
        rep.delta2_ratio,
        rep.sqrt_convex
    );
    Ok(CommandOutcome { status: ExitStatus::Ok, summary, out_dir })
}

// ---------------------------------------------------------------- solve

/// Fields and diagnostics of one `solve` run.
#[derive(Debug, Clone)]
pub struct SolveRun {
    pub report: RunReport,
    pub status: ExitStatus,
    pub u1: Option<Field>,
    pub u2: Option<Field>,
    pub mountain_pass: Option<MountainPassReport>,
    pub trace: Vec<IterRecord>,
}

fn empty_report(cfg: &RunConfig, prm: &ProblemParams, mesh: &Mesh, seed: u64) -> RunReport {
    RunReport {
        command: "solve".into(),
        status: String::new(),
        message: None,
        seed,
        phi: cfg.phi,
        p: cfg.p,
        q: cfg.q,
        lambda: prm.lambda,
        lambda_star_est: None,
        mesh: mesh_summary(mesh),
        indices: prm.pair.indices(),
        growth_condition: prm.growth_condition(),
        tol: cfg.solver.tol,
        i_u1: None,
        j_u2: None,
        i_u2: None,
        path_max: None,
        residual_u1: None,
        residual_u2: None,
        residual_u2_full: None,
        ring_rho: None,
        ring_level: None,
        norms_u1: None,
        norms_u2: None,
        distance_u1_u2: None,
        start_u1: None,
        iterations_u1: None,
        iterations_u2: None,
        checks: Vec::new(),
        certificate: false,
        wall_time: None,
    }
}

fn norm_exponents(prm: &ProblemParams) -> Vec<f64> {
    vec![prm.q, prm.p, prm.pair.indices().lower]
}

/// Computes u₁ and, above the threshold, u₂ with the certificate checks.
pub fn solve_at(
    cfg: &RunConfig,
    prm: &ProblemParams,
    mesh: &Arc<Mesh>,
    warm: &[Field],
    seed: u64,
    record_trace: bool,
) -> SolveRun {
    let tol = cfg.solver.tol;
    let mut rep = empty_report(cfg, prm, mesh, seed);
    let mut sopts = cfg.solver_options();
    sopts.record_trace = record_trace;
    let mut trace = Vec::new();
    let fail = |mut rep: RunReport, status: &str, e: &Error, trace| {
        rep.status = status.into();
        rep.message = Some(e.to_string());
        SolveRun { report: rep, status: ExitStatus::Failure, u1: None, u2: None, mountain_pass: None, trace }
    };

    let (u1, m) = match minimize_multistart(prm, mesh, warm, &sopts, seed) {
        Ok(v) => v,
        Err(e) => return fail(rep, "no_convergence", &e, trace),
    };
    trace.extend(m.trace.iter().cloned());
    let exps = norm_exponents(prm);
    rep.i_u1 = Some(m.energy);
    rep.residual_u1 = Some(m.residual);
    rep.start_u1 = Some(m.start.clone());
    rep.iterations_u1 = Some(m.iterations);
    rep.norms_u1 = Some(field_norms(&u1, &prm.pair, &exps));
    rep.checks.push(Check::new("residual_u1", m.residual, "<=", tol, true));
    rep.checks.push(Check::new("negativity_u1", (-u1.min_value()).max(0.0), "<=", ORDERING_TOL, true));
    rep.checks.push(Check::new("i_u1", m.energy, "<", -EPS_NEG, true));
    if m.energy >= -EPS_NEG {
        rep.status = "trivial_only".into();
        rep.message = Some(format!("min I = {:e} ≥ -{EPS_NEG:e}: only the trivial solution was found", m.energy));
        return SolveRun { report: rep, status: ExitStatus::SubThreshold, u1: Some(u1), u2: None, mountain_pass: None, trace };
    }

    let tr = Truncation::new(u1.clone(), prm);
    let ring = ring_probe(&tr, prm, 64, seed);
    rep.ring_rho = Some(ring.rho);
    rep.ring_level = Some(ring.level);
    rep.checks.push(Check::new("ring_level", ring.level, ">", 0.0, false));
    let mut mp_opts = cfg.mountain_pass_options();
    mp_opts.record_trace = record_trace;
    let mp = match mountain_pass(&tr, prm, &mp_opts) {
        Ok(mp) => mp,
        Err(e) => {
            let status = if matches!(e, Error::GeometryFailure(_)) { "geometry_failure" } else { "no_convergence" };
            let mut run = fail(rep, status, &e, trace);
            run.u1 = Some(u1);
            return run;
        }
    };
    trace.extend(mp.report.trace.iter().cloned());
    let u2 = mp.u2.clone();
    let i_u2 = prm.functional(mesh).energy(u2.coeffs());
    let res_t = weak_residual_norm(&u2, prm, RhsMode::Truncated(&tr));
    let res_f = weak_residual_norm(&u2, prm, RhsMode::FullProblem);
    let ord = verify_ordering_and_sign(&u2, &u1);
    let agree = energy_agreement(&u2, &tr, prm);
    let dist = u1.l2_distance(&u2);
    rep.j_u2 = Some(mp.c);
    rep.i_u2 = Some(i_u2);
    rep.path_max = Some(mp.report.path_max);
    rep.residual_u2 = Some(res_t);
    rep.residual_u2_full = Some(res_f);
    rep.norms_u2 = Some(field_norms(&u2, &prm.pair, &exps));
    rep.distance_u1_u2 = Some(dist);
    rep.iterations_u2 = Some(mp.report.iterations);
    rep.checks.push(Check::new("c", mp.c, ">", EPS_NEG, true));
    rep.checks.push(Check::new("residual_u2", res_t, "<=", tol, true));
    rep.checks.push(Check::new("residual_u2_full", res_f, "<=", tol, true));
    rep.checks.push(Check::new("negativity_u2", ord.negativity, "<=", ORDERING_TOL, true));
    rep.checks.push(Check::new("excess_u2_over_u1", ord.excess_over_u1, "<=", ORDERING_TOL, true));
    rep.checks.push(Check::new("distance_u1_u2", dist, ">", 1e-4, true));
    rep.checks.push(Check::new("energy_gap_j_i_u2", agree.energy_gap, "<=", 1e-10, false));
    rep.checks.push(Check::new("gradient_gap_j_i_u2", agree.gradient_gap, "<=", 1e-10, false));
    rep.certificate = rep.checks.iter().filter(|c| c.certificate).all(|c| c.pass);
    let status = if rep.certificate {
        rep.status = "certificate".into();
        ExitStatus::Ok
    } else {
        rep.status = "certificate_failed".into();
        let failed: Vec<&str> = rep.checks.iter().filter(|c| c.certificate && !c.pass).map(|c| c.name.as_str()).collect();
        rep.message = Some(format!("failed checks: {}", failed.join(", ")));
        ExitStatus::Failure
    };
    SolveRun { report: rep, status, u1: Some(u1), u2: Some(u2), mountain_pass: Some(mp.report), trace }
}

/// `solve` without touching the filesystem. When the config carries a sweep
/// with a bisection tolerance, λ* is estimated first and reported.
pub fn solve_run(cfg: &RunConfig, seed: u64, record_trace: bool) -> Result<SolveRun> {
    let prm = cfg.params(cfg.lambda()?)?;
    let mesh = cfg.build_mesh()?;
    let lambda_star = match &cfg.sweep {
        Some(s) if s.bisect.is_some() => Some(
            find_lambda_star(&prm, &mesh, s.lo, s.hi, s.bisect.unwrap_or(1.0), &cfg.solver_options(), seed)
                .map(|l| l.lambda),
        ),
        _ => None,
    };
    let mut run = solve_at(cfg, &prm, &mesh, &[], seed, record_trace);
    match lambda_star {
        Some(Ok(l)) => run.report.lambda_star_est = Some(l),
        Some(Err(e)) => {
            let msg = run.report.message.take().map_or(String::new(), |m| format!("; {m}"));
            run.report.message = Some(format!("lambda* not estimated: {e}{msg}"));
        }
        None => {}
    }
    Ok(run)
}

fn write_path_csv(path: &Path, mp: &MountainPassReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["index", "t", "J"])?;
    for (i, (t, j)) in mp.path_t.iter().zip(&mp.path_energies).enumerate() {
        w.write_record([i.to_string(), t.to_string(), j.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report.json`, `u1.csv`, `u2.csv`, `path_energies.csv`, the mesh
/// tables and, at verbosity ≥ 1, `run.log`.
pub fn cmd_solve(cfg: &RunConfig, opts: &RunOptions) -> Result<CommandOutcome> {
    let start = Instant::now();
    let seed = opts.seed(cfg);
    let mut run = solve_run(cfg, seed, opts.verbosity >= 1)?;
    run.report.wall_time = opts.wall_time(start);
    let out_dir = opts.out_dir(cfg);
    fs::create_dir_all(&out_dir)?;
    if let Some(u1) = &run.u1 {
        write_field_csv(u1, File::create(out_dir.join("u1.csv"))?)?;
        write_mesh_nodes_csv(u1.mesh(), File::create(out_dir.join("mesh_nodes.csv"))?)?;
        write_mesh_elements_csv(u1.mesh(), File::create(out_dir.join("mesh_elements.csv"))?)?;
    }
    if let Some(u2) = &run.u2 {
        write_field_csv(u2, File::create(out_dir.join("u2.csv"))?)?;
    }
    if let Some(mp) = &run.mountain_pass {
        write_path_csv(&out_dir.join("path_energies.csv"), mp)?;
    }
    if opts.verbosity >= 1 {
        write_trace(&out_dir.join("run.log"), &run.trace)?;
    }
    write_json(&out_dir.join("report.json"), &run.report)?;
    let r = &run.report;
    let summary = match r.status.as_str() {
        "certificate" => format!(
            "certificate: I(u1) = {:.6e} < 0 < c = {:.6e}, residuals {:.2e} / {:.2e}",
            r.i_u1.unwrap_or(f64::NAN),
            r.j_u2.unwrap_or(f64::NAN),
            r.residual_u1.unwrap_or(f64::NAN),
            r.residual_u2_full.unwrap_or(f64::NAN)
        ),
        s => format!("{s}: {}", r.message.clone().unwrap_or_default()),
    };
    Ok(CommandOutcome { status: run.status, summary, out_dir })
}

// ---------------------------------------------------------------- sweep

/// Rows of a sweep plus the optional λ* bisection.
#[derive(Debug, Clone)]
pub struct SweepRun {
    pub report: SweepReport,
    pub status: ExitStatus,
}

/// Sweeps λ upward, warm-starting each minimization from the nontrivial
/// minimizers found at smaller λ, and runs the mountain pass wherever the
/// minimum is negative.
pub fn sweep_run(cfg: &RunConfig, seed: u64) -> Result<SweepRun> {
    let spec = cfg.sweep.clone().ok_or_else(|| Error::Config("missing `sweep.*` keys".into()))?;
    let template = cfg.params(spec.lo)?;
    let mesh = cfg.build_mesh()?;
    let mut rows = Vec::new();
    let mut warm: Vec<Field> = Vec::new();
    for lambda in spec.lambdas() {
        let prm = template.with_lambda(lambda)?;
        let run = solve_at(cfg, &prm, &mesh, &warm, seed, false);
        let min_i = run.report.i_u1.unwrap_or(f64::NAN);
        if min_i < -EPS_NEG {
            if let Some(u1) = &run.u1 {
                warm = vec![u1.clone()];
            }
        }
        rows.push(SweepRow { lambda, min_i, c: run.report.j_u2, certificate: run.report.certificate });
    }
    let flags: Vec<bool> = rows.iter().map(|r| r.min_i < -EPS_NEG).collect();
    let indicator_monotone = flags.windows(2).all(|w| w[0] <= w[1]);
    let min_i_nonincreasing = rows.windows(2).all(|w| w[1].min_i <= w[0].min_i);
    let mut report = SweepReport {
        command: "sweep".into(),
        status: "ok".into(),
        message: None,
        seed,
        phi: cfg.phi,
        p: cfg.p,
        q: cfg.q,
        mesh: mesh_summary(&mesh),
        rows,
        indicator_monotone,
        min_i_nonincreasing,
        lambda_star_est: None,
        bisection: None,
        wall_time: None,
    };
    if rows_failed(&report) {
        report.status = "no_convergence".into();
        report.message = Some("a minimization failed; its row has min_I = NaN".into());
        return Ok(SweepRun { report, status: ExitStatus::Failure });
    }
    if !indicator_monotone {
        report.status = "bracket_invalid".into();
        report.message = Some("indicator min I < -1e-6 is not monotone across the sweep".into());
        return Ok(SweepRun { report, status: ExitStatus::ConfigError });
    }
    if let Some(tol) = spec.bisect {
        let last_false = report.rows.iter().rev().find(|r| r.min_i >= -EPS_NEG).map(|r| r.lambda);
        let first_true = report.rows.iter().find(|r| r.min_i < -EPS_NEG).map(|r| r.lambda);
        let result = match (last_false, first_true) {
            (Some(lo), Some(hi)) => find_lambda_star(&template, &mesh, lo, hi, tol, &cfg.solver_options(), seed),
            _ => Err(Error::BracketInvalid("the sweep does not cross the threshold".into())),
        };
        match result {
            Ok(ls) => {
                report.lambda_star_est = Some(ls.lambda);
                report.bisection = Some(ls);
            }
            Err(e @ Error::BracketInvalid(_)) => {
                report.status = "bracket_invalid".into();
                report.message = Some(e.to_string());
                return Ok(SweepRun { report, status: ExitStatus::ConfigError });
            }
            Err(e) => {
                report.status = "no_convergence".into();
                report.message = Some(e.to_string());
                return Ok(SweepRun { report, status: ExitStatus::Failure });
            }
        }
    }
    Ok(SweepRun { report, status: ExitStatus::Ok })
}

fn rows_failed(rep: &SweepReport) -> bool {
    rep.rows.iter().any(|r| r.min_i.is_nan())
}

/// Writes `sweep.csv` (lambda, min_I, c, certificate) and `report.json`.
pub fn cmd_sweep(cfg: &RunConfig, opts: &RunOptions) -> Result<CommandOutcome> {
    let start = Instant::now();
    let mut run = sweep_run(cfg, opts.seed(cfg))?;
    run.report.wall_time = opts.wall_time(start);
    let out_dir = opts.out_dir(cfg);
    fs::create_dir_all(&out_dir)?;
    let mut w = csv::Writer::from_path(out_dir.join("sweep.csv"))?;
    w.write_record(["lambda", "min_I", "c", "certificate"])?;
    for r in &run.report.rows {
        w.write_record([
            r.lambda.to_string(),
            r.min_i.to_string(),
            r.c.map(|c| c.to_string()).unwrap_or_default(),
            r.certificate.to_string(),
        ])?;
    }
    w.flush()?;
    write_json(&out_dir.join("report.json"), &run.report)?;
    let summary = match run.report.lambda_star_est {
        Some(l) => format!("{} rows, lambda* ≈ {l}", run.report.rows.len()),
        None => format!("{} rows, {}", run.report.rows.len(), run.report.message.clone().unwrap_or_else(|| "ok".into())),
    };
    Ok(CommandOutcome { status: run.status, summary, out_dir })
}

// ---------------------------------------------------------------- verify

/// A smooth random field, positive inside the domain.
pub fn smooth_positive_field(mesh: &Arc<Mesh>, amp: f64, rng: &mut ChaCha8Rng) -> Field {
    let cx: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let cy: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let dim = mesh.dim();
    Field::from_fn(mesh, |x| {
        let pi = std::f64::consts::PI;
        let wx: f64 = cx.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * pi * x[0]).cos()).sum();
        let mut v = (pi * x[0]).sin() * wx.exp();
        if dim == 2 {
            let wy: f64 = cy.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * pi * x[1]).cos()).sum();
            v *= (pi * x[1]).sin() * wy.exp();
        }
        amp * v
    })
}

/// Largest relative error between ⟨E'(u), v⟩ and the central difference
/// (E(u + hv) - E(u - hv)) / 2h.
pub fn directional_fd_error<R: Reaction>(f: &Functional<'_, R>, u: &[f64], v: &[f64], h: f64) -> f64 {
    let plus: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + h * b).collect();
    let minus: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - h * b).collect();
    let fd = (f.energy(&plus) - f.energy(&minus)) / (2.0 * h);
    let an: f64 = f.gradient(u).iter().zip(v).map(|(a, b)| a * b).sum();
    (fd - an).abs() / an.abs().max(f64::MIN_POSITIVE)
}

fn min_over<I: Iterator<Item = f64>>(it: I) -> f64 {
    it.fold(f64::INFINITY, f64::min)
}

/// Runs the property suites with randomized inputs drawn from `seed`.
pub fn verify_run(cfg: &RunConfig, seed: u64) -> Result<VerifyReport> {
    let pair: Arc<YoungPair> = cfg.pair()?;
    let idx = pair.indices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut props = Vec::new();

    let n = 10_000;
    let young = min_over((0..n).map(|_| {
        let s = 10f64.powf(rng.gen_range(-2.0..2.0));
        let t = 10f64.powf(rng.gen_range(-2.0..2.0));
        young_gap(&pair, s, t)
    }));
    props.push(Property::new("young_gap", n, young, -1e-8));

    let grid = log_grid(1e-6, 1e6, 1000);
    let bound = 2f64.powf(idx.upper) + 1e-6;
    props.push(Property::new("delta2_ratio", grid.len(), bound - delta2_ratio(&pair, &grid), 0.0));
    props.push(Property::new("sqrt_convexity", grid.len(), sqrt_convexity_slack(&pair, &grid), -1e-8));

    let conv = min_over((0..n).map(|_| convexity_gap(&pair, rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))));
    props.push(Property::new("convexity_gap", n, conv, -1e-8));

    let mesh1 = Mesh::interval(64)?;
    for (name, lo, hi) in [("sandwich_norm_below_1", 0.1, 0.9), ("sandwich_norm_above_1", 1.1, 10.0)] {
        let slack = min_over((0..100).map(|_| {
            let v = smooth_positive_field(&mesh1, 1.0, &mut rng);
            let target = rng.gen_range(lo..hi);
            let u = v.scaled(target / crate::fem::orlicz_norm(&v, &pair));
            norm_modular_sandwich(&u, &pair).relative_slack
        }));
        props.push(Property::new(name, 100, slack, -1e-3));
    }

    let flux = flux_monotonicity_check(&pair, 100_000, rng.gen());
    props.push(Property::new("flux_monotonicity", flux.trials, flux.min_gap, -1e-10));
    props.push(Property::new("flux_equality_only_at_diagonal", flux.trials, -(flux.degenerate_pairs as f64), 0.0));

    let mesh = cfg.build_mesh()?;
    let lambda1 = lambda1_estimate(&pair, &mesh, 3, rng.gen())?;
    props.push(Property::new("lambda1_positive", 1, lambda1, f64::MIN_POSITIVE));

    let mut fitted = None;
    if let Some(lambda) = cfg.lambda {
        let prm = cfg.params(lambda)?;
        let (u1, _) = minimize_multistart(&prm, &mesh, &[], &cfg.solver_options(), seed)?;
        props.push(Property::new("nonnegativity_u1", 1, u1.min_value(), -1e-8));
        let tr = Truncation::new(u1.clone(), &prm);
        let amp = u1.max_value().max(1.0);
        let (fi, fj) = (prm.functional(&mesh), tr.functional(&prm));
        let mut worst_i: f64 = 0.0;
        let mut worst_j: f64 = 0.0;
        for _ in 0..20 {
            let u = smooth_positive_field(&mesh, amp, &mut rng);
            let v = smooth_positive_field(&mesh, amp, &mut rng);
            worst_i = worst_i.max(directional_fd_error(&fi, u.coeffs(), v.coeffs(), 1e-5));
            worst_j = worst_j.max(directional_fd_error(&fj, u.coeffs(), v.coeffs(), 1e-5));
        }
        props.push(Property::new("gradient_fd_i", 20, 1e-6 - worst_i, 0.0));
        props.push(Property::new("gradient_fd_j", 20, 1e-6 - worst_j, 0.0));
        let agree = (0..20)
            .map(|_| {
                let c = u1.coeffs().iter().map(|v| v * rng.gen::<f64>()).collect();
                energy_agreement(&Field::new(&mesh, c).expect("scaled minimizer"), &tr, &prm)
            })
            .fold(0.0f64, |m, a| m.max(a.energy_gap).max(a.gradient_gap));
        props.push(Property::new("j_equals_i_on_order_interval", 20, 1e-10 - agree, 0.0));
        let coer = coercivity_probe(&prm, &tr, &mesh, 10, rng.gen());
        props.push(Property::new("j_coercive_ladder", 10, if coer.j_monotone { 0.0 } else { -1.0 }, 0.0));
        fitted = Some(coer.fitted_c);
    }

    let all_pass = props.iter().all(|p| p.pass);
    Ok(VerifyReport {
        command: "verify".into(),
        seed,
        phi: cfg.phi,
        indices: idx,
        properties: props,
        fitted_coercivity_constant: fitted,
        lambda1_estimate: lambda1,
        all_pass,
        wall_time: None,
    })
}

/// Writes `verify.json`; exits with [`ExitStatus::Failure`] when any
/// property fails.
pub fn cmd_verify(cfg: &RunConfig, opts: &RunOptions) -> Result<CommandOutcome> {
    let start = Instant::now();
    let mut rep = verify_run(cfg, opts.seed(cfg))?;
    rep.wall_time = opts.wall_time(start);
    let out_dir = opts.out_dir(cfg);
    fs::create_dir_all(&out_dir)?;
    write_json(&out_dir.join("verify.json"), &rep)?;
    let failed: Vec<&str> = rep.properties.iter().filter(|p| !p.pass).map(|p| p.name.as_str()).collect();
    let (status, summary) = if failed.is_empty() {
        (ExitStatus::Ok, format!("{} properties pass", rep.properties.len()))
    } else {
        (ExitStatus::Failure, format!("failed: {}", failed.join(", ")))
    };
    Ok(CommandOutcome { status, summary, out_dir })
}
