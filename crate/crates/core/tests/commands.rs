use orlicz_mp::harness::{indices_run, solve_run, sweep_run, verify_run, ExitStatus, RunConfig};

fn config(extra: &str) -> RunConfig {
    let text = format!(
        "phi.family = \"power\"\nphi.p = 3.0\np = 2.5\nq = 1.5\nmesh.dim = 1\nmesh.n = 120\nsolver.seed = 5\n{extra}"
    );
    RunConfig::from_toml_str(&text).unwrap()
}

#[test]
fn small_lambda_is_sub_threshold() {
    let run = solve_run(&config("lambda = 50.0"), 5, false).unwrap();
    assert_eq!(run.status, ExitStatus::SubThreshold);
    assert_eq!(run.report.status, "trivial_only");
    assert!(run.u2.is_none());
    assert!(run.report.i_u1.unwrap() >= -1e-6);
}

#[test]
fn large_lambda_gives_a_certificate() {
    let run = solve_run(&config("lambda = 600.0"), 5, true).unwrap();
    assert_eq!(run.status, ExitStatus::Ok, "{:?}", run.report.message);
    let r = &run.report;
    assert!(r.i_u1.unwrap() < 0.0 && r.j_u2.unwrap() > 0.0);
    assert!(r.path_max.unwrap() >= r.j_u2.unwrap() * (1.0 - 1e-6));
    assert!(!run.trace.is_empty());
    let (u1, u2) = (run.u1.unwrap(), run.u2.unwrap());
    assert!(u2.coeffs().iter().zip(u1.coeffs()).all(|(a, b)| *a >= -1e-8 && a <= &(b + 1e-8)));
}

#[test]
fn unit_square_certificate() {
    let text = "phi.family = \"power\"\nphi.p = 3.0\np = 2.5\nq = 1.5\nlambda = 600.0\n\
                mesh.dim = 2\nmesh.nx = 16\nmesh.ny = 16\nsolver.seed = 1\n";
    let run = solve_run(&RunConfig::from_toml_str(text).unwrap(), 1, false).unwrap();
    assert_eq!(run.status, ExitStatus::Ok, "{:?}", run.report.message);
    assert_eq!(run.report.mesh.dim, 2);
}

#[test]
fn sweep_bracket_that_never_crosses_is_rejected() {
    let cfg = config("sweep.lo = 10.0\nsweep.hi = 60.0\nsweep.count = 4\nsweep.bisect = 1.0");
    let run = sweep_run(&cfg, 5).unwrap();
    assert_eq!(run.status, ExitStatus::ConfigError);
    assert_eq!(run.report.status, "bracket_invalid");
    assert!(run.report.rows.iter().all(|r| r.min_i >= -1e-6));
}

#[test]
fn sweep_without_bisection_only_reports_rows() {
    let cfg = config("sweep.lo = 100.0\nsweep.hi = 400.0\nsweep.count = 4");
    let run = sweep_run(&cfg, 5).unwrap();
    assert_eq!(run.status, ExitStatus::Ok);
    assert_eq!(run.report.rows.len(), 4);
    assert!(run.report.lambda_star_est.is_none());
    assert!(run.report.min_i_nonincreasing);
}

#[test]
fn indices_for_log_power() {
    let cfg = RunConfig::from_toml_str(
        "phi.family = \"log_power\"\nphi.p = 3.0\nphi.s = 2.0\np = 2.5\nq = 1.5\nlambda = 300.0\nmesh.dim = 1\nmesh.n = 50\n",
    )
    .unwrap();
    let rep = indices_run(&cfg).unwrap();
    assert!((rep.phi0_lower - 3.0).abs() < 1e-3 && (rep.phi0_upper - 5.0).abs() < 1e-3);
    assert!(rep.delta2_ratio <= rep.delta2_bound);
    assert!(rep.sqrt_convex);
}

#[test]
fn verify_passes_with_lambda() {
    let rep = verify_run(&config("lambda = 400.0"), 9).unwrap();
    let failed: Vec<_> = rep.properties.iter().filter(|p| !p.pass).map(|p| p.name.clone()).collect();
    assert!(rep.all_pass, "failed: {failed:?}");
    assert!(rep.fitted_coercivity_constant.is_some());
}
