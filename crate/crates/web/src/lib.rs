//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function takes plain numbers, runs on a 1D mesh and returns
//! a JSON string. The `*_json` functions are the native versions used by the
//! bindings and the tests.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use orlicz_mp::harness::{solve_run, sweep_run, RunConfig};
use orlicz_mp::{PhiSpec, YoungPair};

fn phi_toml(family: &str, p_phi: f64, s: f64) -> Result<String, String> {
    match family {
        "power" | "power_over_log" => Ok(format!("phi.family = \"{family}\"\nphi.p = {p_phi:?}\n")),
        "log_power" => Ok(format!("phi.family = \"log_power\"\nphi.p = {p_phi:?}\nphi.s = {s:?}\n")),
        other => Err(format!("unknown family `{other}`")),
    }
}

fn spec(family: &str, p_phi: f64, s: f64) -> Result<PhiSpec, String> {
    match family {
        "power" => PhiSpec::power(p_phi),
        "log_power" => PhiSpec::log_power(p_phi, s),
        "power_over_log" => PhiSpec::power_over_log(p_phi),
        other => return Err(format!("unknown family `{other}`")),
    }
    .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct IndexCurve {
    ln_t: Vec<f64>,
    ratio: Vec<f64>,
    lower: f64,
    upper: f64,
    closed_form: (f64, f64),
}

/// tφ(t)/Φ(t) on a grid of ln t in [-lmax, lmax], with the index estimates.
pub fn index_curve_json(family: &str, p_phi: f64, s: f64, lmax: f64, n: usize) -> Result<String, String> {
    let spec = spec(family, p_phi, s)?;
    let pair = YoungPair::new(spec).map_err(|e| e.to_string())?;
    let n = n.clamp(2, 4000);
    let ln_t: Vec<f64> = (0..n).map(|i| -lmax + 2.0 * lmax * i as f64 / (n - 1) as f64).collect();
    let ratio = ln_t.iter().map(|&l| pair.index_ratio_log(l)).collect();
    let idx = pair.indices();
    let curve = IndexCurve { ln_t, ratio, lower: idx.lower, upper: idx.upper, closed_form: spec.closed_form_indices() };
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SolveView {
    status: String,
    message: Option<String>,
    x: Vec<f64>,
    u1: Option<Vec<f64>>,
    u2: Option<Vec<f64>>,
    i_u1: Option<f64>,
    c: Option<f64>,
    residual_u1: Option<f64>,
    residual_u2: Option<f64>,
    path_t: Vec<f64>,
    path_energies: Vec<f64>,
    certificate: bool,
}

#[allow(clippy::too_many_arguments)]
fn config(family: &str, p_phi: f64, s: f64, p: f64, q: f64, n: usize, seed: u64, tail: &str) -> Result<RunConfig, String> {
    let text = format!(
        "{}p = {p:?}\nq = {q:?}\nmesh.dim = 1\nmesh.n = {}\nsolver.seed = {seed}\n{tail}",
        phi_toml(family, p_phi, s)?,
        n.clamp(4, 2000)
    );
    RunConfig::from_toml_str(&text).map_err(|e| e.to_string())
}

/// u₁, u₂ and the final mountain-pass path at one λ on (0, 1).
#[allow(clippy::too_many_arguments)]
pub fn solve_json(family: &str, p_phi: f64, s: f64, p: f64, q: f64, lambda: f64, n: usize, seed: u64) -> Result<String, String> {
    let cfg = config(family, p_phi, s, p, q, n, seed, &format!("lambda = {lambda:?}\n"))?;
    let mesh = cfg.build_mesh().map_err(|e| e.to_string())?;
    let run = solve_run(&cfg, seed, false).map_err(|e| e.to_string())?;
    let r = run.report;
    let (path_t, path_energies) = run.mountain_pass.map(|m| (m.path_t, m.path_energies)).unwrap_or_default();
    let view = SolveView {
        status: r.status,
        message: r.message,
        x: mesh.nodes().iter().map(|x| x[0]).collect(),
        u1: run.u1.map(|u| u.into_coeffs()),
        u2: run.u2.map(|u| u.into_coeffs()),
        i_u1: r.i_u1,
        c: r.j_u2,
        residual_u1: r.residual_u1,
        residual_u2: r.residual_u2_full,
        path_t,
        path_energies,
        certificate: r.certificate,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Sweep report over `count` values of λ in [lo, hi], bisecting for λ* to
/// `bisect` when it is positive.
#[allow(clippy::too_many_arguments)]
pub fn sweep_json(
    family: &str,
    p_phi: f64,
    s: f64,
    p: f64,
    q: f64,
    lo: f64,
    hi: f64,
    count: usize,
    bisect: f64,
    n: usize,
    seed: u64,
) -> Result<String, String> {
    let mut tail = format!("sweep.lo = {lo:?}\nsweep.hi = {hi:?}\nsweep.count = {}\n", count.clamp(2, 64));
    if bisect > 0.0 {
        tail.push_str(&format!("sweep.bisect = {bisect:?}\n"));
    }
    let cfg = config(family, p_phi, s, p, q, n, seed, &tail)?;
    let run = sweep_run(&cfg, seed).map_err(|e| e.to_string())?;
    serde_json::to_string(&run.report).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn index_curve(family: &str, p_phi: f64, s: f64, lmax: f64, n: usize) -> Result<String, JsValue> {
    index_curve_json(family, p_phi, s, lmax, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn solve(family: &str, p_phi: f64, s: f64, p: f64, q: f64, lambda: f64, n: usize, seed: u32) -> Result<String, JsValue> {
    solve_json(family, p_phi, s, p, q, lambda, n, seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    family: &str,
    p_phi: f64,
    s: f64,
    p: f64,
    q: f64,
    lo: f64,
    hi: f64,
    count: usize,
    bisect: f64,
    n: usize,
    seed: u32,
) -> Result<String, JsValue> {
    sweep_json(family, p_phi, s, p, q, lo, hi, count, bisect, n, seed.into()).map_err(|e| JsValue::from_str(&e))
}
