//! Run configuration, read from TOML with one dotted key per concept:
//!
//! ```toml
//! phi.family = "power"      # power | log_power | power_over_log
//! phi.p = 3.0
//! p = 2.5
//! q = 1.5
//! lambda = 500.0            # for `solve`
//! sweep.lo = 100.0          # for `sweep`
//! sweep.hi = 400.0
//! sweep.count = 8
//! sweep.bisect = 0.5        # optional bisection tolerance for λ*
//! mesh.dim = 1
//! mesh.n = 200              # mesh.nx, mesh.ny when dim = 2
//! solver.tol = 1e-6
//! solver.max_iter = 500
//! solver.n_path = 21
//! solver.seed = 0
//! output_dir = "out"
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{Mesh, ProblemParams};
use crate::orlicz::{PhiSpec, YoungPair};
use crate::solver::{MountainPassOptions, SolverOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Bisection tolerance; when present the sweep also estimates λ*.
    #[serde(default)]
    pub bisect: Option<f64>,
}

fn default_count() -> usize {
    8
}

impl SweepSpec {
    /// `count` evenly spaced values from `lo` to `hi`.
    pub fn lambdas(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.lo + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub dim: usize,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub nx: Option<usize>,
    #[serde(default)]
    pub ny: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_n_path")]
    pub n_path: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_tol() -> f64 {
    1e-6
}
fn default_max_iter() -> usize {
    500
}
fn default_n_path() -> usize {
    21
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self { tol: default_tol(), max_iter: default_max_iter(), n_path: default_n_path(), seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub phi: PhiSpec,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    pub mesh: MeshSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    /// Dimension N used in the reported growth condition.
    #[serde(default = "default_nominal_dim")]
    pub nominal_dim: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_nominal_dim() -> usize {
    3
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Parses and validates. Errors name the offending line and key.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        if let Err(e) = self.phi.validated() {
            return cfg_err(format!("phi: {e}"));
        }
        match (self.mesh.dim, self.mesh.n, self.mesh.nx, self.mesh.ny) {
            (1, Some(_), None, None) | (2, None, Some(_), Some(_)) => {}
            (1, ..) => return cfg_err("mesh.dim = 1 needs mesh.n (and no mesh.nx/ny)".into()),
            (2, ..) => return cfg_err("mesh.dim = 2 needs mesh.nx and mesh.ny (and no mesh.n)".into()),
            (d, ..) => return cfg_err(format!("mesh.dim = {d}: only 1 and 2 are supported")),
        }
        if !(self.solver.tol > 0.0) {
            return cfg_err(format!("solver.tol = {} must be positive", self.solver.tol));
        }
        if self.solver.n_path < 3 {
            return cfg_err(format!("solver.n_path = {} must be at least 3", self.solver.n_path));
        }
        if let Some(l) = self.lambda {
            if !(l.is_finite() && l >= 0.0) {
                return cfg_err(format!("lambda = {l} must be finite and ≥ 0"));
            }
        }
        if let Some(s) = &self.sweep {
            if !(s.lo >= 0.0 && s.lo < s.hi && s.count >= 1) {
                return cfg_err(format!("sweep: need 0 ≤ lo < hi and count ≥ 1, got {s:?}"));
            }
            if s.bisect.is_some_and(|t| !(t > 0.0)) {
                return cfg_err("sweep.bisect must be positive".into());
            }
        }
        // builds the pair and checks 1 < q < p < φ₀ with the cached indices
        self.params(self.lambda.unwrap_or(0.0)).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn pair(&self) -> Result<Arc<YoungPair>> {
        Ok(Arc::new(YoungPair::new(self.phi)?))
    }

    pub fn params(&self, lambda: f64) -> Result<ProblemParams> {
        Ok(ProblemParams::new(lambda, self.p, self.q, self.pair()?)?.with_nominal_dim(self.nominal_dim))
    }

    /// The fixed λ of a `solve` run.
    pub fn lambda(&self) -> Result<f64> {
        self.lambda.ok_or_else(|| Error::Config("missing key `lambda`".into()))
    }

    pub fn build_mesh(&self) -> Result<Arc<Mesh>> {
        match self.mesh.dim {
            1 => Mesh::interval(self.mesh.n.unwrap_or(0)),
            _ => Mesh::rectangle(self.mesh.nx.unwrap_or(0), self.mesh.ny.unwrap_or(0)),
        }
        .map_err(|e| Error::Config(format!("mesh: {e}")))
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions { tol: self.solver.tol, max_iter: self.solver.max_iter, ..Default::default() }
    }

    pub fn mountain_pass_options(&self) -> MountainPassOptions {
        MountainPassOptions {
            n_path: self.solver.n_path,
            tol: self.solver.tol,
            max_iter: self.solver.max_iter.max(1),
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
phi.family = "power"
phi.p = 3.0
p = 2.5
q = 1.5
lambda = 400.0
mesh.dim = 1
mesh.n = 50
"#;

    #[test]
    fn parses_dotted_keys_with_defaults() {
        let cfg = RunConfig::from_toml_str(BASIC).unwrap();
        assert_eq!(cfg.phi, PhiSpec::Power { p: 3.0 });
        assert_eq!(cfg.solver, SolverSpec::default());
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        assert_eq!(cfg.build_mesh().unwrap().n_nodes(), 51);
    }

    #[test]
    fn unknown_key_is_named_with_its_line() {
        let text = format!("{BASIC}solver.tolerance = 1e-6\n");
        let msg = RunConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(msg.contains("tolerance") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn exponent_condition_is_checked() {
        let text = BASIC.replace("p = 2.5", "p = 3.5");
        assert!(matches!(RunConfig::from_toml_str(&text), Err(Error::Config(_))));
    }

    #[test]
    fn mesh_keys_must_match_dimension() {
        let text = BASIC.replace("mesh.dim = 1", "mesh.dim = 2");
        assert!(RunConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn sweep_grid() {
        let s = SweepSpec { lo: 1.0, hi: 2.0, count: 5, bisect: None };
        assert_eq!(s.lambdas(), vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    }
}
