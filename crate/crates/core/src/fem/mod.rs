//! P1 discretization: meshes, fields, energy assembly and field norms.

mod assembly;
mod field;
mod mesh;
mod params;

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

pub use assembly::{stiffness_matrix, sup_norm, Functional, NoReaction, PowerReaction, Reaction};
pub use field::Field;
pub use mesh::{Mesh, QuadPoint};
pub use params::{GrowthCondition, ProblemParams};

use crate::error::Result;
use crate::orlicz::{luxemburg_norm, YoungPair};
use crate::solver::Truncation;

/// I₀(u) = ∫ Φ(|∇u|).
pub fn modular(u: &Field, pair: &YoungPair) -> f64 {
    Functional::new(u.mesh(), pair, 0.0, NoReaction).modular(u.coeffs())
}

/// I(u) = ∫Φ(|∇u|) - (λ/p)∫u₊^p + (λ/q)∫u₊^q.
pub fn assemble_energy_i(u: &Field, prm: &ProblemParams) -> f64 {
    prm.functional(u.mesh()).energy(u.coeffs())
}

/// Nodal residual rᵢ = ⟨I'(u), φᵢ⟩, zero on boundary nodes.
pub fn assemble_gradient_i(u: &Field, prm: &ProblemParams) -> Vec<f64> {
    prm.functional(u.mesh()).gradient(u.coeffs())
}

/// Which right-hand side the weak residual is taken against.
#[derive(Debug, Clone, Copy)]
pub enum RhsMode<'a> {
    /// λ(u₊^{p-1} - u₊^{q-1}).
    FullProblem,
    /// λ g(x, u) of the truncation at u₁.
    Truncated(&'a Truncation),
}

/// max over interior basis functions v of |⟨E'(u), v⟩|.
pub fn weak_residual_norm(u: &Field, prm: &ProblemParams, mode: RhsMode<'_>) -> f64 {
    let r = match mode {
        RhsMode::FullProblem => assemble_gradient_i(u, prm),
        RhsMode::Truncated(tr) => tr.functional(prm).gradient(u.coeffs()),
    };
    sup_norm(&r)
}

/// Norms reported for a field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldNorms {
    /// ‖u‖ = ‖|∇u|‖_Φ.
    pub luxemburg_of_gradient: f64,
    /// ∫ Φ(|∇u|).
    pub modular: f64,
    /// ‖u‖_{L^r} keyed by `L^r`.
    pub lp_norms: BTreeMap<String, f64>,
}

/// Gradient samples (|∇u| on each element, element measure).
pub fn gradient_samples(u: &Field) -> Vec<(f64, f64)> {
    let mesh = u.mesh();
    u.gradients()
        .iter()
        .enumerate()
        .map(|(e, g)| (g[0].hypot(g[1]), mesh.element_measure(e)))
        .collect()
}

/// ‖u‖ of W₀¹L_Φ: the Luxemburg norm of |∇u|.
pub fn orlicz_norm(u: &Field, pair: &YoungPair) -> f64 {
    luxemburg_norm(pair, &gradient_samples(u))
}

/// Luxemburg norm of |∇u|, the modular, and L^r norms for each exponent.
pub fn field_norms(u: &Field, pair: &YoungPair, exponents: &[f64]) -> FieldNorms {
    let lp_norms = exponents.iter().map(|&r| (format!("L^{r}"), u.lp_norm(r))).collect();
    FieldNorms { luxemburg_of_gradient: orlicz_norm(u, pair), modular: modular(u, pair), lp_norms }
}

/// Exponent sandwich between the modular and the norm ‖u‖ = ‖|∇u|‖_Φ:
///
/// ```text
///   ‖u‖ < 1:  ‖u‖^{φ⁰} ≤ ∫Φ(|∇u|) ≤ ‖u‖^{φ₀}
///   ‖u‖ > 1:  ‖u‖^{φ₀} ≤ ∫Φ(|∇u|) ≤ ‖u‖^{φ⁰}
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sandwich {
    pub norm: f64,
    pub modular: f64,
    pub lower: f64,
    pub upper: f64,
    /// min(modular - lower, upper - modular) / modular.
    pub relative_slack: f64,
}

pub fn norm_modular_sandwich(u: &Field, pair: &YoungPair) -> Sandwich {
    let norm = orlicz_norm(u, pair);
    let m = modular(u, pair);
    let idx = pair.indices();
    let (a, b) = (norm.powf(idx.upper), norm.powf(idx.lower));
    let (lower, upper) = if norm < 1.0 { (a, b) } else { (b, a) };
    let relative_slack = (m - lower).min(upper - m) / m.max(f64::MIN_POSITIVE);
    Sandwich { norm, modular: m, lower, upper, relative_slack }
}

/// Writes `node_id,x[,y],u`.
pub fn write_field_csv<W: Write>(u: &Field, out: W) -> Result<()> {
    let mesh = u.mesh();
    let mut w = csv::Writer::from_writer(out);
    if mesh.dim() == 1 {
        w.write_record(["node_id", "x", "u"])?;
    } else {
        w.write_record(["node_id", "x", "y", "u"])?;
    }
    for (i, (p, v)) in mesh.nodes().iter().zip(u.coeffs()).enumerate() {
        let mut rec = vec![i.to_string(), p[0].to_string()];
        if mesh.dim() == 2 {
            rec.push(p[1].to_string());
        }
        rec.push(v.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the node table `node_id,x[,y],boundary`.
pub fn write_mesh_nodes_csv<W: Write>(mesh: &Mesh, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: &[&str] = if mesh.dim() == 1 { &["node_id", "x", "boundary"] } else { &["node_id", "x", "y", "boundary"] };
    w.write_record(header)?;
    for (i, p) in mesh.nodes().iter().enumerate() {
        let mut rec = vec![i.to_string(), p[0].to_string()];
        if mesh.dim() == 2 {
            rec.push(p[1].to_string());
        }
        rec.push(u8::from(mesh.is_boundary(i)).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the element table `elem_id,n0,n1[,n2]`.
pub fn write_mesh_elements_csv<W: Write>(mesh: &Mesh, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: &[&str] = if mesh.dim() == 1 { &["elem_id", "n0", "n1"] } else { &["elem_id", "n0", "n1", "n2"] };
    w.write_record(header)?;
    for e in 0..mesh.n_elements() {
        let mut rec = vec![e.to_string()];
        rec.extend(mesh.element(e).iter().map(|n| n.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::PhiSpec;
    use std::sync::Arc;

    fn power2() -> Arc<YoungPair> {
        Arc::new(YoungPair::new(PhiSpec::power(2.0).unwrap()).unwrap())
    }

    #[test]
    fn modular_examples() {
        let m = Mesh::interval(2).unwrap();
        let pair = power2();
        assert_eq!(modular(&Field::zeros(&m), &pair), 0.0);
        let hat = Field::new(&m, vec![0.0, 1.0, 0.0]).unwrap();
        assert!((modular(&hat, &pair) - 4.0).abs() < 1e-14);
        let p3 = YoungPair::new(PhiSpec::power(3.0).unwrap()).unwrap();
        let m8 = Mesh::interval(8).unwrap();
        let u = Field::from_fn(&m8, |x| x[0] * (1.0 - x[0]));
        let c = 2.5;
        assert!((modular(&u.scaled(c), &p3) - c.powi(3) * modular(&u, &p3)).abs() < 1e-12);
    }

    #[test]
    fn field_norm_examples() {
        let m = Mesh::interval(2).unwrap();
        let pair = power2();
        let z = field_norms(&Field::zeros(&m), &pair, &[2.0]);
        assert_eq!(z.luxemburg_of_gradient, 0.0);
        assert_eq!(z.modular, 0.0);
        assert_eq!(z.lp_norms["L^2"], 0.0);
        let hat = Field::new(&m, vec![0.0, 1.0, 0.0]).unwrap();
        let n = field_norms(&hat, &pair, &[2.0, 1.5]);
        assert!((n.luxemburg_of_gradient - 2.0).abs() < 1e-14);
        let n3 = field_norms(&hat.scaled(-3.0), &pair, &[2.0, 1.5]);
        assert!((n3.luxemburg_of_gradient - 3.0 * n.luxemburg_of_gradient).abs() < 1e-8);
        for (k, v) in &n.lp_norms {
            assert!((n3.lp_norms[k] - 3.0 * v).abs() < 1e-8);
        }
    }

    #[test]
    fn csv_headers() {
        let m = Mesh::interval(2).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&Field::new(&m, vec![0.0, 1.5, 0.0]).unwrap(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "node_id,x,u\n0,0,0\n1,0.5,1.5\n2,1,0\n");
        let m2 = Mesh::rectangle(2, 2).unwrap();
        let mut buf = Vec::new();
        write_mesh_elements_csv(&m2, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("elem_id,n0,n1,n2\n0,0,1,4\n"));
        let mut buf = Vec::new();
        write_mesh_nodes_csv(&m2, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("node_id,x,y,boundary\n0,0,0,1\n"));
    }
}
