use std::sync::Arc;

use super::mesh::Mesh;
use crate::error::{Error, Result};

/// Nodal P1 coefficients over a mesh, zero on the boundary.
#[derive(Clone)]
pub struct Field {
    mesh: Arc<Mesh>,
    coeffs: Vec<f64>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("dim", &self.mesh.dim())
            .field("n_nodes", &self.mesh.n_nodes())
            .field("min", &self.min_value())
            .field("max", &self.max_value())
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.mesh, &other.mesh) || self.mesh == other.mesh) && self.coeffs == other.coeffs
    }
}

impl Field {
    pub fn zeros(mesh: &Arc<Mesh>) -> Self {
        Self { mesh: Arc::clone(mesh), coeffs: vec![0.0; mesh.n_nodes()] }
    }

    /// Wraps nodal values; rejects wrong lengths and nonzero boundary values.
    pub fn new(mesh: &Arc<Mesh>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.n_nodes() {
            return Err(Error::InvalidParameter(format!(
                "field has {} coefficients, mesh has {} nodes",
                coeffs.len(),
                mesh.n_nodes()
            )));
        }
        if let Some(i) = mesh.boundary_nodes().into_iter().find(|&i| coeffs[i] != 0.0) {
            return Err(Error::InvalidParameter(format!("boundary node {i} carries {}", coeffs[i])));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(Self { mesh: Arc::clone(mesh), coeffs })
    }

    /// Interpolates `f` at interior nodes; boundary nodes are set to zero.
    pub fn from_fn(mesh: &Arc<Mesh>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let coeffs = mesh
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &x)| if mesh.is_boundary(i) { 0.0 } else { f(x) })
            .collect();
        Self { mesh: Arc::clone(mesh), coeffs }
    }

    // Internal constructor for vectors produced by assembly/solvers, whose
    // boundary entries are zero by construction.
    pub(crate) fn from_raw(mesh: &Arc<Mesh>, mut coeffs: Vec<f64>) -> Self {
        for i in mesh.boundary_nodes() {
            coeffs[i] = 0.0;
        }
        Self { mesh: Arc::clone(mesh), coeffs }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { mesh: Arc::clone(&self.mesh), coeffs: self.coeffs.iter().map(|v| c * v).collect() }
    }

    /// self + c·other.
    pub fn axpy(&self, c: f64, other: &Field) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + c * b).collect();
        Self { mesh: Arc::clone(&self.mesh), coeffs }
    }

    /// (1-t)·self + t·other.
    pub fn lerp(&self, other: &Field, t: f64) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (1.0 - t) * a + t * b).collect();
        Self { mesh: Arc::clone(&self.mesh), coeffs }
    }

    /// Values of the interpolant at every quadrature point, in mesh order.
    pub fn quad_values(&self) -> Vec<f64> {
        quad_values(&self.mesh, &self.coeffs)
    }

    /// Element-wise constant gradients.
    pub fn gradients(&self) -> Vec<[f64; 2]> {
        gradients(&self.mesh, &self.coeffs)
    }

    /// (∫|u|^r)^{1/r} by quadrature.
    pub fn lp_norm(&self, r: f64) -> f64 {
        let m = &self.mesh;
        let vals = self.quad_values();
        let mut acc = 0.0;
        for e in 0..m.n_elements() {
            let off = m.quad_offset(e);
            for (k, q) in m.quad_points(e).iter().enumerate() {
                acc += q.weight * vals[off + k].abs().powf(r);
            }
        }
        acc.powf(1.0 / r)
    }

    pub fn l2_distance(&self, other: &Field) -> f64 {
        self.axpy(-1.0, other).lp_norm(2.0)
    }

    pub fn min_value(&self) -> f64 {
        self.coeffs.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.coeffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn quad_values(mesh: &Mesh, c: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(mesh.n_quad());
    for e in 0..mesh.n_elements() {
        let el = mesh.element(e);
        for q in mesh.quad_points(e) {
            out.push(el.iter().zip(q.shape).map(|(&n, s)| s * c[n]).sum());
        }
    }
    out
}

pub(crate) fn gradients(mesh: &Mesh, c: &[f64]) -> Vec<[f64; 2]> {
    (0..mesh.n_elements())
        .map(|e| {
            let mut g = [0.0, 0.0];
            for (&n, dg) in mesh.element(e).iter().zip(mesh.shape_gradients(e)) {
                g[0] += c[n] * dg[0];
                g[1] += c[n] * dg[1];
            }
            g
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_values_are_rejected() {
        let m = Mesh::interval(4).unwrap();
        assert!(Field::new(&m, vec![1.0, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(Field::new(&m, vec![0.0; 3]).is_err());
        assert!(Field::new(&m, vec![0.0, 1.0, 2.0, 1.0, 0.0]).is_ok());
    }

    #[test]
    fn from_fn_zeroes_boundary() {
        let m = Mesh::rectangle(3, 3).unwrap();
        let f = Field::from_fn(&m, |_| 1.0);
        for i in m.boundary_nodes() {
            assert_eq!(f.coeffs()[i], 0.0);
        }
    }

    #[test]
    fn hat_gradients() {
        let m = Mesh::interval(2).unwrap();
        let u = Field::new(&m, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(u.gradients(), vec![[2.0, 0.0], [-2.0, 0.0]]);
        // ∫ hat² = 1/3
        assert!((u.lp_norm(2.0).powi(2) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn linear_field_has_constant_gradient_2d() {
        let m = Mesh::rectangle(4, 4).unwrap();
        let raw: Vec<f64> = m.nodes().iter().map(|p| 2.0 * p[0] - p[1]).collect();
        for v in gradients(&m, &raw) {
            assert!((v[0] - 2.0).abs() < 1e-12 && (v[1] + 1.0).abs() < 1e-12);
        }
    }
}
