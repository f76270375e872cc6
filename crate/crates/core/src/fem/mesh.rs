use std::sync::Arc;

use crate::error::{Error, Result};

/// A quadrature point with its weight (already scaled by the element
/// measure) and the values of the element's P1 shape functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub weight: f64,
    pub shape: [f64; 3],
    pub x: [f64; 2],
}

/// P1 mesh of (0,1) or of the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    nodes: Vec<[f64; 2]>,
    // 1D elements use the first two slots
    elements: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    elem_measure: Vec<f64>,
    // gradients of the local shape functions, constant per element
    elem_grad: Vec<[[f64; 2]; 3]>,
    quad: Vec<QuadPoint>,
    quad_per_elem: usize,
    measure: f64,
    bandwidth: usize,
}

// 3-point Gauss-Legendre on [0,1], exact to degree 5.
const GAUSS3_X: [f64; 3] = [0.112_701_665_379_258_3, 0.5, 0.887_298_334_620_741_7];
const GAUSS3_W: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

// Strang-Fix 6-point rule on triangles, exact to degree 4.
const TRI6_A: f64 = 0.445_948_490_915_965;
const TRI6_WA: f64 = 0.223_381_589_678_011;
const TRI6_B: f64 = 0.091_576_213_509_771;
const TRI6_WB: f64 = 0.109_951_743_655_322;

impl Mesh {
    /// Uniform mesh of (0,1) with `n_elems` segments.
    pub fn interval(n_elems: usize) -> Result<Arc<Self>> {
        if n_elems < 2 {
            return Err(Error::InvalidParameter(format!("1D mesh needs at least 2 elements, got {n_elems}")));
        }
        let h = 1.0 / n_elems as f64;
        let nodes: Vec<[f64; 2]> = (0..=n_elems).map(|i| [i as f64 * h, 0.0]).collect();
        let elements: Vec<[usize; 3]> = (0..n_elems).map(|e| [e, e + 1, usize::MAX]).collect();
        let mut boundary = vec![false; n_elems + 1];
        boundary[0] = true;
        boundary[n_elems] = true;

        let mut elem_measure = Vec::with_capacity(n_elems);
        let mut elem_grad = Vec::with_capacity(n_elems);
        let mut quad = Vec::with_capacity(3 * n_elems);
        for el in &elements {
            let (x0, x1) = (nodes[el[0]][0], nodes[el[1]][0]);
            let len = x1 - x0;
            elem_measure.push(len);
            elem_grad.push([[-1.0 / len, 0.0], [1.0 / len, 0.0], [0.0, 0.0]]);
            for (xi, w) in GAUSS3_X.iter().zip(GAUSS3_W) {
                quad.push(QuadPoint { weight: w * len, shape: [1.0 - xi, *xi, 0.0], x: [x0 + xi * len, 0.0] });
            }
        }
        Ok(Arc::new(Self::finish(1, nodes, elements, boundary, elem_measure, elem_grad, quad, 3, 1)))
    }

    /// Unit square split into `nx × ny` cells, two right triangles per cell.
    pub fn rectangle(nx: usize, ny: usize) -> Result<Arc<Self>> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidParameter(format!("2D mesh needs nx, ny ≥ 2, got ({nx}, {ny})")));
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        let mut boundary = Vec::with_capacity(nodes.capacity());
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([i as f64 / nx as f64, j as f64 / ny as f64]);
                boundary.push(i == 0 || j == 0 || i == nx || j == ny);
            }
        }
        let mut elements = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                elements.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                elements.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mut elem_measure = Vec::with_capacity(elements.len());
        let mut elem_grad = Vec::with_capacity(elements.len());
        let mut quad = Vec::with_capacity(6 * elements.len());
        let bary = [
            ([TRI6_A, TRI6_A, 1.0 - 2.0 * TRI6_A], TRI6_WA),
            ([TRI6_A, 1.0 - 2.0 * TRI6_A, TRI6_A], TRI6_WA),
            ([1.0 - 2.0 * TRI6_A, TRI6_A, TRI6_A], TRI6_WA),
            ([TRI6_B, TRI6_B, 1.0 - 2.0 * TRI6_B], TRI6_WB),
            ([TRI6_B, 1.0 - 2.0 * TRI6_B, TRI6_B], TRI6_WB),
            ([1.0 - 2.0 * TRI6_B, TRI6_B, TRI6_B], TRI6_WB),
        ];
        for el in &elements {
            let [p0, p1, p2] = [nodes[el[0]], nodes[el[1]], nodes[el[2]]];
            let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            let area = 0.5 * det;
            elem_measure.push(area);
            elem_grad.push([
                [(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det],
                [(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det],
                [(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det],
            ]);
            for (l, w) in bary {
                let x = [
                    l[0] * p0[0] + l[1] * p1[0] + l[2] * p2[0],
                    l[0] * p0[1] + l[1] * p1[1] + l[2] * p2[1],
                ];
                quad.push(QuadPoint { weight: w * area, shape: l, x });
            }
        }
        Ok(Arc::new(Self::finish(2, nodes, elements, boundary, elem_measure, elem_grad, quad, 6, nx + 2)))
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        dim: usize,
        nodes: Vec<[f64; 2]>,
        elements: Vec<[usize; 3]>,
        boundary: Vec<bool>,
        elem_measure: Vec<f64>,
        elem_grad: Vec<[[f64; 2]; 3]>,
        quad: Vec<QuadPoint>,
        quad_per_elem: usize,
        bandwidth: usize,
    ) -> Self {
        // pairwise sum keeps Σ|K| = 1 to a few ulps
        let measure = pairwise_sum(&elem_measure);
        Self { dim, nodes, elements, boundary, elem_measure, elem_grad, quad, quad_per_elem, measure, bandwidth }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    /// Node indices of element `e` (2 in 1D, 3 in 2D).
    pub fn element(&self, e: usize) -> &[usize] {
        &self.elements[e][..self.dim + 1]
    }

    pub fn element_measure(&self, e: usize) -> f64 {
        self.elem_measure[e]
    }

    /// Gradients of the local shape functions of element `e`.
    pub fn shape_gradients(&self, e: usize) -> &[[f64; 2]] {
        &self.elem_grad[e][..self.dim + 1]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&i| self.boundary[i]).collect()
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&i| !self.boundary[i]).collect()
    }

    /// Quadrature points of element `e`.
    pub fn quad_points(&self, e: usize) -> &[QuadPoint] {
        &self.quad[e * self.quad_per_elem..(e + 1) * self.quad_per_elem]
    }

    /// Global index of the first quadrature point of element `e`.
    pub fn quad_offset(&self, e: usize) -> usize {
        e * self.quad_per_elem
    }

    pub fn n_quad(&self) -> usize {
        self.quad.len()
    }

    /// μ(Ω).
    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// Half-bandwidth of P1 matrices on this mesh.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Smallest element diameter-like size (length in 1D, √(2|K|) in 2D).
    pub fn h(&self) -> f64 {
        let m = self.elem_measure.iter().cloned().fold(f64::INFINITY, f64::min);
        if self.dim == 1 {
            m
        } else {
            (2.0 * m).sqrt()
        }
    }
}

pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_examples() {
        let m = Mesh::interval(2).unwrap();
        let xs: Vec<f64> = m.nodes().iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
        assert_eq!(m.n_elements(), 2);
        let m4 = Mesh::interval(4).unwrap();
        assert_eq!(m4.n_nodes(), 5);
        assert_eq!(m4.boundary_nodes(), vec![0, 4]);
        let m100 = Mesh::interval(100).unwrap();
        assert!((m100.measure() - 1.0).abs() < 1e-14);
        assert!(Mesh::interval(1).is_err());
    }

    #[test]
    fn rectangle_examples() {
        let m = Mesh::rectangle(2, 2).unwrap();
        assert_eq!((m.n_nodes(), m.n_elements()), (9, 8));
        assert_eq!(Mesh::rectangle(3, 3).unwrap().boundary_nodes().len(), 12);
        let m10 = Mesh::rectangle(10, 10).unwrap();
        assert!((m10.measure() - 1.0).abs() < 1e-13);
        assert!((0..m10.n_elements()).all(|e| m10.element_measure(e) > 0.0));
        assert!(Mesh::rectangle(1, 5).is_err());
    }

    #[test]
    fn boundary_markers_match_geometry() {
        let m = Mesh::rectangle(4, 3).unwrap();
        for (i, p) in m.nodes().iter().enumerate() {
            let on = p[0] == 0.0 || p[1] == 0.0 || p[0] == 1.0 || p[1] == 1.0;
            assert_eq!(m.is_boundary(i), on);
        }
    }

    #[test]
    fn quadrature_integrates_quartics() {
        let m = Mesh::rectangle(3, 2).unwrap();
        let mut acc = 0.0;
        for e in 0..m.n_elements() {
            for q in m.quad_points(e) {
                acc += q.weight * q.x[0].powi(4) * q.x[1];
            }
        }
        assert!((acc - 0.1).abs() < 1e-12);
        let m1 = Mesh::interval(3).unwrap();
        let acc1: f64 = (0..3).flat_map(|e| m1.quad_points(e).to_vec()).map(|q| q.weight * q.x[0].powi(5)).sum();
        assert!((acc1 - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn shape_gradients_sum_to_zero() {
        let m = Mesh::rectangle(3, 3).unwrap();
        for e in 0..m.n_elements() {
            let g = m.shape_gradients(e);
            let s = [g[0][0] + g[1][0] + g[2][0], g[0][1] + g[1][1] + g[2][1]];
            assert!(s[0].abs() < 1e-12 && s[1].abs() < 1e-12);
        }
    }

    #[test]
    fn bandwidth_covers_all_couplings() {
        let m = Mesh::rectangle(5, 4).unwrap();
        for e in 0..m.n_elements() {
            let el = m.element(e);
            for &a in el {
                for &b in el {
                    assert!(a.abs_diff(b) <= m.bandwidth());
                }
            }
        }
    }
}
