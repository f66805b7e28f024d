use std::sync::Arc;

use crate::error::{Error, Result};
use crate::material::Sym2;
use crate::mesh::{side_point, Mesh, Point};
use crate::quadrature::{GaussRule, Lagrange1d};

/// Velocity components followed by the stored stress components.
pub const NUM_FIELDS: usize = 5;
pub const V1: usize = 0;
pub const V2: usize = 1;
pub const S11: usize = 2;
pub const S22: usize = 3;
pub const S12: usize = 4;

/// Tensor-product Lagrange element on the unit square.
///
/// The nodes are the Gauss–Legendre points of the volume rule, so basis
/// function `i` is one at quadrature point `i` and zero at all others.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    degree: usize,
    basis_1d: Lagrange1d,
    rule: GaussRule,
    /// `grad[q][i]`: reference gradient of basis `i` at volume point `q`.
    grad: Vec<Vec<[f64; 2]>>,
    /// `face_values[side][p][i]`: basis `i` at face point `p` of `side`.
    face_values: [Vec<Vec<f64>>; 4],
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Self {
        let n = degree + 1;
        let rule = GaussRule::new(n);
        let basis_1d = Lagrange1d::new(rule.points.clone());
        let nb = n * n;
        let mut grad = vec![vec![[0.0; 2]; nb]; nb];
        for (q, gq) in grad.iter_mut().enumerate() {
            let (qa, qb) = (q % n, q / n);
            let (x, y) = (rule.points[qa], rule.points[qb]);
            for (i, g) in gq.iter_mut().enumerate() {
                let (a, b) = (i % n, i / n);
                *g = [
                    basis_1d.derivative(a, x) * basis_1d.value(b, y),
                    basis_1d.value(a, x) * basis_1d.derivative(b, y),
                ];
            }
        }
        let face_values = std::array::from_fn(|side| {
            rule.points
                .iter()
                .map(|&s| {
                    let p = side_point(side, s);
                    (0..nb)
                        .map(|i| basis_1d.value(i % n, p[0]) * basis_1d.value(i / n, p[1]))
                        .collect()
                })
                .collect()
        });
        Self {
            degree,
            basis_1d,
            rule,
            grad,
            face_values,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Basis functions (and volume quadrature points) per cell.
    pub fn num_basis(&self) -> usize {
        (self.degree + 1) * (self.degree + 1)
    }

    pub fn points_1d(&self) -> usize {
        self.degree + 1
    }

    pub fn rule(&self) -> &GaussRule {
        &self.rule
    }

    /// Reference coordinates of volume point / node `q`.
    pub fn node(&self, q: usize) -> Point {
        let n = self.points_1d();
        [self.rule.points[q % n], self.rule.points[q / n]]
    }

    pub fn node_weight(&self, q: usize) -> f64 {
        let n = self.points_1d();
        self.rule.weights[q % n] * self.rule.weights[q / n]
    }

    pub fn grad(&self, q: usize, i: usize) -> [f64; 2] {
        self.grad[q][i]
    }

    pub fn face_values(&self, side: usize, p: usize) -> &[f64] {
        &self.face_values[side][p]
    }

    /// All basis functions evaluated at an arbitrary reference point.
    pub fn eval_basis(&self, p: Point) -> Vec<f64> {
        let n = self.points_1d();
        (0..n * n)
            .map(|i| self.basis_1d.value(i % n, p[0]) * self.basis_1d.value(i / n, p[1]))
            .collect()
    }
}

/// Per-cell geometric factors at the volume quadrature points.
#[derive(Debug, Clone, Copy)]
pub(crate) struct VolumeGeometry {
    /// Quadrature weight times `det J`.
    pub weight: f64,
    /// `J^-T`, maps reference gradients to physical ones.
    pub inv_jt: [[f64; 2]; 2],
    pub x: Point,
}

/// Discontinuous velocity–stress space on a mesh.
#[derive(Debug, Clone)]
pub struct DgSpace {
    mesh: Arc<Mesh>,
    reference: ReferenceElement,
    volume: Vec<VolumeGeometry>,
    side_lengths: Vec<[f64; 4]>,
}

impl DgSpace {
    pub fn new(mesh: Arc<Mesh>, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Invalid("polynomial degree must be at least 1".into()));
        }
        let reference = ReferenceElement::new(degree);
        let nb = reference.num_basis();
        let mut volume = Vec::with_capacity(mesh.num_cells() * nb);
        let mut side_lengths = Vec::with_capacity(mesh.num_cells());
        for c in 0..mesh.num_cells() {
            for q in 0..nb {
                let p = reference.node(q);
                let j = mesh.jacobian(c, p);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                if !(det > 0.0) {
                    return Err(Error::Mesh(format!("cell {c}: det J = {det:e}")));
                }
                volume.push(VolumeGeometry {
                    weight: reference.node_weight(q) * det,
                    inv_jt: [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]],
                    x: mesh.map_point(c, p),
                });
            }
            let faces = mesh.cell_faces(c);
            side_lengths.push(std::array::from_fn(|s| mesh.faces()[faces[s]].length));
        }
        Ok(Self {
            mesh,
            reference,
            volume,
            side_lengths,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn reference(&self) -> &ReferenceElement {
        &self.reference
    }

    pub fn degree(&self) -> usize {
        self.reference.degree()
    }

    pub fn num_cells(&self) -> usize {
        self.mesh.num_cells()
    }

    pub fn dofs_per_cell(&self) -> usize {
        NUM_FIELDS * self.reference.num_basis()
    }

    pub fn dim(&self) -> usize {
        self.num_cells() * self.dofs_per_cell()
    }

    /// Index of coefficient `(field, node)` of `cell`.
    pub fn index(&self, cell: usize, field: usize, node: usize) -> usize {
        let nb = self.reference.num_basis();
        cell * NUM_FIELDS * nb + field * nb + node
    }

    pub(crate) fn volume(&self, cell: usize, q: usize) -> &VolumeGeometry {
        &self.volume[cell * self.reference.num_basis() + q]
    }

    pub(crate) fn side_length(&self, cell: usize, side: usize) -> f64 {
        self.side_lengths[cell][side]
    }

    /// Physical location of node / quadrature point `q` of `cell`.
    pub fn node_point(&self, cell: usize, q: usize) -> Point {
        self.volume(cell, q).x
    }

    pub fn node_weight(&self, cell: usize, q: usize) -> f64 {
        self.volume(cell, q).weight
    }

    pub fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    /// Nodal interpolation of `f(x) = [v1, v2, s11, s22, s12]`.
    pub fn interpolate(&self, f: impl Fn(Point) -> [f64; NUM_FIELDS]) -> Vec<f64> {
        let mut out = self.zeros();
        for c in 0..self.num_cells() {
            for q in 0..self.reference.num_basis() {
                let val = f(self.node_point(c, q));
                for (field, v) in val.iter().enumerate() {
                    out[self.index(c, field, q)] = *v;
                }
            }
        }
        out
    }

    /// All fields of `values` at reference point `p` of `cell`.
    pub fn evaluate(&self, values: &[f64], cell: usize, p: Point) -> [f64; NUM_FIELDS] {
        let phi = self.reference.eval_basis(p);
        std::array::from_fn(|field| {
            phi.iter()
                .enumerate()
                .map(|(i, b)| b * values[self.index(cell, field, i)])
                .sum()
        })
    }

    /// Stress at node `q` of `cell`.
    pub fn node_stress(&self, values: &[f64], cell: usize, q: usize) -> Sym2 {
        Sym2::new(
            values[self.index(cell, S11, q)],
            values[self.index(cell, S22, q)],
            values[self.index(cell, S12, q)],
        )
    }

    pub fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: values.len(),
            });
        }
        Ok(())
    }
}

/// Coefficients of `(v, sigma)` in a [`DgSpace`] at a point in time.
#[derive(Debug, Clone, PartialEq)]
pub struct DgState {
    pub values: Vec<f64>,
    pub time: f64,
}

impl DgState {
    pub fn zeros(space: &DgSpace) -> Self {
        Self {
            values: space.zeros(),
            time: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryTag, BoundaryTags, GeometryMap};

    #[test]
    fn dimension_formula() {
        let mesh = Arc::new(crate::mesh::build_mesh(&GeometryMap::curved_bar(), 4).unwrap());
        let k1 = DgSpace::new(mesh.clone(), 1).unwrap();
        assert_eq!(k1.dim(), 4096 * 5 * 4);
        let k2 = DgSpace::new(mesh, 2).unwrap();
        // 45 coefficients per cell, 184 320 in total at h = 2^-8
        assert_eq!(k2.dofs_per_cell(), 45);
        assert_eq!(k2.dim(), 184_320);
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let mesh = Arc::new(
            Mesh::build(
                &GeometryMap::rectangle([0.0, 2.0], [0.0, 1.0], [2, 1]),
                0,
                BoundaryTags::uniform(BoundaryTag::Free),
            )
            .unwrap(),
        );
        let space = DgSpace::new(mesh.clone(), 2).unwrap();
        let f = |x: Point| [x[0] * x[1], x[0] * x[0], 1.0, x[1], x[0] - x[1]];
        let u = space.interpolate(f);
        let p = [0.3, 0.7];
        let x = mesh.map_point(1, p);
        let val = space.evaluate(&u, 1, p);
        let exact = f(x);
        for i in 0..5 {
            assert!((val[i] - exact[i]).abs() < 1e-13);
        }
    }
}
