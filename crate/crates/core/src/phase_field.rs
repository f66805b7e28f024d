//! Conforming bilinear phase-field solver, stress-based driving force and
//! crack bookkeeping.

use crate::dg::DgSpace;
use crate::error::{Error, Result};
use crate::krylov::{cg, Jacobi, LinearOperator, SolveReport};
use crate::material::Sym2;
use crate::mesh::{q1_gradients, q1_shape};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParams {
    /// Retardation time.
    pub tau_r: f64,
    /// Weight of the geometric (surface energy) driving force.
    pub m_geom: f64,
    /// Regularization length.
    pub l_c: f64,
    /// Critical tensile stress.
    pub sigma_c: f64,
    /// Nodes with `s_inf` below this are cracked.
    pub s_min: f64,
    /// When set, the out-of-plane stress `nu (s11 + s22)` of plane strain
    /// also competes for the maximum principal stress.
    pub out_of_plane_poisson: Option<f64>,
}

impl PhaseParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau_r", self.tau_r),
            ("m_geom", self.m_geom),
            ("l_c", self.l_c),
            ("sigma_c", self.sigma_c),
            ("s_min", self.s_min),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Invalid(format!("phase.{name} = {v} must be positive")));
            }
        }
        if !(self.s_min < 1.0) {
            return Err(Error::Invalid(format!("phase.s_min = {} must be below 1", self.s_min)));
        }
        Ok(())
    }
}

/// Nodal phase field with its running infimum.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub s: Vec<f64>,
    pub s_inf: Vec<f64>,
    /// `s_inf >= s_min`.
    pub elastic: Vec<bool>,
    pub time: f64,
}

impl PhaseState {
    pub fn intact(num_nodes: usize) -> Self {
        Self {
            s: vec![1.0; num_nodes],
            s_inf: vec![1.0; num_nodes],
            elastic: vec![true; num_nodes],
            time: 0.0,
        }
    }

    pub fn cracked_count(&self) -> usize {
        self.elastic.iter().filter(|e| !**e).count()
    }
}

/// Largest eigenvalue of a symmetric 2x2 tensor.
pub fn max_principal_stress(stress: &Sym2) -> f64 {
    let mean = 0.5 * (stress.xx + stress.yy);
    let dev = 0.5 * (stress.xx - stress.yy);
    mean + dev.hypot(stress.xy)
}

/// `max(sigma_I / sigma_c - 1, 0)`.
pub fn elastic_driving_force(stress: &Sym2, sigma_c: f64) -> f64 {
    (max_principal_stress(stress) / sigma_c - 1.0).max(0.0)
}

fn principal_stress(stress: &Sym2, params: &PhaseParams) -> f64 {
    let in_plane = max_principal_stress(stress);
    match params.out_of_plane_poisson {
        Some(nu) => in_plane.max(nu * stress.trace()),
        None => in_plane,
    }
}

/// Maximum principal stress at every DG quadrature point, cell-major.
pub fn principal_stress_field(space: &DgSpace, values: &[f64], params: &PhaseParams) -> Vec<f64> {
    let nb = space.reference().num_basis();
    let mut out = Vec::with_capacity(space.num_cells() * nb);
    for c in 0..space.num_cells() {
        for q in 0..nb {
            out.push(principal_stress(&space.node_stress(values, c, q), params));
        }
    }
    out
}

/// `Y_el` at every DG quadrature point, cell-major.
pub fn driving_force_field(space: &DgSpace, values: &[f64], params: &PhaseParams) -> Vec<f64> {
    principal_stress_field(space, values, params)
        .into_iter()
        .map(|s| (s / params.sigma_c - 1.0).max(0.0))
        .collect()
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    fn with_pattern(n: usize, rows: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut cols = Vec::new();
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            cols.extend(r);
            offsets.push(cols.len());
        }
        let values = vec![0.0; cols.len()];
        Self { n, offsets, cols, values }
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let row = &self.cols[self.offsets[i]..self.offsets[i + 1]];
        let k = row.binary_search(&j).expect("entry outside sparsity pattern");
        self.values[self.offsets[i] + k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.cols[self.offsets[i]..self.offsets[i + 1]];
        row.binary_search(&j).map(|k| self.values[self.offsets[i] + k]).unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let range = self.offsets[i]..self.offsets[i + 1];
            *yi = self.cols[range.clone()]
                .iter()
                .zip(&self.values[range])
                .map(|(&j, v)| v * x[j])
                .sum();
        }
    }

    /// `a * self + b * other` on the same pattern.
    pub fn combine(&self, a: f64, other: &CsrMatrix, b: f64) -> CsrMatrix {
        assert_eq!(self.cols, other.cols, "patterns differ");
        CsrMatrix {
            n: self.n,
            offsets: self.offsets.clone(),
            cols: self.cols.clone(),
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul(x, y);
    }
}

/// Q1 mass and stiffness matrices on the mesh vertices, integrated with the
/// DG volume quadrature so that driving forces sampled at the DG points
/// enter the load consistently.
#[derive(Debug, Clone)]
pub struct PhaseFieldSolver {
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    /// `(weight, [N_a])` per DG quadrature point, cell-major.
    samples: Vec<(f64, [f64; 4])>,
    cells: Vec<[usize; 4]>,
    nb: usize,
    pub rtol: f64,
    pub max_iters: usize,
}

impl PhaseFieldSolver {
    pub fn new(space: &DgSpace) -> Self {
        let mesh = space.mesh();
        let n = mesh.num_vertices();
        let mut rows = vec![Vec::new(); n];
        for cell in mesh.cells() {
            for &a in cell {
                rows[a].extend_from_slice(cell);
            }
        }
        let mut mass = CsrMatrix::with_pattern(n, rows);
        let mut stiffness = mass.clone();
        let reference = space.reference();
        let nb = reference.num_basis();
        let mut samples = Vec::with_capacity(mesh.num_cells() * nb);
        for (c, cell) in mesh.cells().iter().enumerate() {
            for q in 0..nb {
                let p = reference.node(q);
                let w = space.node_weight(c, q);
                let shape = q1_shape(p);
                let j = mesh.jacobian(c, p);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                let grads = q1_gradients(p).map(|g| {
                    [
                        (j[1][1] * g[0] - j[1][0] * g[1]) / det,
                        (-j[0][1] * g[0] + j[0][0] * g[1]) / det,
                    ]
                });
                for a in 0..4 {
                    for b in 0..4 {
                        mass.add(cell[a], cell[b], w * shape[a] * shape[b]);
                        stiffness.add(
                            cell[a],
                            cell[b],
                            w * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]),
                        );
                    }
                }
                samples.push((w, shape));
            }
        }
        Self {
            mass,
            stiffness,
            samples,
            cells: mesh.cells().to_vec(),
            nb,
            rtol: 1e-10,
            max_iters: 5000,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.mass.dim()
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// `(tau_r + dt M_geom) Mass + dt M_geom l_c^2 Stiffness`.
    pub fn system_matrix(&self, params: &PhaseParams, dt: f64) -> CsrMatrix {
        self.mass.combine(
            params.tau_r + dt * params.m_geom,
            &self.stiffness,
            dt * params.m_geom * params.l_c * params.l_c,
        )
    }

    /// `int Y phi_a` with `Y` sampled at the DG quadrature points.
    pub fn load(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.samples.len() {
            return Err(Error::Dimension {
                expected: self.samples.len(),
                actual: samples.len(),
            });
        }
        let mut b = vec![0.0; self.num_nodes()];
        for (k, ((w, shape), y)) in self.samples.iter().zip(samples).enumerate() {
            if *y == 0.0 {
                continue;
            }
            let cell = &self.cells[k / self.nb];
            for a in 0..4 {
                b[cell[a]] += w * shape[a] * y;
            }
        }
        Ok(b)
    }

    pub fn system_rhs(&self, prev_s: &[f64], y_el: &[f64], params: &PhaseParams, dt: f64) -> Result<Vec<f64>> {
        if prev_s.len() != self.num_nodes() {
            return Err(Error::Dimension {
                expected: self.num_nodes(),
                actual: prev_s.len(),
            });
        }
        let load = self.load(y_el)?;
        let mut m_prev = vec![0.0; self.num_nodes()];
        self.mass.mul(prev_s, &mut m_prev);
        let mut m_one = vec![0.0; self.num_nodes()];
        self.mass.mul(&vec![1.0; self.num_nodes()], &mut m_one);
        Ok((0..self.num_nodes())
            .map(|i| params.tau_r * m_prev[i] + dt * params.m_geom * m_one[i] - dt * load[i])
            .collect())
    }

    /// One implicit Euler step of the phase-field evolution; the result is an
    /// unprojected candidate.
    pub fn pf_step(
        &self,
        prev_s: &[f64],
        y_el: &[f64],
        params: &PhaseParams,
        dt: f64,
    ) -> Result<(Vec<f64>, SolveReport)> {
        let rhs = self.system_rhs(prev_s, y_el, params, dt)?;
        let system = self.system_matrix(params, dt);
        let pc = Jacobi::new(&system.diagonal())?;
        let (s, report) = cg(&system, &pc, &rhs, Some(prev_s), self.rtol, self.max_iters);
        if !report.converged {
            return Err(Error::NotConverged { solver: "CG", report });
        }
        Ok((s, report))
    }
}

/// Clamps the candidate to `[0, 1]`, snaps values below `s_min` (and nodes
/// that were already at zero) to zero, and updates the infimum and the
/// elastic node set.
pub fn project_and_track(candidate: &[f64], prev: &PhaseState, s_min: f64) -> PhaseState {
    let s: Vec<f64> = candidate
        .iter()
        .zip(&prev.s)
        .map(|(&c, &p)| {
            if p == 0.0 || c < s_min {
                0.0
            } else if c >= 1.0 {
                1.0
            } else {
                c
            }
        })
        .collect();
    let s_inf: Vec<f64> = s.iter().zip(&prev.s_inf).map(|(a, b)| a.min(*b)).collect();
    let elastic = s_inf
        .iter()
        .zip(&prev.elastic)
        .map(|(&si, &was)| was && si >= s_min)
        .collect();
    PhaseState {
        s,
        s_inf,
        elastic,
        time: prev.time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, BoundaryTag, BoundaryTags, GeometryMap, Mesh};
    use nalgebra::DMatrix;
    use std::sync::Arc;

    fn params(m_geom: f64) -> PhaseParams {
        PhaseParams {
            tau_r: 1.0,
            m_geom,
            l_c: 0.0005,
            sigma_c: 27.0,
            s_min: 0.01,
            out_of_plane_poisson: None,
        }
    }

    fn small_space(n: usize) -> DgSpace {
        let mesh = Mesh::build(
            &GeometryMap::rectangle([0.0, 1.0], [0.0, 1.0], [n, n]),
            0,
            BoundaryTags::uniform(BoundaryTag::Free),
        )
        .unwrap();
        DgSpace::new(Arc::new(mesh), 1).unwrap()
    }

    /// Eigenvalues of [[a, c], [c, b]] by brute force over unit directions.
    fn brute_max_normal_stress(s: &Sym2) -> f64 {
        (0..200_000)
            .map(|i| {
                let th = std::f64::consts::PI * i as f64 / 200_000.0;
                let n = [th.cos(), th.sin()];
                let sn = s.mul_vec(n);
                n[0] * sn[0] + n[1] * sn[1]
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn principal_stress_examples() {
        assert_eq!(max_principal_stress(&Sym2::new(3.0, -2.0, 0.0)), 3.0);
        assert_eq!(max_principal_stress(&Sym2::new(-3.0, 2.0, 0.0)), 2.0);
        assert_eq!(max_principal_stress(&Sym2::new(0.0, 0.0, 1.0)), 1.0);
        let s = Sym2::new(3.0, -3.0, 4.0);
        assert_eq!(max_principal_stress(&s), 5.0);
        assert!((brute_max_normal_stress(&s) - 5.0).abs() < 1e-8);
        let odd = Sym2::new(1.3, -0.4, 2.2);
        assert!((brute_max_normal_stress(&odd) - max_principal_stress(&odd)).abs() < 1e-8);
    }

    #[test]
    fn driving_force_examples() {
        assert_eq!(elastic_driving_force(&Sym2::new(54.0, 0.0, 0.0), 27.0), 1.0);
        assert_eq!(elastic_driving_force(&Sym2::new(27.0, 10.0, 0.0), 27.0), 0.0);
        assert_eq!(elastic_driving_force(&Sym2::new(-10.0, -10.0, 0.0), 27.0), 0.0);
        let p = PhaseParams { out_of_plane_poisson: Some(1.0 / 3.0), ..params(0.01) };
        // in-plane max is 3, out-of-plane (3 + 3) / 3 = 2
        assert_eq!(principal_stress(&Sym2::new(3.0, 3.0, 0.0), &p), 3.0);
        assert_eq!(principal_stress(&Sym2::new(-30.0, -30.0, 0.0), &p), -20.0);
    }

    #[test]
    fn fixed_point_without_driving_force() {
        let space = small_space(3);
        let solver = PhaseFieldSolver::new(&space);
        let ones = vec![1.0; solver.num_nodes()];
        let zeros = vec![0.0; space.num_cells() * 4];
        let (s, _) = solver.pf_step(&ones, &zeros, &params(0.01), 0.001).unwrap();
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn scalar_ode_without_geometric_term() {
        let space = small_space(3);
        let mut solver = PhaseFieldSolver::new(&space);
        solver.rtol = 1e-14;
        let ones = vec![1.0; solver.num_nodes()];
        let y = vec![1.0; space.num_cells() * 4];
        let p = PhaseParams { m_geom: 0.0, ..params(0.0) };
        let (s, _) = solver.pf_step(&ones, &y, &p, 0.0005).unwrap();
        assert!(s.iter().all(|v| (v - 0.9995).abs() < 1e-12), "{s:?}");
    }

    #[test]
    fn uniform_data_stays_uniform() {
        let space = small_space(4);
        let solver = PhaseFieldSolver::new(&space);
        let prev = vec![0.7; solver.num_nodes()];
        let y = vec![0.3; space.num_cells() * 4];
        let (s, _) = solver.pf_step(&prev, &y, &params(0.5), 0.01).unwrap();
        let first = s[0];
        assert!(s.iter().all(|v| (v - first).abs() < 1e-9));
        // tau (s - s0) = dt (M (1 - s) - Y)
        let expected = (0.7 + 0.01 * 0.5 - 0.01 * 0.3) / (1.0 + 0.01 * 0.5);
        assert!((first - expected).abs() < 1e-9);
    }

    #[test]
    fn matches_dense_cholesky_and_is_spd() {
        let space = small_space(2);
        let mut solver = PhaseFieldSolver::new(&space);
        solver.rtol = 1e-14;
        let n = solver.num_nodes();
        let p = PhaseParams { l_c: 0.3, ..params(0.7) };
        let dt = 0.05;
        let sys = solver.system_matrix(&p, dt);
        let dense = DMatrix::from_fn(n, n, |i, j| sys.get(i, j));
        assert!((&dense - dense.transpose()).abs().max() < 1e-15);
        let eig = dense.clone().symmetric_eigen();
        assert!(eig.eigenvalues.min() > 0.0);
        let prev: Vec<f64> = (0..n).map(|i| 0.5 + 0.05 * i as f64).collect();
        let y: Vec<f64> = (0..space.num_cells() * 4).map(|i| (i % 3) as f64 * 0.4).collect();
        let rhs = solver.system_rhs(&prev, &y, &p, dt).unwrap();
        let exact = dense.cholesky().unwrap().solve(&nalgebra::DVector::from_vec(rhs));
        let (s, _) = solver.pf_step(&prev, &y, &p, dt).unwrap();
        let err = s.iter().zip(exact.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err / exact.norm() < 1e-10);
    }

    #[test]
    fn mass_and_stiffness_sanity() {
        let mesh = Arc::new(build_mesh(&GeometryMap::curved_bar(), 1).unwrap());
        let space = DgSpace::new(mesh.clone(), 1).unwrap();
        let solver = PhaseFieldSolver::new(&space);
        let n = solver.num_nodes();
        let mut m1 = vec![0.0; n];
        solver.mass().mul(&vec![1.0; n], &mut m1);
        assert!((m1.iter().sum::<f64>() - mesh.area()).abs() < 1e-12);
        let mut k1 = vec![0.0; n];
        solver.stiffness().mul(&vec![1.0; n], &mut k1);
        assert!(k1.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn projection_cases() {
        let prev = PhaseState {
            s: vec![1.0, 1.0, 1.0, 0.0, 0.6],
            s_inf: vec![1.0, 1.0, 1.0, 0.0, 0.6],
            elastic: vec![true, true, true, false, true],
            time: 0.0,
        };
        let next = project_and_track(&[1.2, 0.5, 0.005, 0.9, 0.8], &prev, 0.01);
        assert_eq!(next.s, vec![1.0, 0.5, 0.0, 0.0, 0.8]);
        assert_eq!(next.s_inf, vec![1.0, 0.5, 0.0, 0.0, 0.6]);
        assert_eq!(next.elastic, vec![true, true, false, false, true]);
        assert_eq!(next.cracked_count(), 2);

        let up = project_and_track(&[1.0, 1.0, 1.0, 1.0, 0.9], &prev, 0.01);
        assert_eq!(up.s_inf, prev.s_inf);
        assert_eq!(up.elastic, prev.elastic);
    }

    #[test]
    fn relaxes_back_when_driving_force_vanishes() {
        let space = small_space(2);
        let solver = PhaseFieldSolver::new(&space);
        let p = PhaseParams { s_min: -1.0, tau_r: 0.01, m_geom: 1.0, ..params(1.0) };
        let nq = space.num_cells() * 4;
        let mut state = PhaseState::intact(solver.num_nodes());
        let dt = 0.001;
        for _ in 0..5 {
            let (c, _) = solver.pf_step(&state.s, &vec![0.5; nq], &p, dt).unwrap();
            state = project_and_track(&c, &state, p.s_min);
        }
        let damaged = state.s[0];
        assert!(damaged < 0.9);
        let mut last = damaged;
        for _ in 0..50 {
            let (c, _) = solver.pf_step(&state.s, &vec![0.0; nq], &p, dt).unwrap();
            state = project_and_track(&c, &state, p.s_min);
            assert!(state.s[0] >= last - 1e-14);
            assert!(state.s.iter().all(|v| *v <= 1.0));
            last = state.s[0];
        }
        assert!(last > damaged + 0.02);
        // the infimum keeps the history
        assert!((state.s_inf[0] - damaged).abs() < 1e-12);
    }
}
