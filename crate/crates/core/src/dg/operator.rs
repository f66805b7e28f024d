//! Matrix-free energy (mass) and full-upwind operators.
//!
//! Every operator application is organized as a gather over cells: each cell
//! evaluates its own volume terms and the flux terms on its four sides,
//! reading (never writing) the coefficients of its face neighbors. Interior
//! faces are therefore evaluated once from each side, and the cell loop can
//! be split across workers without synchronization.

use std::sync::{Arc, Mutex};

use crate::dg::pulse::BoundaryPulse;
use crate::dg::space::{DgSpace, NUM_FIELDS, S11, S12, S22, V1, V2};
use crate::error::{Error, Result};
use crate::krylov::{BlockJacobi, LinearOperator};
use crate::material::{compliance_coefficients, impedances, DegradedMaterialField, Sym2};
use crate::mesh::{side_point, BoundaryTag, FaceNeighbor, Point};

/// The semi-discrete operators `M_h`, `A_h` and `b_h` for one material snapshot.
#[derive(Debug)]
pub struct WaveOperator {
    space: Arc<DgSpace>,
    material: Arc<DegradedMaterialField>,
    rho: f64,
    compliance: (f64, f64),
    impedance: (f64, f64),
    /// `1 / factor` at the volume points.
    inv_factor: Vec<f64>,
    /// `sqrt(factor)` at the face points, per cell side.
    face_sqrt_factor: Vec<f64>,
    normals: Vec<[Point; 4]>,
    neighbors: Vec<[FaceNeighbor; 4]>,
    preconditioners: Mutex<Vec<(u64, Arc<BlockJacobi>)>>,
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl WaveOperator {
    pub fn new(space: Arc<DgSpace>, material: Arc<DegradedMaterialField>) -> Result<Self> {
        let mesh = space.mesh().clone();
        if material.num_nodes() != mesh.num_vertices() {
            return Err(Error::Dimension {
                expected: mesh.num_vertices(),
                actual: material.num_nodes(),
            });
        }
        let reference = space.reference();
        let nb = reference.num_basis();
        let n1 = reference.points_1d();
        let mut inv_factor = Vec::with_capacity(mesh.num_cells() * nb);
        let mut face_sqrt_factor = Vec::with_capacity(mesh.num_cells() * 4 * n1);
        let mut normals = Vec::with_capacity(mesh.num_cells());
        let mut neighbors = Vec::with_capacity(mesh.num_cells());
        for c in 0..mesh.num_cells() {
            for q in 0..nb {
                inv_factor.push(1.0 / material.factor_at(&mesh, c, reference.node(q)));
            }
            for side in 0..4 {
                for &s in &reference.rule().points {
                    face_sqrt_factor.push(material.factor_at(&mesh, c, side_point(side, s)).sqrt());
                }
            }
            normals.push(std::array::from_fn(|s| mesh.outward_normal(c, s)));
            neighbors.push(std::array::from_fn(|s| mesh.neighbor(c, s)));
        }
        let base = material.base();
        Ok(Self {
            rho: base.rho,
            compliance: compliance_coefficients(base),
            impedance: impedances(base),
            space,
            material,
            inv_factor,
            face_sqrt_factor,
            normals,
            neighbors,
            preconditioners: Mutex::new(Vec::new()),
        })
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn material(&self) -> &Arc<DegradedMaterialField> {
        &self.material
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Rows of `mass_scale * M x + upwind_scale * A x` belonging to `cell`.
    ///
    /// `neighbors[side]` holds the neighbor's coefficients across an interior
    /// side; `None` treats the neighbor trace as zero.
    fn cell_apply(
        &self,
        cell: usize,
        local: &[f64],
        neighbors: [Option<&[f64]>; 4],
        mass_scale: f64,
        upwind_scale: f64,
        out: &mut [f64],
    ) {
        let reference = self.space.reference();
        let nb = reference.num_basis();
        let n1 = reference.points_1d();
        out.iter_mut().for_each(|v| *v = 0.0);
        let (a0, b0) = self.compliance;

        if mass_scale != 0.0 {
            for q in 0..nb {
                let w = mass_scale * self.space.volume(cell, q).weight;
                out[V1 * nb + q] += w * self.rho * local[V1 * nb + q];
                out[V2 * nb + q] += w * self.rho * local[V2 * nb + q];
                let inv_f = self.inv_factor[cell * nb + q];
                let (a, b) = (a0 * inv_f, b0 * inv_f);
                let (s11, s22, s12) = (local[S11 * nb + q], local[S22 * nb + q], local[S12 * nb + q]);
                let tr = s11 + s22;
                out[S11 * nb + q] += w * (a * s11 - b * tr);
                out[S22 * nb + q] += w * (a * s22 - b * tr);
                out[S12 * nb + q] += w * 2.0 * a * s12;
            }
        }
        if upwind_scale == 0.0 {
            return;
        }

        // volume terms (div sigma, w) + (eps(v), eta)
        for q in 0..nb {
            let geo = self.space.volume(cell, q);
            let mut grads = [[0.0; 2]; NUM_FIELDS];
            for i in 0..nb {
                let g = reference.grad(q, i);
                for (field, grad) in grads.iter_mut().enumerate() {
                    let u = local[field * nb + i];
                    grad[0] += g[0] * u;
                    grad[1] += g[1] * u;
                }
            }
            let phys = |g: [f64; 2]| {
                [
                    geo.inv_jt[0][0] * g[0] + geo.inv_jt[0][1] * g[1],
                    geo.inv_jt[1][0] * g[0] + geo.inv_jt[1][1] * g[1],
                ]
            };
            let dv1 = phys(grads[V1]);
            let dv2 = phys(grads[V2]);
            let ds11 = phys(grads[S11]);
            let ds22 = phys(grads[S22]);
            let ds12 = phys(grads[S12]);
            let w = upwind_scale * geo.weight;
            out[V1 * nb + q] += w * (ds11[0] + ds12[1]);
            out[V2 * nb + q] += w * (ds12[0] + ds22[1]);
            out[S11 * nb + q] += w * dv1[0];
            out[S22 * nb + q] += w * dv2[1];
            out[S12 * nb + q] += w * (dv1[1] + dv2[0]);
        }

        // upwind flux terms
        let (zp0, zs0) = self.impedance;
        let weights = &reference.rule().weights;
        for side in 0..4 {
            let n = self.normals[cell][side];
            let t = [-n[1], n[0]];
            let len = self.space.side_length(cell, side);
            let neighbor = self.neighbors[cell][side];
            for p in 0..n1 {
                let phi = reference.face_values(side, p);
                let trace = |coeffs: &[f64], phi: &[f64]| -> [f64; NUM_FIELDS] {
                    std::array::from_fn(|field| {
                        let c = &coeffs[field * nb..(field + 1) * nb];
                        c.iter().zip(phi).map(|(a, b)| a * b).sum()
                    })
                };
                let inner = trace(local, phi);
                let v_in = [inner[V1], inner[V2]];
                let t_in = Sym2::new(inner[S11], inner[S22], inner[S12]).mul_vec(n);
                let (jv, js) = match neighbor {
                    FaceNeighbor::Interior { side: nside, .. } => match neighbors[side] {
                        Some(outer_coeffs) => {
                            let outer = trace(outer_coeffs, reference.face_values(nside, n1 - 1 - p));
                            let t_out = Sym2::new(outer[S11], outer[S22], outer[S12]).mul_vec(n);
                            (
                                [outer[V1] - v_in[0], outer[V2] - v_in[1]],
                                [t_out[0] - t_in[0], t_out[1] - t_in[1]],
                            )
                        }
                        None => ([-v_in[0], -v_in[1]], [-t_in[0], -t_in[1]]),
                    },
                    FaceNeighbor::Boundary { tag, .. } => match tag {
                        BoundaryTag::Neumann | BoundaryTag::Free => ([0.0; 2], [-2.0 * t_in[0], -2.0 * t_in[1]]),
                        BoundaryTag::Dirichlet => ([-2.0 * v_in[0], -2.0 * v_in[1]], [0.0; 2]),
                        BoundaryTag::Slip => {
                            let vn = dot(v_in, n);
                            let tt = dot(t_in, t);
                            ([-2.0 * vn * n[0], -2.0 * vn * n[1]], [-2.0 * tt * t[0], -2.0 * tt * t[1]])
                        }
                    },
                };
                let sf = self.face_sqrt_factor[(cell * 4 + side) * n1 + p];
                let (zp, zs) = (zp0 * sf, zs0 * sf);
                let a_p = dot(n, js) + zp * dot(n, jv);
                let a_s = dot(t, js) + zs * dot(t, jv);
                let rw = [0.5 * (a_p * n[0] + a_s * t[0]), 0.5 * (a_p * n[1] + a_s * t[1])];
                let r_eta = Sym2::sym_outer(n, n)
                    .scale(0.5 * a_p / zp)
                    .add(&Sym2::sym_outer(t, n).scale(0.5 * a_s / zs));
                let fw = upwind_scale * weights[p] * len;
                for i in 0..nb {
                    let wphi = fw * phi[i];
                    out[V1 * nb + i] += wphi * rw[0];
                    out[V2 * nb + i] += wphi * rw[1];
                    out[S11 * nb + i] += wphi * r_eta.xx;
                    out[S22 * nb + i] += wphi * r_eta.yy;
                    out[S12 * nb + i] += wphi * 2.0 * r_eta.xy;
                }
            }
        }
    }

    /// `y = mass_scale * M x + upwind_scale * A x`.
    pub fn apply_combination(&self, x: &[f64], y: &mut [f64], mass_scale: f64, upwind_scale: f64) {
        let ndc = self.space.dofs_per_cell();
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        for (cell, out) in y.chunks_exact_mut(ndc).enumerate() {
            let local = &x[cell * ndc..(cell + 1) * ndc];
            let nbrs: [Option<&[f64]>; 4] = std::array::from_fn(|side| match self.neighbors[cell][side] {
                FaceNeighbor::Interior { cell: nc, .. } => Some(&x[nc * ndc..(nc + 1) * ndc]),
                FaceNeighbor::Boundary { .. } => None,
            });
            self.cell_apply(cell, local, nbrs, mass_scale, upwind_scale, out);
        }
    }

    pub fn apply_mass(&self, x: &[f64], y: &mut [f64]) {
        self.apply_combination(x, y, 1.0, 0.0);
    }

    pub fn apply_upwind(&self, x: &[f64], y: &mut [f64]) {
        self.apply_combination(x, y, 0.0, 1.0);
    }

    /// `1/2 x^T M x`.
    pub fn energy(&self, x: &[f64]) -> f64 {
        let nb = self.space.reference().num_basis();
        let ndc = self.space.dofs_per_cell();
        let (a0, b0) = self.compliance;
        let mut e = 0.0;
        for (cell, local) in x.chunks_exact(ndc).enumerate() {
            for q in 0..nb {
                let w = self.space.volume(cell, q).weight;
                let v1 = local[V1 * nb + q];
                let v2 = local[V2 * nb + q];
                let inv_f = self.inv_factor[cell * nb + q];
                let s = Sym2::new(local[S11 * nb + q], local[S22 * nb + q], local[S12 * nb + q]);
                let c_inv_s = s.scale(a0 * inv_f).add(&Sym2::IDENTITY.scale(-b0 * inv_f * s.trace()));
                e += 0.5 * w * (self.rho * (v1 * v1 + v2 * v2) + s.ddot(&c_inv_s));
            }
        }
        e
    }

    /// Row-major diagonal blocks of `M - alpha A`, one per cell.
    pub fn diagonal_blocks(&self, alpha: f64) -> Vec<f64> {
        let ndc = self.space.dofs_per_cell();
        let mut blocks = vec![0.0; self.space.num_cells() * ndc * ndc];
        let mut unit = vec![0.0; ndc];
        let mut col = vec![0.0; ndc];
        for (cell, block) in blocks.chunks_exact_mut(ndc * ndc).enumerate() {
            for j in 0..ndc {
                unit[j] = 1.0;
                self.cell_apply(cell, &unit, [None; 4], 1.0, -alpha, &mut col);
                unit[j] = 0.0;
                for i in 0..ndc {
                    block[i * ndc + j] = col[i];
                }
            }
        }
        blocks
    }

    /// Element block-Jacobi preconditioner for `M - alpha A`, cached per `alpha`.
    pub fn block_jacobi(&self, alpha: f64) -> Result<Arc<BlockJacobi>> {
        let key = alpha.to_bits();
        let mut cache = self.preconditioners.lock().expect("preconditioner cache poisoned");
        if let Some((_, pc)) = cache.iter().find(|(k, _)| *k == key) {
            return Ok(pc.clone());
        }
        let pc = Arc::new(BlockJacobi::from_blocks(
            self.space.dofs_per_cell(),
            &self.diagonal_blocks(alpha),
        )?);
        if cache.len() >= 4 {
            cache.remove(0);
        }
        cache.push((key, pc.clone()));
        Ok(pc)
    }

    /// Load vector `b_h(t)` from boundary pulses and an optional body force.
    pub fn assemble_load(&self, pulse: &BoundaryPulse, t: f64) -> Vec<f64> {
        self.assemble_load_with(pulse, t, None)
    }

    pub fn assemble_load_with(
        &self,
        pulse: &BoundaryPulse,
        t: f64,
        body_force: Option<&dyn Fn(Point, f64) -> Point>,
    ) -> Vec<f64> {
        let reference = self.space.reference();
        let nb = reference.num_basis();
        let n1 = reference.points_1d();
        let ndc = self.space.dofs_per_cell();
        let (zp0, zs0) = self.impedance;
        let mut b = self.space.zeros();
        for (cell, out) in b.chunks_exact_mut(ndc).enumerate() {
            if let Some(f) = body_force {
                for q in 0..nb {
                    let geo = self.space.volume(cell, q);
                    let force = f(geo.x, t);
                    out[V1 * nb + q] += geo.weight * force[0];
                    out[V2 * nb + q] += geo.weight * force[1];
                }
            }
            for side in 0..4 {
                let FaceNeighbor::Boundary { side: bside, tag: BoundaryTag::Neumann } = self.neighbors[cell][side]
                else {
                    continue;
                };
                let amplitude = pulse.traction(bside, t);
                if amplitude == 0.0 {
                    continue;
                }
                let n = self.normals[cell][side];
                let t_dir = [-n[1], n[0]];
                let g = [amplitude * n[0], amplitude * n[1]];
                let len = self.space.side_length(cell, side);
                for p in 0..n1 {
                    let sf = self.face_sqrt_factor[(cell * 4 + side) * n1 + p];
                    let (zp, zs) = (zp0 * sf, zs0 * sf);
                    let r_eta = Sym2::sym_outer(n, n)
                        .scale(dot(n, g) / zp)
                        .add(&Sym2::sym_outer(t_dir, n).scale(dot(t_dir, g) / zs));
                    let phi = reference.face_values(side, p);
                    let fw = reference.rule().weights[p] * len;
                    for i in 0..nb {
                        let wphi = fw * phi[i];
                        out[V1 * nb + i] += wphi * g[0];
                        out[V2 * nb + i] += wphi * g[1];
                        out[S11 * nb + i] += wphi * r_eta.xx;
                        out[S22 * nb + i] += wphi * r_eta.yy;
                        out[S12 * nb + i] += wphi * 2.0 * r_eta.xy;
                    }
                }
            }
        }
        b
    }
}

/// `mass_scale * M + upwind_scale * A` as a [`LinearOperator`].
pub struct CombinedOperator<'a> {
    pub op: &'a WaveOperator,
    pub mass_scale: f64,
    pub upwind_scale: f64,
}

impl LinearOperator for CombinedOperator<'_> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply_combination(x, y, self.mass_scale, self.upwind_scale);
    }
}
