//! Krylov solvers: restarted right-preconditioned GMRES and preconditioned CG.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
    }
}

/// `z = r`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Point Jacobi, `z_i = r_i / a_ii`.
#[derive(Debug, Clone)]
pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new(diagonal: &[f64]) -> Result<Self> {
        if let Some(i) = diagonal.iter().position(|&d| d == 0.0 || !d.is_finite()) {
            return Err(Error::SingularBlock(i));
        }
        Ok(Self {
            inv_diag: diagonal.iter().map(|d| 1.0 / d).collect(),
        })
    }
}

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((z, r), d) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *z = r * d;
        }
    }
}

/// Inverse of a block-diagonal matrix with equally sized, contiguous blocks.
///
/// The inverses are formed once at construction and applied as dense
/// matrix-vector products.
#[derive(Debug, Clone)]
pub struct BlockJacobi {
    block_size: usize,
    inverses: Vec<f64>,
}

impl BlockJacobi {
    /// Blocks are given row-major, `block_size^2` entries each.
    pub fn from_blocks(block_size: usize, blocks: &[f64]) -> Result<Self> {
        let n2 = block_size * block_size;
        assert_eq!(blocks.len() % n2, 0, "block storage is not a multiple of the block size");
        let mut inverses = Vec::with_capacity(blocks.len());
        for (b, data) in blocks.chunks_exact(n2).enumerate() {
            let m = DMatrix::from_row_slice(block_size, block_size, data);
            let inv = m.lu().try_inverse().ok_or(Error::SingularBlock(b))?;
            if inv.iter().any(|v| !v.is_finite()) {
                return Err(Error::SingularBlock(b));
            }
            for i in 0..block_size {
                for j in 0..block_size {
                    inverses.push(inv[(i, j)]);
                }
            }
        }
        Ok(Self { block_size, inverses })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn num_blocks(&self) -> usize {
        self.inverses.len() / (self.block_size * self.block_size)
    }
}

impl Preconditioner for BlockJacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = self.block_size;
        for ((inv, r), z) in self
            .inverses
            .chunks_exact(n * n)
            .zip(r.chunks_exact(n))
            .zip(z.chunks_exact_mut(n))
        {
            for (i, zi) in z.iter_mut().enumerate() {
                let row = &inv[i * n..(i + 1) * n];
                *zi = row.iter().zip(r).map(|(a, b)| a * b).sum();
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    /// Relative residual after each iteration, starting with the initial guess.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    pub rtol: f64,
    pub max_iters: usize,
    pub restart: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            max_iters: 1000,
            restart: 100,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual(op: &dyn LinearOperator, x: &[f64], b: &[f64], r: &mut [f64]) {
    op.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

/// Restarted GMRES with right preconditioning, so the monitored residual is
/// the residual of the original system. Stops on `|b - A x| <= rtol |b|`.
pub fn gmres(
    op: &dyn LinearOperator,
    precond: &dyn Preconditioner,
    rhs: &[f64],
    x0: Option<&[f64]>,
    opts: &GmresOptions,
) -> (Vec<f64>, SolveReport) {
    let n = op.dim();
    assert_eq!(rhs.len(), n, "right-hand side does not match operator dimension");
    let restart = opts.restart.max(1);
    let bnorm = norm(rhs);
    if bnorm == 0.0 {
        return (
            vec![0.0; n],
            SolveReport {
                iterations: 0,
                relative_residual: 0.0,
                converged: true,
                history: vec![0.0],
            },
        );
    }
    let mut x = match x0 {
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };
    let mut r = vec![0.0; n];
    residual(op, &x, rhs, &mut r);
    let mut beta = norm(&r);
    let mut history = vec![beta / bnorm];
    let mut iterations = 0;
    let target = opts.rtol * bnorm;

    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];
    while beta > target && iterations < opts.max_iters {
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<f64> = Vec::new();
        let mut g = vec![beta];

        for j in 0..restart {
            precond.apply(&basis[j], &mut z);
            op.apply(&z, &mut w);
            let mut col = vec![0.0; j + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                col[i] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
            }
            let hnext = norm(&w);
            col[j + 1] = hnext;
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let rho = col[j].hypot(col[j + 1]);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (col[j] / rho, col[j + 1] / rho) };
            col[j] = rho;
            col[j + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g.push(-s * g[j]);
            g[j] *= c;
            h.push(col);
            iterations += 1;
            let est = g[j + 1].abs();
            history.push(est / bnorm);
            if est <= target || hnext == 0.0 || iterations >= opts.max_iters {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }

        // back substitution for the least-squares coefficients
        let m = h.len();
        let mut y = vec![0.0; m];
        for i in (0..m).rev() {
            let s: f64 = ((i + 1)..m).map(|k| h[k][i] * y[k]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        w.iter_mut().for_each(|v| *v = 0.0);
        for (yi, v) in y.iter().zip(&basis) {
            for (wk, vk) in w.iter_mut().zip(v) {
                *wk += yi * vk;
            }
        }
        precond.apply(&w, &mut z);
        for (xk, zk) in x.iter_mut().zip(&z) {
            *xk += zk;
        }
        residual(op, &x, rhs, &mut r);
        beta = norm(&r);
        if !beta.is_finite() {
            break;
        }
    }
    let relative_residual = beta / bnorm;
    (
        x,
        SolveReport {
            iterations,
            relative_residual,
            converged: relative_residual <= opts.rtol,
            history,
        },
    )
}

/// Preconditioned conjugate gradients for symmetric positive definite systems.
pub fn cg(
    op: &dyn LinearOperator,
    precond: &dyn Preconditioner,
    rhs: &[f64],
    x0: Option<&[f64]>,
    rtol: f64,
    max_iters: usize,
) -> (Vec<f64>, SolveReport) {
    let n = op.dim();
    assert_eq!(rhs.len(), n, "right-hand side does not match operator dimension");
    let bnorm = norm(rhs);
    if bnorm == 0.0 {
        return (
            vec![0.0; n],
            SolveReport {
                iterations: 0,
                relative_residual: 0.0,
                converged: true,
                history: vec![0.0],
            },
        );
    }
    let mut x = match x0 {
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };
    let mut r = vec![0.0; n];
    residual(op, &x, rhs, &mut r);
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let mut rnorm = norm(&r);
    let mut history = vec![rnorm / bnorm];
    let mut iterations = 0;
    while rnorm > rtol * bnorm && iterations < max_iters {
        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            break;
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rnorm = norm(&r);
        iterations += 1;
        history.push(rnorm / bnorm);
    }
    residual(op, &x, rhs, &mut r);
    let relative_residual = norm(&r) / bnorm;
    (
        x,
        SolveReport {
            iterations,
            relative_residual,
            converged: relative_residual <= rtol,
            history,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diagonal(Vec<f64>);

    impl LinearOperator for Diagonal {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
    }

    /// Deterministic pseudo-random values in [-1, 1).
    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn random_system(n: usize, spd: bool) -> (DMatrix<f64>, Vec<f64>) {
        let mut seed = 42;
        let mut a = DMatrix::from_fn(n, n, |_, _| lcg(&mut seed) / n as f64);
        if spd {
            a = &a * a.transpose();
        }
        for i in 0..n {
            a[(i, i)] += 2.0;
        }
        let b = (0..n).map(|_| lcg(&mut seed)).collect();
        (a, b)
    }

    #[test]
    fn gmres_identity_one_iteration() {
        let op = Diagonal(vec![1.0; 7]);
        let b: Vec<f64> = (0..7).map(|i| i as f64 - 3.0).collect();
        let (x, rep) = gmres(&op, &IdentityPreconditioner, &b, None, &GmresOptions::default());
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-14);
        }
    }

    #[test]
    fn gmres_diagonal_with_jacobi() {
        let d: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let op = Diagonal(d.clone());
        let b = vec![1.0; 10];
        let pc = Jacobi::new(&d).unwrap();
        let opts = GmresOptions { rtol: 1e-14, ..Default::default() };
        let (x, rep) = gmres(&op, &pc, &b, None, &opts);
        assert!(rep.converged && rep.iterations <= 10);
        for (i, xi) in x.iter().enumerate() {
            assert!((xi - 1.0 / (i + 1) as f64).abs() < 1e-14);
        }
        let (_, plain) = gmres(&op, &IdentityPreconditioner, &b, None, &opts);
        assert!(plain.iterations <= 10);
    }

    #[test]
    fn gmres_matches_dense_lu_and_residual_is_monotone() {
        let (a, b) = random_system(50, false);
        let exact = a.clone().lu().solve(&nalgebra::DVector::from_vec(b.clone())).unwrap();
        let opts = GmresOptions { rtol: 1e-12, max_iters: 200, restart: 7 };
        let (x, rep) = gmres(&a, &IdentityPreconditioner, &b, None, &opts);
        assert!(rep.converged);
        let err: f64 = x.iter().zip(exact.iter()).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        assert!(err / exact.norm() < 1e-10);
        // within each restart cycle the Givens residual never increases
        for cycle in rep.history[1..].chunks(7) {
            for w in cycle.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }
        let mut ax = vec![0.0; 50];
        a.apply(&x, &mut ax);
        let rel = ax.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt() / norm(&b);
        assert!(rel < 1e-10);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let op = Diagonal(vec![2.0; 3]);
        let (x, rep) = gmres(&op, &IdentityPreconditioner, &[0.0; 3], Some(&[1.0; 3]), &GmresOptions::default());
        assert_eq!(x, vec![0.0; 3]);
        assert!(rep.converged && rep.iterations == 0);
        let (x, _) = cg(&op, &IdentityPreconditioner, &[0.0; 3], None, 1e-10, 10);
        assert_eq!(x, vec![0.0; 3]);
    }

    #[test]
    fn non_convergence_is_flagged() {
        let (a, b) = random_system(30, false);
        let opts = GmresOptions { rtol: 1e-14, max_iters: 3, restart: 100 };
        let (_, rep) = gmres(&a, &IdentityPreconditioner, &b, None, &opts);
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
    }

    #[test]
    fn cg_examples() {
        let op = Diagonal(vec![1.0; 5]);
        let (x, rep) = cg(&op, &IdentityPreconditioner, &[1.0, 2.0, 3.0, 4.0, 5.0], None, 1e-12, 10);
        assert_eq!(rep.iterations, 1);
        assert!((x[4] - 5.0).abs() < 1e-14);

        let d: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let (x, rep) = cg(&Diagonal(d.clone()), &IdentityPreconditioner, &d, None, 1e-13, 20);
        assert!(rep.converged && rep.iterations <= 10);
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-12));

        let (a, b) = random_system(50, true);
        let exact = a.clone().cholesky().unwrap().solve(&nalgebra::DVector::from_vec(b.clone()));
        let diag: Vec<f64> = (0..50).map(|i| a[(i, i)]).collect();
        let (x, rep) = cg(&a, &Jacobi::new(&diag).unwrap(), &b, None, 1e-12, 200);
        assert!(rep.converged);
        let err: f64 = x.iter().zip(exact.iter()).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        assert!(err / exact.norm() < 1e-10);
    }

    #[test]
    fn block_jacobi_inverts_block_diagonal_and_is_linear() {
        let blocks = vec![2.0, 1.0, 0.0, 3.0, 4.0, -1.0, 1.0, 1.0];
        let pc = BlockJacobi::from_blocks(2, &blocks).unwrap();
        assert_eq!(pc.num_blocks(), 2);
        let mut a = DMatrix::zeros(4, 4);
        for b in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    a[(2 * b + i, 2 * b + j)] = blocks[4 * b + 2 * i + j];
                }
            }
        }
        let rhs = [1.0, -2.0, 0.5, 3.0];
        let (_, rep) = gmres(&a, &pc, &rhs, None, &GmresOptions { rtol: 1e-14, ..Default::default() });
        assert_eq!(rep.iterations, 1);
        let (x, y) = ([1.0, 2.0, 3.0, 4.0], [-1.0, 0.5, 0.0, 2.0]);
        let mut px = [0.0; 4];
        let mut py = [0.0; 4];
        let mut pxy = [0.0; 4];
        pc.apply(&x, &mut px);
        pc.apply(&y, &mut py);
        let comb: Vec<f64> = (0..4).map(|i| 2.0 * x[i] - 3.0 * y[i]).collect();
        pc.apply(&comb, &mut pxy);
        for i in 0..4 {
            assert!((pxy[i] - (2.0 * px[i] - 3.0 * py[i])).abs() < 1e-14);
        }
        assert!(BlockJacobi::from_blocks(2, &[1.0, 2.0, 2.0, 4.0]).is_err());
    }
}
