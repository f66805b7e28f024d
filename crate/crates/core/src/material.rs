//! Isotropic elasticity and phase-field driven degradation.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::mesh::{q1_shape, Mesh, Point};

/// Symmetric 2x2 tensor stored as `(xx, yy, xy)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Sym2 {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 { xx: 0.0, yy: 0.0, xy: 0.0 };
    pub const IDENTITY: Sym2 = Sym2 { xx: 1.0, yy: 1.0, xy: 0.0 };

    pub fn new(xx: f64, yy: f64, xy: f64) -> Self {
        Self { xx, yy, xy }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// Full contraction `a : b`.
    pub fn ddot(&self, other: &Sym2) -> f64 {
        self.xx * other.xx + self.yy * other.yy + 2.0 * self.xy * other.xy
    }

    pub fn scale(&self, s: f64) -> Sym2 {
        Sym2::new(s * self.xx, s * self.yy, s * self.xy)
    }

    pub fn add(&self, other: &Sym2) -> Sym2 {
        Sym2::new(self.xx + other.xx, self.yy + other.yy, self.xy + other.xy)
    }

    /// Tensor applied to a vector.
    pub fn mul_vec(&self, n: Point) -> Point {
        [self.xx * n[0] + self.xy * n[1], self.xy * n[0] + self.yy * n[1]]
    }

    /// Symmetric part of `a (x) b`.
    pub fn sym_outer(a: Point, b: Point) -> Sym2 {
        Sym2::new(a[0] * b[0], a[1] * b[1], 0.5 * (a[0] * b[1] + a[1] * b[0]))
    }
}

/// Isotropic linear elastic material in plane strain (`d = 2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicElastic {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
}

pub const DIM: f64 = 2.0;

impl IsotropicElastic {
    pub fn new(lambda: f64, mu: f64, rho: f64) -> Result<Self> {
        let m = Self { lambda, mu, rho };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::Material(format!("shear modulus mu = {} must be positive", self.mu)));
        }
        if !(2.0 * self.mu + DIM * self.lambda > 0.0) {
            return Err(Error::Material(format!(
                "2 mu + d lambda = {} must be positive",
                2.0 * self.mu + DIM * self.lambda
            )));
        }
        if !(self.rho > 0.0) {
            return Err(Error::Material(format!("density rho = {} must be positive", self.rho)));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            lambda: factor * self.lambda,
            mu: factor * self.mu,
            rho: self.rho,
        }
    }

    pub fn p_wave_speed(&self) -> f64 {
        ((2.0 * self.mu + self.lambda) / self.rho).sqrt()
    }

    pub fn s_wave_speed(&self) -> f64 {
        (self.mu / self.rho).sqrt()
    }
}

/// `C eps = 2 mu eps + lambda tr(eps) I`.
pub fn apply_stiffness(mat: &IsotropicElastic, strain: &Sym2) -> Sym2 {
    strain
        .scale(2.0 * mat.mu)
        .add(&Sym2::IDENTITY.scale(mat.lambda * strain.trace()))
}

/// Exact inverse of [`apply_stiffness`] in two dimensions.
pub fn apply_compliance(mat: &IsotropicElastic, stress: &Sym2) -> Result<Sym2> {
    let bulk = 2.0 * mat.mu + DIM * mat.lambda;
    if !(bulk > 0.0) || !(mat.mu > 0.0) {
        return Err(Error::Material(format!(
            "degenerate material: mu = {}, 2 mu + d lambda = {bulk}",
            mat.mu
        )));
    }
    let (a, b) = compliance_coefficients(mat);
    Ok(stress.scale(a).add(&Sym2::IDENTITY.scale(-b * stress.trace())))
}

/// `(1 / (2 mu), lambda / (2 mu (2 mu + d lambda)))`, so that
/// `C^-1 s = a s - b tr(s) I`.
pub fn compliance_coefficients(mat: &IsotropicElastic) -> (f64, f64) {
    let a = 0.5 / mat.mu;
    let b = mat.lambda / (2.0 * mat.mu * (2.0 * mat.mu + DIM * mat.lambda));
    (a, b)
}

/// `(Z_P, Z_S) = (sqrt(rho (2 mu + lambda)), sqrt(rho mu))`.
pub fn impedances(mat: &IsotropicElastic) -> (f64, f64) {
    (
        (mat.rho * (2.0 * mat.mu + mat.lambda)).sqrt(),
        (mat.rho * mat.mu).sqrt(),
    )
}

static NEXT_VERSION: AtomicU64 = AtomicU64::new(1);

/// Degraded elasticity `s_inf C + (1 - s_inf) C_reg` with `C_reg = reg C`,
/// sampled at the mesh vertices and interpolated bilinearly.
///
/// Density is not degraded. Each field carries a unique version number so
/// cached operators can tell whether the material was rebuilt.
#[derive(Debug, Clone)]
pub struct DegradedMaterialField {
    base: IsotropicElastic,
    reg_factor: f64,
    nodal_s_inf: Vec<f64>,
    /// Stiffness scaling per vertex, in `[reg_factor, 1]`.
    nodal_factor: Vec<f64>,
    version: u64,
}

impl DegradedMaterialField {
    pub fn undamaged(base: IsotropicElastic, reg_factor: f64, num_vertices: usize) -> Result<Self> {
        degrade(&vec![1.0; num_vertices], base, reg_factor)
    }

    pub fn base(&self) -> &IsotropicElastic {
        &self.base
    }

    pub fn reg_factor(&self) -> f64 {
        self.reg_factor
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn nodal_s_inf(&self) -> &[f64] {
        &self.nodal_s_inf
    }

    pub fn nodal_factor(&self) -> &[f64] {
        &self.nodal_factor
    }

    pub fn num_nodes(&self) -> usize {
        self.nodal_factor.len()
    }

    pub fn nodal_material(&self, node: usize) -> IsotropicElastic {
        self.base.scaled(self.nodal_factor[node])
    }

    /// Interpolated stiffness factor at reference point `p` of `cell`.
    pub fn factor_at(&self, mesh: &Mesh, cell: usize, p: Point) -> f64 {
        let n = q1_shape(p);
        let c = mesh.cells()[cell];
        (0..4).map(|a| n[a] * self.nodal_factor[c[a]]).sum()
    }

    pub fn material_at(&self, mesh: &Mesh, cell: usize, p: Point) -> IsotropicElastic {
        self.base.scaled(self.factor_at(mesh, cell, p))
    }
}

/// Builds the degraded field with the identity degradation function.
pub fn degrade(nodal_s_inf: &[f64], base: IsotropicElastic, reg_factor: f64) -> Result<DegradedMaterialField> {
    degrade_with(nodal_s_inf, base, reg_factor, |s| s)
}

/// Builds the degraded field with a monotone degradation function `g`,
/// `g(0) = 0`, `g(1) = 1`.
pub fn degrade_with(
    nodal_s_inf: &[f64],
    base: IsotropicElastic,
    reg_factor: f64,
    g: impl Fn(f64) -> f64,
) -> Result<DegradedMaterialField> {
    base.validate()?;
    if !(reg_factor > 0.0 && reg_factor <= 1.0) {
        return Err(Error::Material(format!("reg_factor = {reg_factor} must lie in (0, 1]")));
    }
    if let Some((i, s)) = nodal_s_inf
        .iter()
        .enumerate()
        .find(|(_, s)| !(0.0..=1.0).contains(*s))
    {
        return Err(Error::Material(format!("nodal s_inf[{i}] = {s} outside [0, 1]")));
    }
    let nodal_factor = nodal_s_inf
        .iter()
        .map(|&s| {
            let g = g(s);
            g + (1.0 - g) * reg_factor
        })
        .collect();
    Ok(DegradedMaterialField {
        base,
        reg_factor,
        nodal_s_inf: nodal_s_inf.to_vec(),
        nodal_factor,
        version: NEXT_VERSION.fetch_add(1, Ordering::Relaxed),
    })
}
