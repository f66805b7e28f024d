//! Discontinuous Galerkin discretization of the first-order velocity–stress
//! system and its two implicit time steps.

mod operator;
mod pulse;
mod space;

pub use operator::{CombinedOperator, WaveOperator};
pub use pulse::{BoundaryPulse, PulseEnd};
pub use space::{DgSpace, DgState, ReferenceElement, NUM_FIELDS, S11, S12, S22, V1, V2};

use crate::error::{Error, Result};
use crate::krylov::{gmres, GmresOptions, SolveReport};

fn solve(
    op: &WaveOperator,
    alpha: f64,
    rhs: &[f64],
    guess: &[f64],
    opts: &GmresOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let system = CombinedOperator {
        op,
        mass_scale: 1.0,
        upwind_scale: -alpha,
    };
    let pc = op.block_jacobi(alpha)?;
    let (x, report) = gmres(&system, pc.as_ref(), rhs, Some(guess), opts);
    if !report.converged {
        return Err(Error::NotConverged { solver: "GMRES", report });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("wave solution"));
    }
    Ok((x, report))
}

/// Implicit midpoint step
/// `(M - dt/2 A) y_new = (M + dt/2 A) y_old + dt b(t + dt/2)`.
pub fn midpoint_step(
    op: &WaveOperator,
    state: &DgState,
    dt: f64,
    pulse: &BoundaryPulse,
    opts: &GmresOptions,
) -> Result<(DgState, SolveReport)> {
    op.space().check_len(&state.values)?;
    let mut rhs = op.space().zeros();
    op.apply_combination(&state.values, &mut rhs, 1.0, 0.5 * dt);
    let load = op.assemble_load(pulse, state.time + 0.5 * dt);
    for (r, b) in rhs.iter_mut().zip(&load) {
        *r += dt * b;
    }
    let (values, report) = solve(op, 0.5 * dt, &rhs, &state.values, opts)?;
    Ok((
        DgState {
            values,
            time: state.time + dt,
        },
        report,
    ))
}

/// Implicit Euler step across a material change
/// `(M_new - dt A_new) y_new = M_old y_old + dt b_new(t + dt)`.
pub fn euler_step(
    op_new: &WaveOperator,
    op_old: &WaveOperator,
    state: &DgState,
    dt: f64,
    pulse: &BoundaryPulse,
    opts: &GmresOptions,
) -> Result<(DgState, SolveReport)> {
    op_new.space().check_len(&state.values)?;
    op_old.space().check_len(&state.values)?;
    let mut rhs = op_old.space().zeros();
    op_old.apply_mass(&state.values, &mut rhs);
    let load = op_new.assemble_load(pulse, state.time + dt);
    for (r, b) in rhs.iter_mut().zip(&load) {
        *r += dt * b;
    }
    let (values, report) = solve(op_new, dt, &rhs, &state.values, opts)?;
    Ok((
        DgState {
            values,
            time: state.time + dt,
        },
        report,
    ))
}
