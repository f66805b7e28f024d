//! Discontinuous Galerkin velocity–stress elastodynamics coupled with a
//! stress-driven phase-field model for dynamic brittle fracture.
//!
//! The crate is organised bottom-up: [`mesh`] and [`material`] describe the
//! domain, [`dg`] discretizes the wave equation, [`phase_field`] evolves the
//! damage variable, [`krylov`] provides the linear solvers and [`driver`]
//! couples everything into a time loop. [`oracle_1d`] holds the analytic
//! d'Alembert solution used for verification and [`io`] the config, VTU
//! and CSV formats used by the command line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dg;
pub mod driver;
pub mod error;
pub mod io;
pub mod krylov;
pub mod material;
pub mod mesh;
pub mod oracle_1d;
pub mod phase_field;
pub mod quadrature;

pub use error::{Error, Result};
