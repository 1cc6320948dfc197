//! Probability densities for the two-slit experiment under two models:
//! the free Schrödinger equation and a nonlocal advection-diffusion
//! equation, with tools to locate fringes and compare the two.

// `!(a > b)` also rejects NaN, which is what the validation checks want.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fringe;
pub mod nlad;
pub mod numerics;
pub mod problem;
pub mod schrodinger;

pub use error::{Error, Result};
pub use numerics::Tolerance;
pub use problem::{
    mass, standard_nlad_params, standard_slits, Grid, Level, NladParams, Normalization, Profile, SeParams,
    SlitPair,
};
