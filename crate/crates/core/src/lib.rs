//! Discrete fractional calculus on non-uniform lattices.
//!
//! The crate is organized in three layers:
//!
//! - [`lattice`]: lattice families (quadratic, q-quadratic and their linear
//!   degenerations), symmetric q-brackets, the q-gamma and modified q-gamma
//!   functions, and generalized power functions. This is the scalar kernel
//!   layer everything else calls.
//! - [`nabla`]: grid functions and the backward (nabla) calculus: nested
//!   integer differences, fractional sums, Riemann-Liouville differences in
//!   compose/direct/residue form, Caputo differences, Abel-equation solvers,
//!   Taylor expansions and the uniform-lattice binomial oracle.
//! - [`central`] and [`series`]: the central (delta) calculus on half-shifted
//!   grids, sequential differences, Taylor-identity defects, the basic
//!   fractional exponential/trigonometric functions and series solutions of
//!   fractional difference equations.
//!
//! All numerics are generic over the scalar type through [`Real`]; the
//! `*64` aliases at the crate root fix `f64`, which is what the test suites
//! and the command-line front end use.

use std::fmt::{Debug, Display};

use num_traits as nt;

pub mod central;
pub mod error;
pub(crate) mod gammas;
pub mod grid;
pub mod lattice;
pub mod nabla;
pub mod series;

pub use error::Error;
pub use grid::{FracOrder, GridFunction, OperatorConfig};
pub use lattice::{LatticeFamily, LatticeSpec, StepDirection};

/// Scalar type the whole calculus is generic over.
pub trait Real:
    nt::Float
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::ToPrimitive
    + nt::NumAssignOps
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: nt::Float
        + nt::FloatConst
        + nt::FromPrimitive
        + nt::ToPrimitive
        + nt::NumAssignOps
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
pub(crate) fn fl<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 constant must convert into the scalar type")
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

pub type Lattice64 = LatticeSpec<f64>;
pub type Grid64 = GridFunction<f64>;
pub type Config64 = OperatorConfig<f64>;
pub type CentralConfig64 = central::CentralConfig<f64>;
pub type SeriesSpec64 = series::SeriesSpec<f64>;

pub type Lattice32 = LatticeSpec<f32>;
pub type Grid32 = GridFunction<f32>;
pub type Config32 = OperatorConfig<f32>;
