//! Open quantum system simulation for studying spontaneous synchronization
//! through information-theoretic order parameters.
//!
//! The crate is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases below fix it to double precision,
//! which is what the sweep drivers use.

pub mod dynamics;
pub mod error;
pub mod measures;
pub mod models;
pub mod operators;
pub mod scalar;
pub mod sparse;
pub mod states;
pub mod sweep;

pub use dynamics::{
    auto_cutoff, build_liouvillian, steady_state, time_evolve, AutoCutoffOptions, EvolveOptions,
    Liouvillian, ModelSpec, SteadyStateOptions, SteadyStateReport, TimeSeries,
};
pub use error::{Error, Result};
pub use operators::{
    annihilation_op, embed, partial_trace, pauli, quadratures, tensor_product, DensityMatrix,
    HilbertStructure, Operator, Pauli,
};
pub use scalar::Real;

pub type Operator64 = Operator<f64>;
pub type Operator32 = Operator<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type ModelSpec64 = ModelSpec<f64>;
pub type Liouvillian64 = Liouvillian<f64>;
pub type SteadyStateReport64 = SteadyStateReport<f64>;
pub type TimeSeries64 = TimeSeries<f64>;
