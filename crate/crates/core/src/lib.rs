//! Sieves, exact fourth-moment counting, Gaussian comparison tools and
//! Monte Carlo experiments for sums of random multiplicative functions.

pub mod arith;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod model;
pub mod seed;
pub mod stats;
pub mod trials;

pub use arith::{
    enumerate_set, factor_set, ArithSet, Element, FactorSieve, FactoredSet, PolySpec, SetKind,
};
pub use energy::{EquationKind, SolutionTally, TopPrimeConstraint};
pub use error::{Error, Result};
pub use model::{RmfModel, RmfSample, Twist};
pub use trials::run_trials;
