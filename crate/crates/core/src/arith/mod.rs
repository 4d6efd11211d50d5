//! Deterministic arithmetic kernel.

pub mod cache;
pub mod counts;
pub mod poly;
pub(crate) mod polysieve;
pub mod set;
pub mod sieve;

pub use counts::{
    count_omega_above, count_omega_exceed, count_squarefree_rough, psi_poly_smooth, psi_smooth,
    tau3_interval_sum, SmoothCount,
};
pub use poly::{LinearFactor, LinearSplit, PolySpec};
pub use set::{enumerate_set, factor_set, ArithSet, Element, FactoredSet, SetKind};
pub use sieve::{tau3_prime_power, FactorSieve, DEFAULT_SIEVE_CAP};
