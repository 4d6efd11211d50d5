//! Rademacher and Steinhaus random multiplicative functions.
//!
//! A sample is a master seed; the value at a prime `p` is a keyed hash of
//! `(seed, p)`, so any value can be produced on demand without state.
//! Steinhaus phases are kept as 53-bit fixed-point fractions of a full
//! turn, which makes `f(mn) = f(m) f(n)` exact at the phase level.

mod decompose;
mod montecarlo;
mod prepared;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::FactorSieve;
use crate::error::{Error, Result};
use crate::seed::KeyedHasher;

pub use decompose::{conditional_decompose, martingale_slices, m_values, Decomposition, RoughElement, Slices};
pub use montecarlo::{monte_carlo_prepared, monte_carlo_sums};
pub use prepared::{normalized_sum, twisted_sum, PreparedSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RmfModel {
    /// Supported on squarefree integers, `f(p) = ±1`.
    Rademacher,
    /// Completely multiplicative, `f(p)` uniform on the unit circle.
    Steinhaus,
}

impl RmfModel {
    pub fn default_twist(self) -> Twist {
        match self {
            RmfModel::Rademacher => Twist::Identity,
            RmfModel::Steinhaus => Twist::Sqrt2Re,
        }
    }
}

impl fmt::Display for RmfModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RmfModel::Rademacher => "rademacher",
            RmfModel::Steinhaus => "steinhaus",
        })
    }
}

impl FromStr for RmfModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rademacher" => Ok(RmfModel::Rademacher),
            "steinhaus" => Ok(RmfModel::Steinhaus),
            _ => Err(Error::invalid(format!("unknown model {s:?}"))),
        }
    }
}

/// Map from the value `f(n)` to the real summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Twist {
    Identity,
    /// `√2 · Re f(n)`
    Sqrt2Re,
    /// `√2 · Im f(n)`
    Sqrt2Im,
}

impl Twist {
    #[inline]
    pub fn apply(self, z: Complex64) -> f64 {
        match self {
            Twist::Identity => z.re,
            Twist::Sqrt2Re => std::f64::consts::SQRT_2 * z.re,
            Twist::Sqrt2Im => std::f64::consts::SQRT_2 * z.im,
        }
    }

    pub fn check_model(self, model: RmfModel) -> Result<()> {
        let ok = matches!(
            (model, self),
            (RmfModel::Rademacher, Twist::Identity)
                | (RmfModel::Steinhaus, Twist::Sqrt2Re | Twist::Sqrt2Im)
        );
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "twist {self} does not apply to the {model} model"
            )))
        }
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Twist::Identity => "identity",
            Twist::Sqrt2Re => "sqrt2-re",
            Twist::Sqrt2Im => "sqrt2-im",
        })
    }
}

impl FromStr for Twist {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "id" => Ok(Twist::Identity),
            "sqrt2-re" | "re" => Ok(Twist::Sqrt2Re),
            "sqrt2-im" | "im" => Ok(Twist::Sqrt2Im),
            _ => Err(Error::invalid(format!("unknown twist {s:?}"))),
        }
    }
}

/// Fixed-point phase unit: phases are multiples of `2^-53` turns stored in
/// the top 53 bits of a `u64`.
const PHASE_MASK: u64 = !0x7ff;

/// Converts a fixed-point phase to a point on the unit circle.
#[inline]
pub fn phase_to_unit(phase: u64) -> Complex64 {
    let theta = std::f64::consts::TAU * crate::seed::unit_f64(phase);
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// One realization of the random function.
#[derive(Clone, Copy, Debug)]
pub struct RmfSample {
    model: RmfModel,
    seed: u64,
    hasher: KeyedHasher,
}

impl RmfSample {
    pub fn new(model: RmfModel, seed: u64) -> Self {
        Self {
            model,
            seed,
            hasher: KeyedHasher::new(seed),
        }
    }

    pub fn model(&self) -> RmfModel {
        self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Rademacher sign at `p`: `-1` when the top hash bit is set.
    #[inline]
    pub fn prime_sign(&self, p: u64) -> i8 {
        if self.hasher.hash(p) >> 63 == 1 {
            -1
        } else {
            1
        }
    }

    /// Steinhaus phase at `p` in fixed point.
    #[inline]
    pub fn prime_phase(&self, p: u64) -> u64 {
        self.hasher.hash(p) & PHASE_MASK
    }

    pub fn prime_value(&self, p: u64) -> Complex64 {
        match self.model {
            RmfModel::Rademacher => Complex64::new(self.prime_sign(p) as f64, 0.0),
            RmfModel::Steinhaus => phase_to_unit(self.prime_phase(p)),
        }
    }

    /// `f` at the integer with the given ascending factorization.
    /// `value` is only used for the error message.
    pub fn value_from_factors(
        &self,
        value: u128,
        factors: impl Iterator<Item = (u64, u32)>,
    ) -> Result<Complex64> {
        match self.model {
            RmfModel::Rademacher => {
                let mut s = 1i8;
                for (p, a) in factors {
                    if a > 1 {
                        return Err(Error::NotSquarefree(value));
                    }
                    s *= self.prime_sign(p);
                }
                Ok(Complex64::new(s as f64, 0.0))
            }
            RmfModel::Steinhaus => {
                let phase = factors.fold(0u64, |acc, (p, a)| {
                    acc.wrapping_add(self.prime_phase(p).wrapping_mul(a as u64))
                });
                Ok(phase_to_unit(phase))
            }
        }
    }

    pub fn f_at(&self, sieve: &FactorSieve, n: u64) -> Result<Complex64> {
        let factors = sieve.factorize(n)?;
        self.value_from_factors(n as u128, factors)
    }
}
