use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::ArithSet;
use crate::error::{Error, Result};
use crate::model::RmfModel;

/// Interval length as a function of the endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum HSpec {
    /// `H = N^alpha`
    PowerLaw { alpha: f64 },
    /// `H = N / (ln N)^A`
    LogPower { a: f64 },
    /// `H = N / exp(√ln N)`
    SubExp,
}

impl HSpec {
    pub fn eval(&self, n: f64) -> f64 {
        match *self {
            HSpec::PowerLaw { alpha } => n.powf(alpha),
            HSpec::LogPower { a } => n / n.ln().powf(a),
            HSpec::SubExp => n / n.ln().sqrt().exp(),
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            HSpec::PowerLaw { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
                Err(Error::invalid(format!("power-law exponent must lie in (0, 1), got {alpha}")))
            }
            HSpec::LogPower { a } if !(a > 0.0 && a.is_finite()) => {
                Err(Error::invalid(format!("log-power exponent must be positive, got {a}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for HSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HSpec::PowerLaw { alpha } => write!(f, "pow:{alpha}"),
            HSpec::LogPower { a } => write!(f, "logpow:{a}"),
            HSpec::SubExp => f.write_str("subexp"),
        }
    }
}

impl FromStr for HSpec {
    type Err = Error;

    /// `pow:ALPHA`, `logpow:A` or `subexp`.
    fn from_str(s: &str) -> Result<Self> {
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number {v:?} in interval length {s:?}")))
        };
        let spec = if let Some(v) = s.strip_prefix("pow:") {
            HSpec::PowerLaw { alpha: num(v)? }
        } else if let Some(v) = s.strip_prefix("logpow:") {
            HSpec::LogPower { a: num(v)? }
        } else if s == "subexp" {
            HSpec::SubExp
        } else {
            return Err(Error::invalid(format!(
                "unknown interval length {s:?}; use pow:ALPHA, logpow:A or subexp"
            )));
        };
        spec.check()?;
        Ok(spec)
    }
}

/// Geometric scales `N_l = round(λ^l X)` for `1 ≤ l ≤ k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyScales {
    pub x: f64,
    pub eps0: f64,
    pub lambda: f64,
    pub k: usize,
    pub scales: Vec<u64>,
    /// `k` was given explicitly rather than derived from `eps0`.
    pub k_forced: bool,
    /// `λ` was lowered to `X^{1/k}` to keep `N_k ≤ X²`.
    pub lambda_shrunk: bool,
}

/// `λ = exp(√ln X)` and `k = ⌊(ln X)^eps0⌋`, or the given `k`. With a forced
/// `k` too large for `λ^k X ≤ X²`, `λ` is lowered to `X^{1/k}`.
pub fn make_poly_scales(x: f64, eps0: f64, k_override: Option<usize>) -> Result<PolyScales> {
    if !(x >= 3.0 && x.is_finite()) {
        return Err(Error::invalid(format!("X must be at least 3, got {x}")));
    }
    if k_override.is_none() && !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::invalid(format!("eps0 must lie in (0, 1), got {eps0}")));
    }
    let lx = x.ln();
    let k = k_override.unwrap_or_else(|| lx.powf(eps0).floor() as usize);
    if k == 0 {
        return Err(Error::invalid(format!(
            "no scales: k = floor((ln X)^eps0) = 0 at X={x}, eps0={eps0}; increase X or eps0"
        )));
    }
    let mut lambda = lx.sqrt().exp();
    let mut lambda_shrunk = false;
    let fits = |lambda: f64| k as f64 * lambda.ln() <= lx * (1.0 + 1e-12);
    if !fits(lambda) {
        if k_override.is_none() {
            return Err(Error::invalid(format!(
                "largest scale exceeds X^2 (k={k}, lambda={lambda}); lower eps0"
            )));
        }
        lambda = x.powf(1.0 / k as f64);
        lambda_shrunk = true;
    }
    let scales: Vec<u64> = (1..=k)
        .map(|l| (lambda.powi(l as i32) * x).round() as u64)
        .collect();
    if scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!(
            "scales collide after rounding (k={k}, lambda={lambda}); increase X or lower k"
        )));
    }
    Ok(PolyScales {
        x,
        eps0,
        lambda,
        k,
        scales,
        k_forced: k_override.is_some(),
        lambda_shrunk,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortScale {
    /// The prime multiplier `l`.
    pub prime: u64,
    /// `N_l = l·X`.
    pub n: u64,
    /// `H_l = ⌊H(N_l)⌋`.
    pub h: u64,
    /// `H_l / N_l`.
    pub gamma: f64,
}

/// Short intervals `(N_l - H_l, N_l]` at `N_l = l·X` for primes `l` in
/// `(h/2, h]`, `h = (X/H(X))^δ`, with the pruning data for the rough sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortScales {
    pub x: u64,
    pub hspec: HSpec,
    pub delta: f64,
    pub eps0: f64,
    pub eps: f64,
    /// `h = (X/H(X))^δ`.
    pub window: f64,
    pub k: usize,
    pub scales: Vec<ShortScale>,
    /// `⌈(X h)^{2/3}⌉`; pruned sets keep `P⁺(n)` above it.
    pub top_prime_floor: u64,
    /// Whether `H(N₁) > N₁/(ln N₁)²`.
    pub large_h: bool,
    /// `⌊(1+ε) ln ln X⌋` in the large-`H` regime.
    pub omega_ceiling: Option<u32>,
    /// `H(X) < X^{11/15}`; recorded, never enforced.
    pub below_length_floor: bool,
    /// Largest ratio `γ_a/γ_b` over the family.
    pub gamma_spread: f64,
}

impl ShortScales {
    /// `N` and the surviving filters for the pruned set at scale `i`.
    pub fn pruned_set(&self, i: usize, model: RmfModel) -> ArithSet {
        let s = &self.scales[i];
        let mut set = ArithSet::interval(s.n, s.h).with_top_prime_floor(self.top_prime_floor);
        if let Some(c) = self.omega_ceiling {
            set = set.with_omega_ceiling(c);
        }
        if model == RmfModel::Rademacher {
            set = set.squarefree();
        }
        set
    }

    /// The whole interval at scale `i` (squarefree for Rademacher).
    pub fn interval_set(&self, i: usize, model: RmfModel) -> ArithSet {
        let s = &self.scales[i];
        let set = ArithSet::interval(s.n, s.h);
        if model == RmfModel::Rademacher {
            set.squarefree()
        } else {
            set
        }
    }

    pub fn max_n(&self) -> u64 {
        self.scales.iter().map(|s| s.n).max().unwrap_or(0)
    }
}

fn is_prime_small(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds the short-interval family from the `k` smallest primes in the
/// window; `k = ⌊(X/H(X))^eps0⌋` unless given.
pub fn make_short_scales(
    x: u64,
    hspec: HSpec,
    delta: f64,
    eps0: f64,
    eps: f64,
    k_override: Option<usize>,
) -> Result<ShortScales> {
    hspec.check()?;
    if (x as f64) <= std::f64::consts::E.exp() {
        return Err(Error::invalid(format!("X must exceed e^e so that ln ln X > 1, got {x}")));
    }
    if !(delta > 0.0 && eps0 > 0.0 && eps > 0.0) {
        return Err(Error::invalid("delta, eps0 and eps must be positive"));
    }
    let xf = x as f64;
    let ratio = xf / hspec.eval(xf);
    if ratio.is_nan() || ratio <= 1.0 {
        return Err(Error::invalid(format!("H(X) must be below X, got X/H(X) = {ratio}")));
    }
    let window = ratio.powf(delta);
    let k = k_override.unwrap_or_else(|| ratio.powf(eps0).floor() as usize);
    if k == 0 {
        return Err(Error::invalid("no scales: k = 0; increase eps0 or X"));
    }
    let lo = (window / 2.0).floor() as u64 + 1;
    let hi = window.floor() as u64;
    let primes: Vec<u64> = (lo..=hi).filter(|&p| is_prime_small(p)).take(k).collect();
    if primes.len() < k {
        return Err(Error::invalid(format!(
            "only {} primes in ({:.3}, {:.3}], need {k} (short by {}); raise delta or lower k",
            primes.len(),
            window / 2.0,
            window,
            k - primes.len()
        )));
    }
    let mut scales = Vec::with_capacity(k);
    for &p in &primes {
        let n = p.checked_mul(x).ok_or_else(|| Error::invalid("scale overflows u64"))?;
        let hv = hspec.eval(n as f64);
        if !(hv >= 1.0 && hv <= n as f64) {
            return Err(Error::invalid(format!("H({n}) = {hv} is not in [1, {n}]")));
        }
        let h = hv.floor() as u64;
        scales.push(ShortScale {
            prime: p,
            n,
            h,
            gamma: h as f64 / n as f64,
        });
    }
    if scales.windows(2).any(|w| w[1].h < w[0].h) {
        return Err(Error::invalid("interval length decreases across the family"));
    }
    if let Some(w) = scales.windows(2).find(|w| w[1].n - w[1].h < w[0].n) {
        return Err(Error::invalid(format!(
            "intervals ending at {} and {} overlap; lower delta",
            w[0].n, w[1].n
        )));
    }
    let n1 = scales[0].n as f64;
    let large_h = hspec.eval(n1) > n1 / n1.ln().powi(2);
    let omega_ceiling = large_h.then(|| ((1.0 + eps) * xf.ln().ln()).floor() as u32);
    let gammas = scales.iter().map(|s| s.gamma);
    let gmax = gammas.clone().fold(f64::MIN, f64::max);
    let gmin = gammas.fold(f64::MAX, f64::min);
    Ok(ShortScales {
        x,
        hspec,
        delta,
        eps0,
        eps,
        window,
        k,
        scales,
        top_prime_floor: (xf * window).powf(2.0 / 3.0).ceil() as u64,
        large_h,
        omega_ceiling,
        below_length_floor: hspec.eval(xf) < xf.powf(11.0 / 15.0),
        gamma_spread: gmax / gmin,
    })
}
