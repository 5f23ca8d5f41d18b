//! Knuth up-arrows over big integers, `F_k(b) = 2↑^(k) b`, the lower
//! inverse `f_k`, and exact checks of the tower facts.
//!
//! Every evaluation takes a bit budget. A value whose bit length would
//! exceed it comes back as [`Tower::Overflow`] rather than an error.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand_core::RngCore;
use serde::Serialize;
use thiserror::Error;

use crate::rng;

/// Default bit budget: `F_2(5)` (65537 bits) fits, `F_2(6)` does not.
pub const DEFAULT_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tower {
    Value(BigUint),
    /// The result needs more than the budgeted bits. `height` counts the
    /// outermost applications completed before the overflow.
    Overflow { height: u64 },
}

impl Tower {
    pub fn value(&self) -> Option<&BigUint> {
        match self {
            Tower::Value(v) => Some(v),
            Tower::Overflow { .. } => None,
        }
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, Tower::Overflow { .. })
    }

    /// `self > n`, where an overflow exceeds any `n` within the budget.
    pub fn exceeds(&self, n: &BigUint) -> bool {
        match self {
            Tower::Value(v) => v > n,
            Tower::Overflow { .. } => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AckermannError {
    #[error("arrow level k must be at least 1")]
    ZeroLevel,
    #[error("base must be at least 1")]
    InvalidBase,
    #[error("f_k(n) needs n >= 1")]
    ZeroArgument,
    #[error("{what} does not fit in {budget} bits; untestable at this size")]
    Overflow { what: String, budget: u64 },
    #[error("M is below the threshold F_k(F_k(7))")]
    BelowThreshold,
}

fn overflow(what: impl Into<String>, budget: u64) -> AckermannError {
    AckermannError::Overflow {
        what: what.into(),
        budget,
    }
}

/// `a↑^(k) b`: `a^b` for `k = 1`, `1` for `b = 0`, and
/// `a↑^(k-1)(a↑^(k) (b-1))` otherwise.
pub fn up_arrow(a: &BigUint, k: u32, b: &BigUint, budget: u64) -> Result<Tower, AckermannError> {
    if k == 0 {
        return Err(AckermannError::ZeroLevel);
    }
    if a.is_zero() {
        return Err(AckermannError::InvalidBase);
    }
    Ok(arrow(a, k, b, budget))
}

fn power(a: &BigUint, b: &BigUint, budget: u64) -> Tower {
    if a.is_one() || b.is_zero() {
        return Tower::Value(BigUint::one());
    }
    // a^b has more than (bits(a) - 1)·b bits
    let lower = BigUint::from(a.bits() - 1) * b;
    if lower >= BigUint::from(budget) {
        return Tower::Overflow { height: 0 };
    }
    let e = b.to_u32().expect("exponent below the budget");
    let v = a.pow(e);
    if v.bits() > budget {
        Tower::Overflow { height: 0 }
    } else {
        Tower::Value(v)
    }
}

fn arrow(a: &BigUint, k: u32, b: &BigUint, budget: u64) -> Tower {
    if k == 1 {
        return power(a, b, budget);
    }
    if a.is_one() {
        return Tower::Value(BigUint::one());
    }
    let mut v = BigUint::one();
    let mut i = BigUint::zero();
    let mut height = 0u64;
    while &i < b {
        match arrow(a, k - 1, &v, budget) {
            Tower::Value(next) => v = next,
            Tower::Overflow { .. } => return Tower::Overflow { height },
        }
        i += 1u32;
        height += 1;
    }
    Tower::Value(v)
}

/// `F_k(b) = 2↑^(k) b`.
pub fn tower(k: u32, b: &BigUint, budget: u64) -> Result<Tower, AckermannError> {
    up_arrow(&BigUint::from(2u32), k, b, budget)
}

/// [`tower`] with a small argument and the default budget.
pub fn big_f(k: u32, b: u64) -> Result<Tower, AckermannError> {
    tower(k, &BigUint::from(b), DEFAULT_BUDGET)
}

/// `f_k(n)`: the largest `b` with `F_k(b) ≤ n`.
///
/// Climbs `F_k(0) = 1, F_k(1), ..` via `F_k(b+1) = F_{k-1}(F_k(b))` and stops
/// at the first value above `n`; nothing wider than `n` plus one bit is
/// ever built. For `k = 1` this is `⌊log₂ n⌋`, read off the bit length.
pub fn f_inv(k: u32, n: &BigUint) -> Result<BigUint, AckermannError> {
    if k == 0 {
        return Err(AckermannError::ZeroLevel);
    }
    if n.is_zero() {
        return Err(AckermannError::ZeroArgument);
    }
    if k == 1 {
        return Ok(BigUint::from(n.bits() - 1));
    }
    let budget = n.bits() + 1;
    let mut b = BigUint::zero();
    let mut v = BigUint::one();
    loop {
        match tower(k - 1, &v, budget)? {
            Tower::Value(next) if next <= *n => {
                v = next;
                b += 1u32;
            }
            _ => return Ok(b),
        }
    }
}

fn value_of(t: Tower, what: impl Into<String>, budget: u64) -> Result<BigUint, AckermannError> {
    match t {
        Tower::Value(v) => Ok(v),
        Tower::Overflow { .. } => Err(overflow(what, budget)),
    }
}

/// `f_k(f_k(F_{k+1}(n+2))) = F_{k+1}(n)`, both sides exact.
pub fn check_fact1(k: u32, n: u64, budget: u64) -> Result<bool, AckermannError> {
    let top = value_of(
        tower(k + 1, &BigUint::from(n + 2), budget)?,
        format!("F_{}({})", k + 1, n + 2),
        budget,
    )?;
    let lhs = f_inv(k, &f_inv(k, &top)?)?;
    let rhs = value_of(tower(k + 1, &BigUint::from(n), budget)?, "F_{k+1}(n)", budget)?;
    Ok(lhs == rhs)
}

/// `f_{k+1}(4M) < f_k(f_k(M))` for `M ≥ F_k(F_k(7))`. Only `k = 1` has a
/// representable threshold (`2^128`); higher levels report an overflow.
pub fn check_fact2(k: u32, m: &BigUint, budget: u64) -> Result<bool, AckermannError> {
    let inner = value_of(tower(k, &BigUint::from(7u32), budget)?, "F_k(7)", budget)?;
    let threshold = value_of(tower(k, &inner, budget)?, "F_k(F_k(7))", budget)?;
    if *m < threshold {
        return Err(AckermannError::BelowThreshold);
    }
    let lhs = f_inv(k + 1, &(m * 4u32))?;
    let rhs = f_inv(k, &f_inv(k, m)?)?;
    Ok(lhs < rhs)
}

/// `Σ_{b=0}^{n} F_k(b) < F_k(n+1)`.
pub fn check_fact3(k: u32, n: u64, budget: u64) -> Result<bool, AckermannError> {
    let rhs = value_of(tower(k, &BigUint::from(n + 1), budget)?, "F_k(n+1)", budget)?;
    let mut sum = BigUint::zero();
    for b in 0..=n {
        sum += value_of(tower(k, &BigUint::from(b), budget)?, "F_k(b)", budget)?;
    }
    Ok(sum < rhs)
}

/// Outcome of the elementary tower facts for one `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppendixReport {
    pub k: u32,
    pub n_max: u64,
    pub holds: bool,
    /// `F_k(n) ≥ n + 1` for `n ≤ n_max`.
    pub growth: bool,
    /// `F_k(n) ≤ F_k(n+1)` for `n < n_max`.
    pub monotone: bool,
    /// `F_{k+1}(n) ≥ 2^n` for `n ≤ n_max`.
    pub power_bound: bool,
    /// `F_k(f_k(M)+1) > M ≥ F_k(f_k(M))` on seeded `M`.
    pub sandwich: bool,
    pub sandwich_samples: usize,
    /// `n` where some value overflowed the budget, so the inequality was
    /// settled by the overflow itself (any overflowing value exceeds
    /// `2^budget`).
    pub certified_by_overflow: Vec<u64>,
    /// `n ≥ 4` where `F_{k+1}(n) = F_k^4(F_{k+1}(n-4)) ≥ 2^{F_k(F_k(2^{n-4})+1)}`
    /// was evaluated with every term inside the budget.
    pub chain_checked: Vec<u64>,
    /// `n ≥ 4` where some term of that chain does not fit.
    pub chain_skipped: Vec<u64>,
    pub chain: bool,
}

/// Number of seeded `M` used for the sandwich check.
pub const SANDWICH_SAMPLES: usize = 100;

pub fn check_appendix_basics(
    k: u32,
    n_max: u64,
    seed: u64,
    budget: u64,
) -> Result<AppendixReport, AckermannError> {
    if k == 0 {
        return Err(AckermannError::ZeroLevel);
    }
    let f = |level: u32, b: u64| tower(level, &BigUint::from(b), budget);
    let mut certified = Vec::new();
    let mut growth = true;
    let mut monotone = true;
    let mut power_bound = true;
    let mut prev: Option<Tower> = None;
    for n in 0..=n_max {
        let cur = f(k, n)?;
        match &cur {
            Tower::Value(v) => growth &= *v >= BigUint::from(n + 1),
            Tower::Overflow { .. } => certified.push(n),
        }
        if let Some(p) = &prev {
            monotone &= match (p, &cur) {
                (Tower::Value(a), Tower::Value(b)) => a <= b,
                (_, Tower::Overflow { .. }) => true,
                (Tower::Overflow { .. }, Tower::Value(_)) => false,
            };
        }
        match f(k + 1, n)? {
            Tower::Value(v) => power_bound &= v.bits() > n,
            Tower::Overflow { .. } => {
                power_bound &= budget >= n;
                if certified.last() != Some(&n) {
                    certified.push(n);
                }
            }
        }
        prev = Some(cur);
    }

    let mut rng = rng::rng_from_seed(seed);
    let mut sandwich = true;
    for _ in 0..SANDWICH_SAMPLES {
        let shift = rng::below(&mut rng, 64) as u32;
        let m = BigUint::from((rng.next_u64() >> shift).max(1));
        let b = f_inv(k, &m)?;
        let low = tower(k, &b, budget)?;
        let high = tower(k, &(&b + 1u32), budget)?;
        sandwich &= low.value().is_some_and(|v| *v <= m) && high.exceeds(&m);
    }

    let mut chain_checked = Vec::new();
    let mut chain_skipped = Vec::new();
    let mut chain = true;
    for n in 4..=n_max {
        match appendix_chain(k, n, budget)? {
            Some(ok) => {
                chain &= ok;
                chain_checked.push(n);
            }
            None => chain_skipped.push(n),
        }
    }

    Ok(AppendixReport {
        k,
        n_max,
        holds: growth && monotone && power_bound && sandwich && chain,
        growth,
        monotone,
        power_bound,
        sandwich,
        sandwich_samples: SANDWICH_SAMPLES,
        certified_by_overflow: certified,
        chain_checked,
        chain_skipped,
        chain,
    })
}

/// `None` when a term of the chain overflows the budget.
fn appendix_chain(k: u32, n: u64, budget: u64) -> Result<Option<bool>, AckermannError> {
    let Some(lhs) = tower(k + 1, &BigUint::from(n), budget)?.value().cloned() else {
        return Ok(None);
    };
    let Some(mut iterated) = tower(k + 1, &BigUint::from(n - 4), budget)?.value().cloned() else {
        return Ok(None);
    };
    for _ in 0..4 {
        match tower(k, &iterated, budget)? {
            Tower::Value(v) => iterated = v,
            Tower::Overflow { .. } => return Ok(None),
        }
    }
    let Some(inner) = tower(k, &(BigUint::one() << (n - 4)), budget)?.value().cloned() else {
        return Ok(None);
    };
    let Some(exponent) = tower(k, &(inner + 1u32), budget)?.value().cloned() else {
        return Ok(None);
    };
    if exponent >= BigUint::from(budget) {
        return Ok(None);
    }
    // lhs ≥ 2^e exactly when lhs has more than e bits
    Ok(Some(lhs == iterated && BigUint::from(lhs.bits()) > exponent))
}
