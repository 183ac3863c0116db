//! Constructive divisibility lemmas with re-checkable certificates.
//!
//! * [`exponent_lift`]: for `nu_2(k) < n`, an index `l > n` with
//!   `2^l = 2^n (mod k)`, built as `l = n + phi(b)` (or `n + ord_b(2)`)
//!   where `k = 2^a * b`, `b` odd.
//! * [`common_divisor_witness`]: an odd prime `p | a_n` with `p != 1 (mod 2^n)`
//!   also divides `a_l` for the lift of `(n, p - 1)`, because
//!   `a_l - a_n = 2^(2^n) * (2^(2^l - 2^n) - 1)` and `p - 1 | 2^l - 2^n`.
//! * [`divisor_chain`]: for `d = 2^t`, `a_n | a_l` where `l` lifts
//!   `(n, 2^n - t)`. The quotient `(2^l - t) / (2^n - t)` is odd, so
//!   `2^(2^n - t) + 1` divides `2^(2^l - t) + 1`.
//!
//! Every constructor verifies its own output before returning it, and
//! [`check_certificate`] re-derives all of it from scratch.
//!
//! The exponent of `d = 2^t` is called `t` throughout so it cannot be
//! confused with the lift modulus `k`.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{self, Natural, Primality};
use crate::error::{Error, Result};
use crate::sequence::{SequenceSpec, DEFAULT_BIT_CAP};
use crate::Index;

/// How the lift step `l - n` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LiftMode {
    /// `l = n + phi(b)`.
    #[default]
    Totient,
    /// `l = n + ord_b(2)`, the smallest step.
    Order,
}

/// `k = 2^a * b` with `b` odd, `a < n < l` and `k | 2^l - 2^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lift {
    pub n: Index,
    pub k: Natural,
    pub a: u64,
    pub b: Natural,
    pub l: Index,
}

/// Odd prime `p` dividing both `a_n` and `a_l`, `n < l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonDivisorWitness {
    pub p: Natural,
    /// Whether `p` was proven prime or passed the probabilistic test.
    pub primality: Primality,
    pub d: Natural,
    pub n: Index,
    pub l: Index,
    pub lift: Lift,
}

/// `a_n | a_l` for `d = 2^t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorChainWitness {
    pub d: Natural,
    pub t: u64,
    pub n: Index,
    pub l: Index,
    pub quotient_odd_check: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Lift(Lift),
    CommonDivisor(CommonDivisorWitness),
    DivisorChain(DivisorChainWitness),
}

fn lift_step(b: &Natural, mode: LiftMode) -> Result<Natural> {
    match mode {
        LiftMode::Totient => arith::euler_phi(b),
        LiftMode::Order => arith::mult_order(&Natural::from(2u32), b),
    }
}

pub fn exponent_lift(n: Index, k: &Natural, mode: LiftMode) -> Result<Lift> {
    if k.is_zero() {
        return Err(Error::InvalidModulus);
    }
    let (a, b) = arith::split_two_power(k);
    if a >= n {
        return Err(Error::ValuationPrecondition {
            n,
            k: k.clone(),
            valuation: a,
        });
    }
    let step = lift_step(&b, mode)?.to_u64().ok_or(Error::IndexOverflow)?;
    let l = n.checked_add(step).ok_or(Error::IndexOverflow)?;
    let lift = Lift {
        n,
        k: k.clone(),
        a,
        b,
        l,
    };
    if !lift_congruence_holds(&lift) {
        return Err(Error::SelfCheckFailed);
    }
    Ok(lift)
}

fn lift_congruence_holds(lift: &Lift) -> bool {
    let two = Natural::from(2u32);
    let lhs = two.modpow(&Natural::from(lift.l), &lift.k);
    let rhs = two.modpow(&Natural::from(lift.n), &lift.k);
    lhs == rhs
}

/// Builds the second divisible term forced by `p | a_n`, `p != 1 (mod 2^n)`.
pub fn common_divisor_witness(
    p: &Natural,
    spec: &SequenceSpec,
    n: Index,
    mode: LiftMode,
) -> Result<CommonDivisorWitness> {
    let primality = arith::primality(p);
    if !primality.is_prime() || p.is_even() {
        return Err(Error::NotOddPrime { p: p.clone() });
    }
    if !spec.term_mod(n, p)?.is_zero() {
        return Err(Error::NotADivisor { p: p.clone(), n });
    }
    let p_minus_one = p - 1u32;
    // n = 0 falls through to the lift, which rejects it on valuation grounds
    if n > 0 && arith::nu2(&p_minus_one) >= n {
        return Err(Error::CongruenceHolds { p: p.clone(), n });
    }
    let lift = exponent_lift(n, &p_minus_one, mode)?;
    let l = lift.l;
    if !spec.term_mod(l, p)?.is_zero() {
        return Err(Error::SelfCheckFailed);
    }
    Ok(CommonDivisorWitness {
        p: p.clone(),
        primality,
        d: spec.d().clone(),
        n,
        l,
        lift,
    })
}

/// `2^n - t`, when `n > nu_2(t)` and `2^n > t`.
fn chain_modulus(n: Index, t: u64) -> Option<Natural> {
    if n >= 64 {
        return None;
    }
    let t_big = Natural::from(t);
    let two_n = Natural::one() << n;
    (n > u64::from(t.trailing_zeros()) && two_n > t_big).then(|| two_n - t_big)
}

/// Lifts `(n, 2^n - t)` for `d = 2^t` and proves `a_n | a_l`.
///
/// `a_n` is materialized for the divisibility check, so `bit_cap` applies
/// to it.
pub fn divisor_chain(
    spec: &SequenceSpec,
    n: Index,
    mode: LiftMode,
    bit_cap: u64,
) -> Result<DivisorChainWitness> {
    let t = spec
        .power_of_two_exponent()
        .ok_or_else(|| Error::NotPowerOfTwo {
            d: spec.d().clone(),
        })?;
    if n >= 63 {
        return Err(Error::TermTooLarge { n, cap: bit_cap });
    }
    let modulus = chain_modulus(n, t).ok_or(Error::ChainPrecondition { n, t })?;
    let lift = exponent_lift(n, &modulus, mode)?;
    let witness = DivisorChainWitness {
        d: spec.d().clone(),
        t,
        n,
        l: lift.l,
        quotient_odd_check: true,
    };
    if !chain_holds(&witness, bit_cap)? {
        return Err(Error::SelfCheckFailed);
    }
    Ok(witness)
}

/// Valuations agree, the exponent quotient is an odd integer and `a_n | a_l`.
fn chain_holds(w: &DivisorChainWitness, bit_cap: u64) -> Result<bool> {
    let Some(low) = chain_modulus(w.n, w.t) else {
        return Ok(false);
    };
    if w.l <= w.n {
        return Ok(false);
    }
    let t = Natural::from(w.t);
    let high = (Natural::one() << w.l) - &t;
    let v = arith::nu2(&t);
    if arith::nu2(&high) != v || arith::nu2(&low) != v {
        return Ok(false);
    }
    let (quotient, rem) = high.div_rem(&low);
    if !rem.is_zero() || quotient.is_even() {
        return Ok(false);
    }
    let spec = SequenceSpec::new(w.d.clone())?;
    let a_n = spec.term(w.n, bit_cap)?;
    Ok(spec.term_mod(w.l, &a_n)?.is_zero())
}

/// Re-verifies a certificate from its fields alone, with the default
/// materialization cap.
pub fn check_certificate(cert: &Certificate) -> bool {
    check_certificate_with_cap(cert, DEFAULT_BIT_CAP)
}

pub fn check_certificate_with_cap(cert: &Certificate, bit_cap: u64) -> bool {
    match cert {
        Certificate::Lift(lift) => check_lift(lift),
        Certificate::CommonDivisor(w) => check_common_divisor(w),
        Certificate::DivisorChain(w) => check_divisor_chain(w, bit_cap),
    }
}

/// Structural identities, the congruence, and `l - n` being one of the two
/// canonical steps.
pub fn check_lift(lift: &Lift) -> bool {
    if lift.k.is_zero() {
        return false;
    }
    let (a, b) = arith::split_two_power(&lift.k);
    if a != lift.a || b != lift.b {
        return false;
    }
    if lift.a >= lift.n || lift.l <= lift.n {
        return false;
    }
    if !lift_congruence_holds(lift) {
        return false;
    }
    let step = Natural::from(lift.l - lift.n);
    [LiftMode::Totient, LiftMode::Order]
        .into_iter()
        .any(|mode| lift_step(&lift.b, mode).is_ok_and(|s| s == step))
}

pub fn check_common_divisor(w: &CommonDivisorWitness) -> bool {
    let primality = arith::primality(&w.p);
    if primality != w.primality || !primality.is_prime() || w.p.is_even() {
        return false;
    }
    if w.lift.n != w.n || w.lift.l != w.l || w.lift.k != &w.p - 1u32 || !check_lift(&w.lift) {
        return false;
    }
    let Ok(spec) = SequenceSpec::new(w.d.clone()) else {
        return false;
    };
    [w.n, w.l]
        .iter()
        .all(|&i| spec.term_mod(i, &w.p).is_ok_and(|r| r.is_zero()))
}

pub fn check_divisor_chain(w: &DivisorChainWitness, bit_cap: u64) -> bool {
    if !w.quotient_odd_check || w.t == 0 || w.t >= u64::from(u32::MAX) {
        return false;
    }
    if w.d != Natural::one() << w.t {
        return false;
    }
    let Some(modulus) = chain_modulus(w.n, w.t) else {
        return false;
    };
    let (a, b) = arith::split_two_power(&modulus);
    let lift = Lift {
        n: w.n,
        k: modulus,
        a,
        b,
        l: w.l,
    };
    check_lift(&lift) && chain_holds(w, bit_cap).unwrap_or(false)
}
