//! Exact integer utilities: valuations, totients, multiplicative orders,
//! modular powers, primality and factoring.
//!
//! Everything operates on [`Natural`] (an unbounded non-negative integer).
//! Moduli that fit in a machine word take a `u64`/`u128` fast path.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigUint, RandBigInt};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Natural = BigUint;

/// Iterations of Pollard rho allowed per composite cofactor.
pub const DEFAULT_FACTOR_BUDGET: u64 = 1_000_000;

/// Random Miller-Rabin rounds above 64 bits. 4^-65 < 2^-128.
const PROBABILISTIC_ROUNDS: usize = 65;
const PRIMALITY_SEED: u64 = 0x5eed_f3a7_0000_0001;
const TRIAL_DIVISION_LIMIT: u64 = 1000;
const WITNESS_BASES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// `p^exponent` exactly divides the valued integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    pub base: Natural,
    pub exponent: u64,
}

/// Outcome of a primality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Primality {
    Composite,
    /// Proven prime (deterministic below 2^64).
    Prime,
    /// Passed the fixed-seed probabilistic rounds; error below 2^-128.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

/// `p`-adic valuation of `m`.
pub fn nu(p: &Natural, m: &Natural) -> Result<Valuation> {
    if m.is_zero() {
        return Err(Error::ValuationUndefined);
    }
    if !is_prime(p) {
        return Err(Error::InvalidBase(p.clone()));
    }
    let exponent = if *p == Natural::from(2u32) {
        nu2(m)
    } else {
        let mut rest = m.clone();
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        e
    };
    Ok(Valuation {
        base: p.clone(),
        exponent,
    })
}

/// 2-adic valuation; zero for `m = 0` (callers gate on that).
pub fn nu2(m: &Natural) -> u64 {
    m.trailing_zeros().unwrap_or(0)
}

/// Splits `m >= 1` as `2^a * b` with `b` odd.
pub fn split_two_power(m: &Natural) -> (u64, Natural) {
    let a = nu2(m);
    (a, m >> a)
}

pub fn gcd(a: &Natural, b: &Natural) -> Natural {
    a.gcd(b)
}

pub fn pow_mod(base: &Natural, exponent: &Natural, modulus: &Natural) -> Result<Natural> {
    if modulus.is_zero() {
        return Err(Error::InvalidModulus);
    }
    Ok(base.modpow(exponent, modulus))
}

/// `2^(2^n) mod modulus`, by `n` successive squarings starting from 2.
pub fn iterated_square_mod(modulus: &Natural, n: u64) -> Result<Natural> {
    if modulus.is_zero() {
        return Err(Error::InvalidModulus);
    }
    if let Some(m) = modulus.to_u64() {
        return Ok(Natural::from(iterated_square_mod_u64(m, n)));
    }
    let mut s = Natural::from(2u32) % modulus;
    for _ in 0..n {
        if s.is_zero() || s.is_one() {
            break;
        }
        s = (&s * &s) % modulus;
    }
    Ok(s)
}

/// Word-sized [`iterated_square_mod`]. `modulus` must be nonzero.
pub fn iterated_square_mod_u64(modulus: u64, n: u64) -> u64 {
    let mut s = 2 % modulus;
    for _ in 0..n {
        if s <= 1 {
            break;
        }
        s = mul_mod_u64(s, s, modulus);
    }
    s
}

#[inline]
pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(base: u64, mut exponent: u64, m: u64) -> u64 {
    let mut result = 1 % m;
    let mut b = base % m;
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = mul_mod_u64(result, b, m);
        }
        b = mul_mod_u64(b, b, m);
        exponent >>= 1;
    }
    result
}

pub fn is_prime(n: &Natural) -> bool {
    primality(n).is_prime()
}

/// Strong-pseudoprime test: deterministic base set below 2^64, fixed-seed
/// random bases above.
pub fn primality(n: &Natural) -> Primality {
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    for p in primes_up_to(TRIAL_DIVISION_LIMIT) {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    let one = Natural::one();
    let n_minus_one = n - &one;
    let (s, d) = split_two_power(&n_minus_one);
    let passes = |a: &Natural| -> bool {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            return true;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                return true;
            }
        }
        false
    };
    if !passes(&Natural::from(2u32)) {
        return Primality::Composite;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PRIMALITY_SEED);
    let low = Natural::from(2u32);
    for _ in 0..PROBABILISTIC_ROUNDS {
        let a = rng.gen_biguint_range(&low, &n_minus_one);
        if !passes(&a) {
            return Primality::Composite;
        }
    }
    Primality::ProbablePrime
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in WITNESS_BASES_U64 {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in WITNESS_BASES_U64 {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Prime factorization, possibly partial.
///
/// `primes` is sorted by prime with multiplicities merged. Cofactors that
/// Pollard rho could not split within budget land in `unfactored`; they
/// are composite.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub primes: Vec<(Natural, u32)>,
    pub unfactored: Vec<Natural>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_empty()
    }

    /// Multiplies everything back together, unfactored cofactors included.
    pub fn product(&self) -> Natural {
        let mut acc = Natural::one();
        for (p, e) in &self.primes {
            acc *= p.pow(*e);
        }
        for c in &self.unfactored {
            acc *= c;
        }
        acc
    }

    fn complete_or_err(self) -> Result<Self> {
        match self.unfactored.first() {
            Some(c) => Err(Error::FactorizationLimit(c.clone())),
            None => Ok(self),
        }
    }
}

/// Trial division below 1000, then Brent-Pollard rho on what remains.
///
/// `budget` bounds the rho iterations spent on each composite cofactor.
/// `n = 0` is returned as a single unfactored cofactor.
pub fn factor(n: &Natural, budget: u64) -> Factorization {
    if n.is_zero() {
        return Factorization {
            primes: Vec::new(),
            unfactored: vec![Natural::zero()],
        };
    }
    let mut found: Vec<Natural> = Vec::new();
    let mut unfactored = Vec::new();
    let mut rest = n.clone();
    for p in primes_up_to(TRIAL_DIVISION_LIMIT) {
        if rest.is_one() {
            break;
        }
        let p_big = Natural::from(p);
        loop {
            let (q, r) = rest.div_rem(&p_big);
            if !r.is_zero() {
                break;
            }
            found.push(p_big.clone());
            rest = q;
        }
    }
    let mut stack = vec![rest];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if is_prime(&c) {
            found.push(c);
            continue;
        }
        if let Some(r) = exact_square_root(&c) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        match pollard_brent(&c, budget) {
            Some(f) => {
                let g = &c / &f;
                stack.push(f);
                stack.push(g);
            }
            None => unfactored.push(c),
        }
    }
    found.sort();
    unfactored.sort();
    let mut primes: Vec<(Natural, u32)> = Vec::new();
    for p in found {
        match primes.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => primes.push((p, 1)),
        }
    }
    Factorization { primes, unfactored }
}

fn exact_square_root(n: &Natural) -> Option<Natural> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Returns a nontrivial factor of the odd composite `n`, or `None` once
/// `budget` iterations are spent.
fn pollard_brent(n: &Natural, budget: u64) -> Option<Natural> {
    if n.is_even() {
        return Some(Natural::from(2u32));
    }
    const BATCH: u64 = 128;
    let one = Natural::one();
    let mut spent = 0u64;
    let mut c = Natural::one();
    while spent < budget {
        let step = |x: &Natural| -> Natural { (x * x + &c) % n };
        let mut y = Natural::from(2u32);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = Natural::one();
        let mut g = Natural::one();
        let mut r = 1u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            spent += r;
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let batch = BATCH.min(r - k);
                for _ in 0..batch {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                spent += batch;
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
            if spent >= budget && g.is_one() {
                return None;
            }
        }
        if g == *n {
            // batch overshot: replay one step at a time
            loop {
                ys = step(&ys);
                spent += 1;
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one || spent >= budget {
                    break;
                }
            }
        }
        if g != one && g != *n {
            return Some(g);
        }
        c += 1u32;
    }
    None
}

/// Euler's totient from the prime factorization of `n`.
pub fn euler_phi(n: &Natural) -> Result<Natural> {
    euler_phi_with_budget(n, DEFAULT_FACTOR_BUDGET)
}

pub fn euler_phi_with_budget(n: &Natural, budget: u64) -> Result<Natural> {
    if n.is_zero() {
        return Err(Error::PhiUndefined);
    }
    let f = factor(n, budget).complete_or_err()?;
    Ok(phi_from_factors(&f.primes))
}

fn phi_from_factors(primes: &[(Natural, u32)]) -> Natural {
    let mut phi = Natural::one();
    for (p, e) in primes {
        phi *= p.pow(e - 1) * (p - 1u32);
    }
    phi
}

/// Smallest `e >= 1` with `a^e = 1 (mod n)`.
pub fn mult_order(a: &Natural, n: &Natural) -> Result<Natural> {
    if n.is_zero() {
        return Err(Error::InvalidModulus);
    }
    if n.is_one() {
        return Ok(Natural::one());
    }
    if !a.gcd(n).is_one() {
        return Err(Error::NotAUnit {
            a: a.clone(),
            n: n.clone(),
        });
    }
    let phi = euler_phi(n)?;
    let phi_factors = factor(&phi, DEFAULT_FACTOR_BUDGET).complete_or_err()?;
    let mut order = phi;
    for (q, e) in &phi_factors.primes {
        for _ in 0..*e {
            let candidate = &order / q;
            if a.modpow(&candidate, n).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// All primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    primes_in_range(2, limit)
}

/// Primes `p` with `low <= p <= high`, by a segmented sieve.
pub fn primes_in_range(low: u64, high: u64) -> Vec<u64> {
    const SEGMENT: u64 = 1 << 18;
    let low = low.max(2);
    if high < low {
        return Vec::new();
    }
    let root = high.sqrt();
    let base = simple_sieve(root);
    let mut out = Vec::new();
    let mut seg_lo = low;
    loop {
        let seg_hi = seg_lo.saturating_add(SEGMENT - 1).min(high);
        let len = (seg_hi - seg_lo + 1) as usize;
        let mut composite = vec![false; len];
        for &p in &base {
            let sq = p * p;
            if sq > seg_hi {
                break;
            }
            let start = if sq >= seg_lo {
                sq
            } else {
                seg_lo.div_ceil(p) * p
            };
            let mut j = start;
            while j <= seg_hi {
                composite[(j - seg_lo) as usize] = true;
                j += p;
            }
        }
        out.extend(
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| seg_lo + i as u64),
        );
        if seg_hi == high {
            break;
        }
        seg_lo = seg_hi + 1;
    }
    out
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n)
        .filter(|&i| !composite[i])
        .map(|i| i as u64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(v: u64) -> Natural {
        Natural::from(v)
    }

    fn nu_by_division(p: u64, mut m: u64) -> u64 {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        e
    }

    fn phi_by_count(n: u64) -> u64 {
        (1..=n).filter(|&x| x.gcd(&n) == 1).count() as u64
    }

    fn order_by_iteration(a: u64, n: u64) -> u64 {
        if n == 1 {
            return 1;
        }
        let mut x = a % n;
        let mut e = 1;
        while x != 1 {
            x = x * a % n;
            e += 1;
        }
        e
    }

    fn prime_by_trial(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(nu(&nat(2), &nat(1)).unwrap().exponent, 0);
        assert_eq!(
            nu(&nat(2), &nat(12)).unwrap().exponent,
            nu_by_division(2, 12)
        );
        assert_eq!(nu(&nat(2), &nat(12)).unwrap().exponent, 2);
        assert_eq!(
            nu(&nat(5), &nat(250)).unwrap().exponent,
            nu_by_division(5, 250)
        );
        assert_eq!(nu(&nat(5), &nat(250)).unwrap().exponent, 3);
    }

    #[test]
    fn valuation_errors() {
        assert_eq!(nu(&nat(2), &nat(0)), Err(Error::ValuationUndefined));
        assert_eq!(nu(&nat(4), &nat(8)), Err(Error::InvalidBase(nat(4))));
        assert_eq!(nu(&nat(1), &nat(8)), Err(Error::InvalidBase(nat(1))));
        assert_eq!(nu(&nat(0), &nat(8)), Err(Error::InvalidBase(nat(0))));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(&nat(1)).unwrap(), nat(1));
        assert_eq!(euler_phi(&nat(3)).unwrap(), nat(phi_by_count(3)));
        assert_eq!(euler_phi(&nat(10)).unwrap(), nat(4));
        assert_eq!(euler_phi(&nat(0)), Err(Error::PhiUndefined));
    }

    #[test]
    fn phi_matches_count_up_to_ten_thousand() {
        // sieve-based totient table as an independent second route
        let limit = 10_000usize;
        let mut table: Vec<u64> = (0..=limit as u64).collect();
        for i in 2..=limit {
            if table[i] == i as u64 {
                let mut j = i;
                while j <= limit {
                    table[j] -= table[j] / i as u64;
                    j += i;
                }
            }
        }
        for n in 1..=limit as u64 {
            assert_eq!(
                euler_phi(&nat(n)).unwrap(),
                nat(table[n as usize]),
                "n = {n}"
            );
        }
        for n in [1u64, 2, 97, 360, 1001, 9973] {
            assert_eq!(table[n as usize], phi_by_count(n));
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(mult_order(&nat(2), &nat(1)).unwrap(), nat(1));
        assert_eq!(
            mult_order(&nat(2), &nat(7)).unwrap(),
            nat(order_by_iteration(2, 7))
        );
        assert_eq!(mult_order(&nat(2), &nat(7)).unwrap(), nat(3));
        assert_eq!(mult_order(&nat(2), &nat(3)).unwrap(), nat(2));
        assert!(matches!(
            mult_order(&nat(2), &nat(6)),
            Err(Error::NotAUnit { .. })
        ));
    }

    #[test]
    fn pow_mod_examples() {
        assert_eq!(pow_mod(&nat(2), &nat(0), &nat(7)).unwrap(), nat(1));
        assert_eq!(pow_mod(&nat(2), &nat(10), &nat(1000)).unwrap(), nat(24));
        assert_eq!(pow_mod(&nat(3), &nat(4), &nat(5)).unwrap(), nat(1));
        assert_eq!(
            pow_mod(&nat(3), &nat(4), &nat(0)),
            Err(Error::InvalidModulus)
        );
    }

    #[test]
    fn iterated_square_examples() {
        assert_eq!(iterated_square_mod(&nat(7), 0).unwrap(), nat(2));
        assert_eq!(iterated_square_mod(&nat(7), 3).unwrap(), nat(4));
        assert_eq!(iterated_square_mod(&nat(5), 2).unwrap(), nat(1));
        assert_eq!(iterated_square_mod(&nat(1), 5).unwrap(), nat(0));
        assert_eq!(iterated_square_mod(&nat(0), 5), Err(Error::InvalidModulus));
    }

    #[test]
    fn iterated_square_agrees_with_materialized_exponent() {
        for m in (1u64..=10_000)
            .step_by(37)
            .chain([2, 3, 4, 8, 255, 256, 9999, 10_000])
        {
            for n in 0..=20u64 {
                let e = Natural::one() << n;
                assert_eq!(
                    iterated_square_mod(&nat(m), n).unwrap(),
                    pow_mod(&nat(2), &e, &nat(m)).unwrap(),
                    "M = {m}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn iterated_square_big_modulus() {
        let m: Natural = (Natural::one() << 100u32) + 277u32;
        for n in [0u64, 5, 7, 12] {
            let e = Natural::one() << n;
            assert_eq!(
                iterated_square_mod(&m, n).unwrap(),
                Natural::from(2u32).modpow(&e, &m)
            );
        }
    }

    #[test]
    fn primality_examples() {
        assert!(!is_prime(&nat(1)));
        assert!(!is_prime(&nat(0)));
        assert!(is_prime(&nat(7)));
        assert!(is_prime(&nat(65537)));
        assert!(prime_by_trial(65537));
        for n in 0..5000u64 {
            assert_eq!(is_prime(&nat(n)), prime_by_trial(n), "n = {n}");
        }
        // strong pseudoprimes to several small bases
        for n in [
            3_215_031_751u128,
            3_825_123_056_546_413_051,
            318_665_857_834_031_151_167_461,
        ] {
            assert!(!is_prime(&Natural::from(n)));
        }
    }

    #[test]
    fn primality_above_word_size() {
        let m61: Natural = (Natural::one() << 61u32) - 1u32;
        assert_eq!(primality(&m61), Primality::Prime);
        let m127: Natural = (Natural::one() << 127u32) - 1u32;
        assert_eq!(primality(&m127), Primality::ProbablePrime);
        assert_eq!(primality(&(&m127 * &m61)), Primality::Composite);
        let f5: Natural = (Natural::one() << 32u32) + 1u32;
        assert_eq!(primality(&(&f5 * &m127)), Primality::Composite);
    }

    #[test]
    fn factor_examples() {
        assert!(factor(&nat(1), DEFAULT_FACTOR_BUDGET).primes.is_empty());
        assert_eq!(
            factor(&nat(259), DEFAULT_FACTOR_BUDGET).primes,
            vec![(nat(7), 1), (nat(37), 1)]
        );
        assert_eq!(
            factor(&nat(65538), DEFAULT_FACTOR_BUDGET).primes,
            vec![(nat(2), 1), (nat(3), 2), (nat(11), 1), (nat(331), 1)]
        );
    }

    #[test]
    fn factor_fermat_f5_and_squares() {
        // 2^32 + 1 = 641 * 6700417
        let f5: Natural = (Natural::one() << 32u32) + 1u32;
        let f = factor(&f5, DEFAULT_FACTOR_BUDGET);
        assert_eq!(f.primes, vec![(nat(641), 1), (nat(6_700_417), 1)]);
        let p = nat(1_000_003);
        let f = factor(&(&p * &p * nat(1_000_033)), DEFAULT_FACTOR_BUDGET);
        assert_eq!(f.primes, vec![(p, 2), (nat(1_000_033), 1)]);
    }

    #[test]
    fn factor_budget_exhaustion_is_partial() {
        let p: Natural = (Natural::one() << 61u32) - 1u32;
        let q: Natural = (Natural::one() << 89u32) - 1u32;
        let n = &p * &q;
        let f = factor(&n, 1000);
        assert!(!f.is_complete());
        assert_eq!(f.product(), n);
        assert!(matches!(
            euler_phi_with_budget(&n, 1000),
            Err(Error::FactorizationLimit(_))
        ));
    }

    #[test]
    fn segmented_sieve_matches_trial_division() {
        let primes = primes_in_range(1, 3000);
        let expect: Vec<u64> = (0..=3000).filter(|&n| prime_by_trial(n)).collect();
        assert_eq!(primes, expect);
        let window = primes_in_range(999_000, 1_001_000);
        let expect: Vec<u64> = (999_000..=1_001_000).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(window, expect);
        assert!(primes_in_range(10, 9).is_empty());
        // crosses a segment boundary
        let span = primes_in_range((1 << 18) - 100, (1 << 18) + 100);
        let expect: Vec<u64> = ((1 << 18) - 100..=(1 << 18) + 100)
            .filter(|&n| prime_by_trial(n))
            .collect();
        assert_eq!(span, expect);
    }

    proptest! {
        #[test]
        fn valuation_is_exact(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), m in 1u64..1_000_000_000) {
            let v = nu(&nat(p), &nat(m)).unwrap().exponent;
            let pe = nat(p).pow(v as u32);
            prop_assert!((nat(m) % &pe).is_zero());
            prop_assert!(!(nat(m) % (pe * p)).is_zero());
        }

        #[test]
        fn factor_reassembles(n in 1u64..u64::MAX) {
            let f = factor(&nat(n), DEFAULT_FACTOR_BUDGET);
            prop_assert!(f.is_complete());
            prop_assert_eq!(f.product(), nat(n));
            for (p, _) in &f.primes {
                prop_assert!(is_prime(p));
            }
        }

        #[test]
        fn order_divides_phi(a in 1u64..5000, n in 1u64..5000) {
            prop_assume!(a.gcd(&n) == 1);
            let ord = mult_order(&nat(a), &nat(n)).unwrap();
            let phi = euler_phi(&nat(n)).unwrap();
            prop_assert!((phi % &ord).is_zero());
            prop_assert_eq!(ord, nat(order_by_iteration(a, n)));
        }
    }
}
