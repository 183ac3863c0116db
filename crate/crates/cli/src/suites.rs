//! Property suites run by `verify`.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shifted_fermat::arith;
use shifted_fermat::lemma::{self, LiftMode};
use shifted_fermat::search;
use shifted_fermat::sequence::verify_product_identity;
use shifted_fermat::{Natural, SequenceSpec, DEFAULT_BIT_CAP};

pub const LIFT_SEED: u64 = 0x1e44a1;
pub const LIFT_CASES: usize = 1000;
pub const COMMON_DIVISOR_SHIFTS: [u64; 6] = [3, 5, 6, 7, 10, 15];
pub const COMMON_DIVISOR_PRIME_BOUND: u64 = 10_000;
pub const CHAIN_EXPONENTS: [u64; 5] = [1, 2, 3, 5, 8];
pub const MAX_INDEX: u64 = 12;
pub const FERMAT_MAX_INDEX: u64 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lift,
    CommonDivisor,
    DivisorChain,
    Fermat,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Lift,
        Suite::CommonDivisor,
        Suite::DivisorChain,
        Suite::Fermat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lift => "lemma1",
            Suite::CommonDivisor => "lemma2",
            Suite::DivisorChain => "lemma4",
            Suite::Fermat => "d1",
        }
    }

    pub fn run(self) -> SuiteResult {
        match self {
            Suite::Lift => lift_suite(),
            Suite::CommonDivisor => common_divisor_suite(),
            Suite::DivisorChain => chain_suite(),
            Suite::Fermat => fermat_suite(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteResult {
    pub name: &'static str,
    pub total: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult {
            name,
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.total > 0
    }

    pub fn summary(&self) -> String {
        format!(
            "suite {}: {} ({}/{} passed)",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.total - self.failures.len(),
            self.total
        )
    }
}

/// Pseudorandom `(n, k)` with `n <= 30`, `1 <= k <= 10^6` and
/// `nu_2(k) < n`, drawn from a fixed seed.
pub fn lift_cases() -> Vec<(u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(LIFT_SEED);
    let mut cases = Vec::with_capacity(LIFT_CASES);
    while cases.len() < LIFT_CASES {
        let n = rng.gen_range(1..=30u64);
        let k = rng.gen_range(1..=1_000_000u64);
        if u64::from(k.trailing_zeros()) < n {
            cases.push((n, k));
        }
    }
    cases
}

fn lift_suite() -> SuiteResult {
    let mut r = SuiteResult::new("lemma1");
    for (n, k) in lift_cases() {
        let k_big = Natural::from(k);
        let lifts =
            [LiftMode::Totient, LiftMode::Order].map(|mode| lemma::exponent_lift(n, &k_big, mode));
        match lifts {
            [Ok(phi), Ok(ord)] => {
                let ok = [&phi, &ord].iter().all(|lift| {
                    lift.l > n
                        && arith::pow_mod_u64(2, lift.l, k) == arith::pow_mod_u64(2, n, k)
                        && lemma::check_lift(lift)
                }) && ord.l <= phi.l;
                r.record(ok, || {
                    format!("n = {n}, k = {k}: l = {} / {}", phi.l, ord.l)
                });
            }
            [a, b] => r.record(false, || format!("n = {n}, k = {k}: {a:?} {b:?}")),
        }
    }
    r
}

fn common_divisor_suite() -> SuiteResult {
    let mut r = SuiteResult::new("lemma2");
    for p in arith::primes_in_range(3, COMMON_DIVISOR_PRIME_BOUND - 1) {
        let floor = u64::from((p - 1).trailing_zeros());
        for d in COMMON_DIVISOR_SHIFTS {
            let spec = SequenceSpec::from_u64(d).expect("positive shift");
            let profile = search::divisibility_profile(p, &spec, MAX_INDEX).expect("p is prime");
            for n in profile.hits().into_iter().filter(|&n| n > floor) {
                let outcome =
                    lemma::common_divisor_witness(&Natural::from(p), &spec, n, LiftMode::Totient);
                let ok = outcome.as_ref().is_ok_and(|w| {
                    w.l > n
                        && spec.term_mod_u64(n, p) == 0
                        && spec.term_mod_u64(w.l, p) == 0
                        && lemma::check_common_divisor(w)
                });
                r.record(ok, || format!("p = {p}, d = {d}, n = {n}: {outcome:?}"));
            }
        }
    }
    r
}

fn chain_suite() -> SuiteResult {
    let mut r = SuiteResult::new("lemma4");
    for t in CHAIN_EXPONENTS {
        let spec = SequenceSpec::new(BigUint::from(1u32) << t).expect("positive shift");
        for n in 1..=MAX_INDEX {
            if n <= u64::from(t.trailing_zeros()) || (1u64 << n) <= t {
                continue;
            }
            let outcome = lemma::divisor_chain(&spec, n, LiftMode::Totient, DEFAULT_BIT_CAP);
            let ok = outcome.as_ref().is_ok_and(|w| chain_is_exact(&spec, n, w));
            r.record(ok, || format!("t = {t}, n = {n}: {outcome:?}"));
        }
    }
    r
}

/// `a_n | a_l`, odd exponent quotient, and `gcd(a_n, a_l) = a_n`.
pub fn chain_is_exact(spec: &SequenceSpec, n: u64, w: &lemma::DivisorChainWitness) -> bool {
    let Ok(a_n) = spec.term(n, DEFAULT_BIT_CAP) else {
        return false;
    };
    let t = Natural::from(w.t);
    let high = (Natural::from(1u32) << w.l) - &t;
    let low = (Natural::from(1u32) << n) - &t;
    let quotient_odd = (&high % &low) == Natural::from(0u32) && (&high / &low).bit(0);
    quotient_odd
        && w.quotient_odd_check
        && spec
            .term_mod(w.l, &a_n)
            .is_ok_and(|r| r == Natural::from(0u32))
        && spec
            .pair_gcd(n, w.l, DEFAULT_BIT_CAP)
            .is_ok_and(|g| g == a_n)
        && lemma::check_divisor_chain(w, DEFAULT_BIT_CAP)
}

fn fermat_suite() -> SuiteResult {
    let mut r = SuiteResult::new("d1");
    let spec = SequenceSpec::fermat();
    for l in 1..=FERMAT_MAX_INDEX {
        for k in 0..l {
            let g = spec.pair_gcd(k, l, DEFAULT_BIT_CAP);
            r.record(g.as_ref().is_ok_and(|g| *g == Natural::from(1u32)), || {
                format!("gcd(a_{k}, a_{l}) = {g:?}")
            });
        }
    }
    for n in 0..=FERMAT_MAX_INDEX {
        let ok = verify_product_identity(n, DEFAULT_BIT_CAP);
        r.record(ok == Ok(true), || {
            format!("product identity n = {n}: {ok:?}")
        });
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_cases_are_valid_and_reproducible() {
        let cases = lift_cases();
        assert_eq!(cases.len(), LIFT_CASES);
        assert_eq!(cases, lift_cases());
        assert!(cases.iter().all(|&(n, k)| (1..=30).contains(&n)
            && (1..=1_000_000).contains(&k)
            && u64::from(k.trailing_zeros()) < n));
    }

    #[test]
    fn fermat_suite_passes() {
        let r = Suite::Fermat.run();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.total, 105 + 15);
    }
}
