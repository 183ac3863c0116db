//! Witness search: pairs `(k, l)` with `gcd(a_k, a_l) > m`.
//!
//! Three routes, tried in order:
//!
//! 1. `d = 2^t`: a divisor chain `a_n | a_l` with `a_n > m`. The reported
//!    bound is the exact gcd.
//! 2. Prime-driven: scan primes `p > m` in ascending order for the first
//!    `n <= n_max` with `p | a_n` and `p != 1 (mod 2^n)`, then force a second
//!    divisible term with the common-divisor construction. The bound is `p`, a
//!    divisor of the gcd.
//! 3. Exhaustive scan of all pairs below a small index, exact gcds.
//!
//! Every report is re-verified with [`check_report`] before it is returned.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{ToPrimitive, Zero};

use crate::arith::{self, Natural};
use crate::error::{Error, Result};
use crate::lemma::{self, CommonDivisorWitness, DivisorChainWitness, LiftMode};
use crate::sequence::{SequenceSpec, DEFAULT_BIT_CAP};
use crate::Index;

/// Primes are sieved in windows of this width.
const PRIME_WINDOW: u64 = 1 << 20;

/// Which `n` satisfy `p | a_n`, read off the orbit of `x -> x^2 mod p`
/// started at 2.
///
/// `n` is a hit iff it is in `hits_preperiodic`, or `n >= tail_length` and
/// `(n - tail_length) % cycle_length` is in `hits_periodic`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitProfile {
    pub p: u64,
    pub d: Natural,
    pub tail_length: u64,
    pub cycle_length: u64,
    pub hits_preperiodic: Vec<Index>,
    pub hits_periodic: Vec<u64>,
    /// Index bound the profile was requested for; see [`OrbitProfile::hits`].
    pub index_bound: Index,
}

impl OrbitProfile {
    pub fn is_hit(&self, n: Index) -> bool {
        if n < self.tail_length {
            self.hits_preperiodic.binary_search(&n).is_ok()
        } else {
            let r = (n - self.tail_length) % self.cycle_length;
            self.hits_periodic.binary_search(&r).is_ok()
        }
    }

    pub fn hits_up_to(&self, bound: Index) -> Vec<Index> {
        let mut out: Vec<Index> = self
            .hits_preperiodic
            .iter()
            .copied()
            .filter(|&n| n <= bound)
            .collect();
        if self.hits_periodic.is_empty() {
            return out;
        }
        let mut base = self.tail_length;
        while base <= bound {
            for &r in &self.hits_periodic {
                match base.checked_add(r) {
                    Some(n) if n <= bound => out.push(n),
                    _ => return out,
                }
            }
            match base.checked_add(self.cycle_length) {
                Some(next) => base = next,
                None => break,
            }
        }
        out
    }

    /// Hits with `n <= index_bound`.
    pub fn hits(&self) -> Vec<Index> {
        self.hits_up_to(self.index_bound)
    }
}

/// Orbit values `s_0 .. s_(tail + cycle - 1)` plus `(tail, cycle)`.
fn orbit(p: u64, limit: u64) -> Result<(Vec<u64>, u64, u64)> {
    if p == 0 {
        return Err(Error::InvalidModulus);
    }
    let mut first_seen: BTreeMap<u64, u64> = BTreeMap::new();
    let mut values = Vec::new();
    let mut s = 2 % p;
    for i in 0..=limit {
        if let Some(&j) = first_seen.get(&s) {
            return Ok((values, j, i - j));
        }
        first_seen.insert(s, i);
        values.push(s);
        s = arith::mul_mod_u64(s, s, p);
    }
    Err(Error::OrbitLimit { limit })
}

/// Minimal `(tail, cycle)` of `x -> x^2 mod p` from 2.
pub fn squaring_orbit(p: u64, limit: u64) -> Result<(u64, u64)> {
    orbit(p, limit).map(|(_, tail, cycle)| (tail, cycle))
}

pub fn divisibility_profile(
    p: u64,
    spec: &SequenceSpec,
    index_bound: Index,
) -> Result<OrbitProfile> {
    let (values, tail, cycle) = orbit(p, p)?;
    let d = spec.d_mod_u64(p);
    let hit = |s: u64| (s as u128 + d as u128).is_multiple_of(p as u128);
    let hits_preperiodic = (0..tail).filter(|&j| hit(values[j as usize])).collect();
    let hits_periodic = (0..cycle)
        .filter(|&r| hit(values[(tail + r) as usize]))
        .collect();
    Ok(OrbitProfile {
        p,
        d: spec.d().clone(),
        tail_length: tail,
        cycle_length: cycle,
        hits_preperiodic,
        hits_periodic,
        index_bound,
    })
}

/// Smallest `n <= n_max` with `p | a_n` and `n > nu_2(p - 1)`.
///
/// Walks the first `n_max + 1` orbit values only; agrees with the hit set
/// of [`divisibility_profile`].
pub fn prime_candidate(spec: &SequenceSpec, p: u64, n_max: Index) -> Option<Index> {
    if p < 3 || p.is_multiple_of(2) {
        return None;
    }
    let floor = u64::from((p - 1).trailing_zeros());
    let d = spec.d_mod_u64(p);
    let mut s = 2 % p;
    for n in 0..=n_max {
        if n > floor && (s as u128 + d as u128).is_multiple_of(p as u128) {
            return Some(n);
        }
        s = arith::mul_mod_u64(s, s, p);
    }
    None
}

/// Prime-driven report for a prime already known to qualify at index `n`.
pub fn witness_from_prime(
    spec: &SequenceSpec,
    m: &Natural,
    p: u64,
    n: Index,
    n_max: Index,
    mode: LiftMode,
) -> Result<WitnessReport> {
    let profile = divisibility_profile(p, spec, n_max)?;
    if !profile.is_hit(n) {
        return Err(Error::SelfCheckFailed);
    }
    let witness = lemma::common_divisor_witness(&Natural::from(p), spec, n, mode)?;
    Ok(WitnessReport {
        d: spec.d().clone(),
        m: m.clone(),
        k: witness.n,
        l: witness.l,
        gcd_lower_bound: witness.p.clone(),
        exact: false,
        route: Route::PrimeDriven,
        certificate: ReportCertificate::CommonDivisor(witness),
    })
}

/// First odd prime `p` with `p > m` (and `p > 2`) in scan order.
pub fn first_search_prime(m: &Natural) -> Option<u64> {
    let m = m.to_u64()?;
    m.max(2).checked_add(1)
}

/// Scans primes in `(max(m, 2), p_max]` ascending; first qualifying
/// `(p, n)` wins.
pub fn prime_driven_search(
    spec: &SequenceSpec,
    m: &Natural,
    p_max: u64,
    n_max: Index,
    mode: LiftMode,
) -> Option<WitnessReport> {
    let mut low = first_search_prime(m)?;
    while low <= p_max {
        let high = low.saturating_add(PRIME_WINDOW - 1).min(p_max);
        for p in arith::primes_in_range(low, high) {
            if let Some(n) = prime_candidate(spec, p, n_max) {
                if let Ok(report) = witness_from_prime(spec, m, p, n, n_max, mode) {
                    return Some(report);
                }
            }
        }
        low = high.checked_add(1)?;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanEntry {
    pub k: Index,
    pub l: Index,
    pub gcd: Natural,
}

/// Exact gcds for all `0 <= k < l <= max_index`, plus the first pair (in
/// `(k, l)` order) attaining the largest gcd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanTable {
    pub entries: Vec<ScanEntry>,
    pub best: Option<ScanEntry>,
}

pub fn exhaustive_scan(spec: &SequenceSpec, max_index: Index, bit_cap: u64) -> Result<ScanTable> {
    spec.term(max_index, bit_cap)?;
    let mut entries = Vec::new();
    let mut best: Option<ScanEntry> = None;
    for k in 0..max_index {
        let a_k = spec.term(k, bit_cap)?;
        // s_l mod a_k, stepping l upward; s_k = a_k - d
        let mut s = arith::iterated_square_mod(&a_k, k)?;
        for l in k + 1..=max_index {
            s = (&s * &s) % &a_k;
            let gcd = arith::gcd(&a_k, &((&s + spec.d()) % &a_k));
            let entry = ScanEntry { k, l, gcd };
            if best.as_ref().is_none_or(|b| entry.gcd > b.gcd) {
                best = Some(entry.clone());
            }
            entries.push(entry);
        }
    }
    Ok(ScanTable { entries, best })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    PowerOfTwoChain,
    PrimeDriven,
    ExhaustiveScan,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::PowerOfTwoChain => "power-of-two-chain",
            Route::PrimeDriven => "prime-driven",
            Route::ExhaustiveScan => "exhaustive-scan",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Route::PowerOfTwoChain,
            Route::PrimeDriven,
            Route::ExhaustiveScan,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReportCertificate {
    DivisorChain(DivisorChainWitness),
    CommonDivisor(CommonDivisorWitness),
    Scan(ScanEntry),
}

/// `gcd_lower_bound > m` divides `gcd(a_k, a_l)`; `exact` marks whether it
/// is the gcd itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub d: Natural,
    pub m: Natural,
    pub k: Index,
    pub l: Index,
    pub gcd_lower_bound: Natural,
    pub exact: bool,
    pub route: Route,
    pub certificate: ReportCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub bit_cap: u64,
    pub p_max: u64,
    pub n_max: Index,
    /// Largest index the exhaustive fallback scans.
    pub scan_max_index: Index,
    pub lift_mode: LiftMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            bit_cap: DEFAULT_BIT_CAP,
            p_max: 1_000_000,
            n_max: 64,
            scan_max_index: 16,
            lift_mode: LiftMode::Totient,
        }
    }
}

fn power_of_two_route(
    spec: &SequenceSpec,
    m: &Natural,
    cfg: &SearchConfig,
) -> Option<WitnessReport> {
    let t = spec.power_of_two_exponent()?;
    for n in 1..63 {
        if n <= u64::from(t.trailing_zeros()) || (1u64 << n) <= t {
            continue;
        }
        let a_n = spec.term(n, cfg.bit_cap).ok()?;
        if a_n <= *m {
            continue;
        }
        let chain = lemma::divisor_chain(spec, n, cfg.lift_mode, cfg.bit_cap).ok()?;
        return Some(WitnessReport {
            d: spec.d().clone(),
            m: m.clone(),
            k: n,
            l: chain.l,
            gcd_lower_bound: a_n,
            exact: true,
            route: Route::PowerOfTwoChain,
            certificate: ReportCertificate::DivisorChain(chain),
        });
    }
    None
}

fn scan_route(spec: &SequenceSpec, m: &Natural, cfg: &SearchConfig) -> Option<WitnessReport> {
    let top = (0..=cfg.scan_max_index)
        .take_while(|&k| spec.term(k, cfg.bit_cap).is_ok())
        .last()?;
    let best = exhaustive_scan(spec, top, cfg.bit_cap).ok()?.best?;
    (best.gcd > *m).then(|| WitnessReport {
        d: spec.d().clone(),
        m: m.clone(),
        k: best.k,
        l: best.l,
        gcd_lower_bound: best.gcd.clone(),
        exact: true,
        route: Route::ExhaustiveScan,
        certificate: ReportCertificate::Scan(best),
    })
}

/// Sequential witness search.
pub fn find_witness(spec: &SequenceSpec, m: &Natural, cfg: &SearchConfig) -> Result<WitnessReport> {
    find_witness_with(spec, m, cfg, |spec, m, cfg| {
        prime_driven_search(spec, m, cfg.p_max, cfg.n_max, cfg.lift_mode)
    })
}

/// [`find_witness`] with a caller-supplied prime-driven route, e.g. a
/// parallel one. It must return the same report as [`prime_driven_search`].
pub fn find_witness_with<F>(
    spec: &SequenceSpec,
    m: &Natural,
    cfg: &SearchConfig,
    prime_route: F,
) -> Result<WitnessReport>
where
    F: FnOnce(&SequenceSpec, &Natural, &SearchConfig) -> Option<WitnessReport>,
{
    if m.is_zero() || *spec.d() < Natural::from(2u32) {
        return Err(Error::SearchPrecondition);
    }
    let report = power_of_two_route(spec, m, cfg)
        .or_else(|| prime_route(spec, m, cfg))
        .or_else(|| scan_route(spec, m, cfg))
        .ok_or(Error::Exhausted)?;
    if !check_report(&report, cfg.bit_cap) {
        return Err(Error::SelfCheckFailed);
    }
    Ok(report)
}

/// Re-verifies a report: distinct indices, `bound > m`, `bound` divides both
/// terms, and the embedded certificate is valid and consistent with it.
pub fn check_report(report: &WitnessReport, bit_cap: u64) -> bool {
    let Ok(spec) = SequenceSpec::new(report.d.clone()) else {
        return false;
    };
    let bound = &report.gcd_lower_bound;
    if report.k >= report.l || *bound <= report.m || bound.is_zero() {
        return false;
    }
    let divides = |i: Index| spec.term_mod(i, bound).is_ok_and(|r| r.is_zero());
    if !divides(report.k) || !divides(report.l) {
        return false;
    }
    let exact_gcd = || {
        spec.pair_gcd(report.k, report.l, bit_cap)
            .is_ok_and(|g| g == *bound)
    };
    match (&report.route, &report.certificate) {
        (Route::PowerOfTwoChain, ReportCertificate::DivisorChain(w)) => {
            report.exact
                && w.d == report.d
                && w.n == report.k
                && w.l == report.l
                && spec.term(w.n, bit_cap).is_ok_and(|a| a == *bound)
                && lemma::check_divisor_chain(w, bit_cap)
                && exact_gcd()
        }
        (Route::PrimeDriven, ReportCertificate::CommonDivisor(w)) => {
            !report.exact
                && w.d == report.d
                && w.p == *bound
                && w.n == report.k
                && w.l == report.l
                && lemma::check_common_divisor(w)
        }
        (Route::ExhaustiveScan, ReportCertificate::Scan(e)) => {
            report.exact && e.k == report.k && e.l == report.l && e.gcd == *bound && exact_gcd()
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_traits::One;

    fn nat(v: u64) -> Natural {
        Natural::from(v)
    }

    fn spec(d: u64) -> SequenceSpec {
        SequenceSpec::from_u64(d).unwrap()
    }

    /// Brute-force orbit: first repeat by scanning all earlier values.
    fn orbit_by_scan(p: u64) -> (u64, u64) {
        let mut seen = vec![2 % p];
        loop {
            let last = *seen.last().unwrap();
            let next = last * last % p;
            if let Some(j) = seen.iter().position(|&v| v == next) {
                return (j as u64, seen.len() as u64 - j as u64);
            }
            seen.push(next);
        }
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(squaring_orbit(7, 7).unwrap(), (0, 2));
        assert_eq!(squaring_orbit(5, 5).unwrap(), (2, 1));
        assert_eq!(squaring_orbit(3, 3).unwrap(), (1, 1));
        for p in arith::primes_up_to(3000) {
            assert_eq!(squaring_orbit(p, p).unwrap(), orbit_by_scan(p), "p = {p}");
        }
    }

    #[test]
    fn orbit_limit() {
        // 7919: orbit longer than 3 steps
        assert_eq!(squaring_orbit(7919, 3), Err(Error::OrbitLimit { limit: 3 }));
        assert_eq!(squaring_orbit(0, 3), Err(Error::InvalidModulus));
    }

    #[test]
    fn profile_examples() {
        let odd: Vec<u64> = (0..=10).filter(|n| n % 2 == 1).collect();
        assert_eq!(divisibility_profile(7, &spec(3), 10).unwrap().hits(), odd);
        assert_eq!(
            divisibility_profile(5, &spec(3), 10).unwrap().hits(),
            vec![0]
        );
        let tail: Vec<u64> = (1..=10).collect();
        assert_eq!(divisibility_profile(3, &spec(5), 10).unwrap().hits(), tail);
        // p | d: s_n is a unit, never -d
        assert!(divisibility_profile(3, &spec(6), 40)
            .unwrap()
            .hits()
            .is_empty());
    }

    #[test]
    fn profile_matches_direct_residues() {
        for p in arith::primes_in_range(3, 700) {
            for d in 1..=10u64 {
                let s = spec(d);
                let profile = divisibility_profile(p, &s, 12).unwrap();
                let direct: Vec<u64> = (0..=12).filter(|&n| s.term_mod_u64(n, p) == 0).collect();
                assert_eq!(profile.hits(), direct, "p = {p}, d = {d}");
                let floor = u64::from((p - 1).trailing_zeros());
                assert_eq!(
                    prime_candidate(&s, p, 12),
                    direct.iter().copied().find(|&n| n > floor)
                );
            }
        }
    }

    #[test]
    fn prime_search_examples() {
        let r = prime_driven_search(&spec(3), &nat(5), 100, 12, LiftMode::Totient).unwrap();
        assert_eq!((r.gcd_lower_bound.clone(), r.k, r.l), (nat(7), 3, 5));
        let r = prime_driven_search(&spec(5), &nat(2), 100, 12, LiftMode::Totient).unwrap();
        assert_eq!((r.gcd_lower_bound.clone(), r.k, r.l), (nat(3), 2, 3));
        assert!(prime_driven_search(&spec(3), &nat(3), 5, 12, LiftMode::Totient).is_none());
    }

    #[test]
    fn scan_examples() {
        let t = exhaustive_scan(&SequenceSpec::fermat(), 6, DEFAULT_BIT_CAP).unwrap();
        assert_eq!(t.entries.len(), 21);
        assert!(t.entries.iter().all(|e| e.gcd.is_one()));

        let t = exhaustive_scan(&spec(3), 5, DEFAULT_BIT_CAP).unwrap();
        let best = t.best.unwrap();
        assert_eq!((best.k, best.l, best.gcd), (1, 3, nat(7)));
        assert!(t
            .entries
            .iter()
            .any(|e| (e.k, e.l) == (3, 5) && e.gcd == nat(7)));

        let t = exhaustive_scan(&spec(2), 4, DEFAULT_BIT_CAP).unwrap();
        let best = t.best.unwrap();
        assert_eq!((best.k, best.l, best.gcd), (2, 4, nat(18)));

        for e in exhaustive_scan(&spec(12), 8, DEFAULT_BIT_CAP)
            .unwrap()
            .entries
        {
            assert_eq!(spec(12).pair_gcd(e.k, e.l, DEFAULT_BIT_CAP).unwrap(), e.gcd);
        }
        assert!(exhaustive_scan(&spec(2), 30, DEFAULT_BIT_CAP).is_err());
    }

    #[test]
    fn witness_examples() {
        let cfg = SearchConfig::default();
        let r = find_witness(&spec(4), &nat(10), &cfg).unwrap();
        assert_eq!(
            (r.route, r.k, r.l, r.gcd_lower_bound.clone()),
            (Route::PowerOfTwoChain, 2, 3, nat(20))
        );
        let r = find_witness(&spec(2), &nat(5), &cfg).unwrap();
        assert_eq!(
            (r.route, r.k, r.l, r.gcd_lower_bound.clone()),
            (Route::PowerOfTwoChain, 1, 2, nat(6))
        );
        let r = find_witness(&spec(3), &nat(5), &cfg).unwrap();
        assert_eq!(
            (r.route, r.k, r.l, r.gcd_lower_bound.clone()),
            (Route::PrimeDriven, 3, 5, nat(7))
        );
    }

    #[test]
    fn witness_errors_and_fallback() {
        let cfg = SearchConfig::default();
        assert_eq!(
            find_witness(&spec(1), &nat(5), &cfg),
            Err(Error::SearchPrecondition)
        );
        assert_eq!(
            find_witness(&spec(3), &nat(0), &cfg),
            Err(Error::SearchPrecondition)
        );
        // no primes to scan: falls back to the exhaustive table
        let narrow = SearchConfig {
            p_max: 2,
            scan_max_index: 6,
            ..cfg.clone()
        };
        let r = find_witness(&spec(3), &nat(5), &narrow).unwrap();
        assert_eq!(
            (r.route, r.k, r.l, r.gcd_lower_bound.clone()),
            (Route::ExhaustiveScan, 1, 3, nat(7))
        );
        let hopeless = SearchConfig {
            p_max: 2,
            scan_max_index: 3,
            ..cfg
        };
        assert_eq!(
            find_witness(&spec(3), &nat(1_000_000), &hopeless),
            Err(Error::Exhausted)
        );
    }

    #[test]
    fn power_of_two_bound_is_exact_gcd() {
        for t in 1..=9u64 {
            let s = SequenceSpec::new(Natural::one() << t).unwrap();
            for m in [1u64, 10, 1000, 100_000, 1 << 40] {
                let r = find_witness(&s, &nat(m), &SearchConfig::default()).unwrap();
                assert_eq!(r.route, Route::PowerOfTwoChain);
                assert_eq!(
                    s.pair_gcd(r.k, r.l, DEFAULT_BIT_CAP).unwrap(),
                    r.gcd_lower_bound
                );
                assert!(r.gcd_lower_bound > nat(m));
            }
        }
    }

    #[test]
    fn report_checker_rejects_tampering() {
        let r = find_witness(&spec(3), &nat(5), &SearchConfig::default()).unwrap();
        assert!(check_report(&r, DEFAULT_BIT_CAP));
        let bad = [
            WitnessReport { k: 4, ..r.clone() },
            WitnessReport { l: 6, ..r.clone() },
            WitnessReport {
                gcd_lower_bound: nat(37),
                ..r.clone()
            },
            WitnessReport {
                m: nat(7),
                ..r.clone()
            },
            WitnessReport {
                exact: true,
                ..r.clone()
            },
            WitnessReport {
                route: Route::ExhaustiveScan,
                ..r.clone()
            },
            WitnessReport {
                d: nat(5),
                ..r.clone()
            },
        ];
        for b in bad {
            assert!(!check_report(&b, DEFAULT_BIT_CAP), "{b:?}");
        }
    }
}
