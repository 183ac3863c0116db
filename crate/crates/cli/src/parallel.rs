//! Multi-threaded prime-driven search.
//!
//! Primes are sieved window by window; inside a window the workers race,
//! but `find_map_first` keeps the lowest prime, so the result is the one
//! the sequential scan would return.

use rayon::prelude::*;
use shifted_fermat::arith;
use shifted_fermat::search::{self, first_search_prime, prime_candidate, witness_from_prime};
use shifted_fermat::{Natural, SearchConfig, SequenceSpec, WitnessReport};

const WINDOW: u64 = 1 << 20;

pub fn prime_driven_search(
    spec: &SequenceSpec,
    m: &Natural,
    cfg: &SearchConfig,
    workers: usize,
) -> Option<WitnessReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .ok()?;
    pool.install(|| {
        let mut low = first_search_prime(m)?;
        while low <= cfg.p_max {
            let high = low.saturating_add(WINDOW - 1).min(cfg.p_max);
            let primes = arith::primes_in_range(low, high);
            let found = primes.par_iter().with_min_len(512).find_map_first(|&p| {
                let n = prime_candidate(spec, p, cfg.n_max)?;
                witness_from_prime(spec, m, p, n, cfg.n_max, cfg.lift_mode).ok()
            });
            if found.is_some() {
                return found;
            }
            low = high.checked_add(1)?;
        }
        None
    })
}

pub fn find_witness(
    spec: &SequenceSpec,
    m: &Natural,
    cfg: &SearchConfig,
    workers: usize,
) -> shifted_fermat::Result<WitnessReport> {
    search::find_witness_with(spec, m, cfg, |spec, m, cfg| {
        prime_driven_search(spec, m, cfg, workers)
    })
}
