//! The sequence `a_n = 2^(2^n) + d`, indexed from `n = 0`.

use num_traits::{One, Zero};

use crate::arith::{self, Natural};
use crate::error::{Error, Result};
use crate::Index;

/// Largest term, in bits, that is ever materialized unless the caller says
/// otherwise. Terms up to `a_21` fit.
pub const DEFAULT_BIT_CAP: u64 = 1 << 22;

/// The shift `d >= 1`. `d = 1` gives the Fermat numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    d: Natural,
}

impl SequenceSpec {
    pub fn new(d: Natural) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::InvalidShift);
        }
        Ok(SequenceSpec { d })
    }

    pub fn from_u64(d: u64) -> Result<Self> {
        Self::new(Natural::from(d))
    }

    pub fn fermat() -> Self {
        SequenceSpec { d: Natural::one() }
    }

    pub fn d(&self) -> &Natural {
        &self.d
    }

    /// `Some(t)` when `d = 2^t` with `t >= 1`.
    pub fn power_of_two_exponent(&self) -> Option<u64> {
        let (t, odd) = arith::split_two_power(&self.d);
        (odd.is_one() && t >= 1).then_some(t)
    }

    /// Exact `a_n`, refusing anything that would exceed `bit_cap` bits.
    pub fn term(&self, n: Index, bit_cap: u64) -> Result<Natural> {
        if n >= 63 {
            return Err(Error::TermTooLarge { n, cap: bit_cap });
        }
        let exponent = 1u64 << n;
        if exponent.saturating_add(self.d.bits()) > bit_cap {
            return Err(Error::TermTooLarge { n, cap: bit_cap });
        }
        Ok((Natural::one() << exponent) + &self.d)
    }

    /// `a_n mod modulus` without materializing `a_n`.
    pub fn term_mod(&self, n: Index, modulus: &Natural) -> Result<Natural> {
        let s = arith::iterated_square_mod(modulus, n)?;
        Ok((s + &self.d) % modulus)
    }

    /// Word-sized [`SequenceSpec::term_mod`]. `modulus` must be nonzero.
    pub fn term_mod_u64(&self, n: Index, modulus: u64) -> u64 {
        let d = self.d_mod_u64(modulus);
        let s = arith::iterated_square_mod_u64(modulus, n);
        ((s as u128 + d as u128) % modulus as u128) as u64
    }

    pub(crate) fn d_mod_u64(&self, modulus: u64) -> u64 {
        let r = &self.d % modulus;
        r.iter_u64_digits().next().unwrap_or(0)
    }

    /// `gcd(a_k, a_l)` for `k < l`, reducing `a_l` modulo `a_k`.
    ///
    /// Only `a_k` is materialized, so the cap applies to `k` alone.
    pub fn pair_gcd(&self, k: Index, l: Index, bit_cap: u64) -> Result<Natural> {
        if k >= l {
            return Err(Error::IndexOrder { k, l });
        }
        let a_k = self.term(k, bit_cap).map_err(|e| match e {
            Error::TermTooLarge { n, cap } => Error::PairTooLarge { k: n, cap },
            other => other,
        })?;
        let r = self.term_mod(l, &a_k)?;
        Ok(arith::gcd(&a_k, &r))
    }

    /// Splits `a_n = 2^k_n * b_n * c_n`, where `b_n` collects the odd prime
    /// factors below `smooth_bound` and `c_n` is whatever remains.
    pub fn decompose_term(
        &self,
        n: Index,
        smooth_bound: u64,
        bit_cap: u64,
    ) -> Result<TermDecomposition> {
        let a_n = self.term(n, bit_cap)?;
        let (k_n, mut rest) = arith::split_two_power(&a_n);
        let mut b_n = Natural::one();
        if smooth_bound > 3 {
            for p in arith::primes_in_range(3, smooth_bound - 1) {
                if rest.is_one() {
                    break;
                }
                while (&rest % p).is_zero() {
                    rest /= p;
                    b_n *= p;
                }
            }
        }
        Ok(TermDecomposition {
            n,
            k_n,
            b_n,
            c_n: rest,
            smooth_bound,
        })
    }
}

/// `a_n = 2^k_n * b_n * c_n`.
///
/// `b_n` is odd with every prime factor below `smooth_bound`; `c_n` is odd
/// with none. `c_n` is left unfactored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDecomposition {
    pub n: Index,
    pub k_n: u64,
    pub b_n: Natural,
    pub c_n: Natural,
    pub smooth_bound: u64,
}

impl TermDecomposition {
    pub fn reassemble(&self) -> Natural {
        (&self.b_n * &self.c_n) << self.k_n
    }
}

/// Checks `F_n = F_0 * F_1 * ... * F_(n-1) + 2` for the Fermat numbers.
pub fn verify_product_identity(n: Index, bit_cap: u64) -> Result<bool> {
    let spec = SequenceSpec::fermat();
    let a_n = spec.term(n, bit_cap)?;
    let mut product = Natural::one();
    for i in 0..n {
        product *= spec.term(i, bit_cap)?;
    }
    Ok(product + 2u32 == a_n)
}
