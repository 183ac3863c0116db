use crate::arith::Natural;
use crate::Index;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("valuation undefined: the valued integer is zero")]
    ValuationUndefined,
    #[error("invalid base: {0} is not a prime")]
    InvalidBase(Natural),
    #[error("undefined: euler_phi(0)")]
    PhiUndefined,
    #[error("factorization limit: could not split {0} within the iteration budget")]
    FactorizationLimit(Natural),
    #[error("not a unit: gcd({a}, {n}) != 1")]
    NotAUnit { a: Natural, n: Natural },
    #[error("invalid modulus: must be at least 1")]
    InvalidModulus,
    #[error("invalid shift: d must be at least 1")]
    InvalidShift,
    #[error("term too large to materialize; use term_mod (a_{n} needs more than {cap} bits)")]
    TermTooLarge { n: Index, cap: u64 },
    #[error("k too large: a_{k} exceeds the {cap}-bit materialization cap")]
    PairTooLarge { k: Index, cap: u64 },
    #[error("indices must satisfy k < l (got k = {k}, l = {l})")]
    IndexOrder { k: Index, l: Index },
    #[error("index overflow while constructing a lift")]
    IndexOverflow,
    #[error("valuation precondition violated: nu_2({k}) = {valuation} is not below n = {n}")]
    ValuationPrecondition {
        n: Index,
        k: Natural,
        valuation: u64,
    },
    #[error("{p} is not an odd prime")]
    NotOddPrime { p: Natural },
    #[error("p does not divide the term: {p} does not divide a_{n}")]
    NotADivisor { p: Natural, n: Index },
    #[error("congruence already holds: {p} = 1 (mod 2^{n}); no witness forced")]
    CongruenceHolds { p: Natural, n: Index },
    #[error("chain requires d = 2^t with t >= 1 (got d = {d})")]
    NotPowerOfTwo { d: Natural },
    #[error("precondition violated: n = {n} needs n > nu_2({t}) and 2^n > {t}")]
    ChainPrecondition { n: Index, t: u64 },
    #[error("orbit limit exceeded: no repeat within {limit} steps")]
    OrbitLimit { limit: u64 },
    #[error("witness search needs d >= 2 and m >= 1")]
    SearchPrecondition,
    #[error("no witness within configured limits (this is not a counterexample)")]
    Exhausted,
    #[error("constructed certificate failed re-verification")]
    SelfCheckFailed,
}
