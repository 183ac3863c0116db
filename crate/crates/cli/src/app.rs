//! Argument parsing and subcommand dispatch.
//!
//! Each run produces an [`Outcome`] (stdout, stderr, exit code) instead of
//! printing directly, so outcomes can be cached and replayed byte for byte.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use shifted_fermat::lemma::{self, LiftMode};
use shifted_fermat::search;
use shifted_fermat::{Error, Index, Natural, SequenceSpec};

use crate::cache::{cache_key, Cache};
use crate::config::{OutputFormat, RunConfig};
use crate::parallel;
use crate::suites::Suite;
use crate::wire::{
    DecompositionJson, DivisorChainJson, Document, IndexConvention, LiftJson, OrbitProfileJson,
    PairGcdJson, ScanTableJson, TermJson, WitnessReportJson,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_FAILED: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_INVALID_CERTIFICATE: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            exit_code: EXIT_OK,
        }
    }

    fn fail(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
            exit_code: code,
        }
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Exhausted => EXIT_EXHAUSTED,
            _ => EXIT_PRECONDITION,
        };
        Outcome::fail(code, e)
    }
}

fn parse_natural(s: &str) -> Result<Natural, String> {
    s.parse::<Natural>()
        .map_err(|_| format!("{s:?} is not a non-negative integer"))
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
        .map_err(|e: crate::config::ConfigError| e.to_string())
}

/// Shifted Fermat sequence a_n = 2^(2^n) + d (zero-based n): terms,
/// residues, pair gcds, lemma certificates and witness search.
#[derive(Parser, Debug)]
#[command(name = "shifted-fermat", version)]
pub struct Cli {
    /// JSON file with run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// JSON-lines result cache (append-only)
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Output format: json, csv or human
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Largest term materialized, in bits
    #[arg(long, global = true)]
    pub bit_cap: Option<u64>,
    /// Largest prime scanned by the prime-driven search
    #[arg(long, global = true)]
    pub p_max: Option<u64>,
    /// Largest index scanned per prime
    #[arg(long, global = true)]
    pub n_max: Option<u64>,
    /// Largest index covered by the exhaustive fallback
    #[arg(long, global = true)]
    pub scan_max_index: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a_n, or a_n mod M with --mod
    Term {
        #[arg(short = 'd', value_parser = parse_natural)]
        d: Option<Natural>,
        #[arg(short = 'n')]
        n: Index,
        #[arg(long = "mod", value_parser = parse_natural)]
        modulus: Option<Natural>,
    },
    /// Print gcd(a_k, a_l) for k < l
    Gcd {
        #[arg(short = 'd', value_parser = parse_natural)]
        d: Option<Natural>,
        #[arg(short = 'k')]
        k: Index,
        #[arg(short = 'l')]
        l: Index,
    },
    /// Exponent lift: l > n with 2^l = 2^n (mod k)
    Lift {
        #[arg(short = 'n')]
        n: Index,
        #[arg(short = 'k', value_parser = parse_natural)]
        k: Natural,
        /// Use the multiplicative order instead of the totient
        #[arg(long)]
        minimal: bool,
    },
    /// Divisor chain a_n | a_l for d = 2^t
    Chain {
        #[arg(short = 'd', value_parser = parse_natural)]
        d: Option<Natural>,
        #[arg(short = 'n')]
        n: Index,
        #[arg(long)]
        minimal: bool,
    },
    /// Which a_n the prime p divides
    Profile {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'd', value_parser = parse_natural)]
        d: Option<Natural>,
        /// Index bound for the listed hits
        #[arg(short = 'N', long = "bound")]
        bound: Index,
    },
    /// Certified pair (k, l) with gcd(a_k, a_l) > m
    Witness {
        #[arg(short = 'd', value_parser = parse_natural)]
        d: Option<Natural>,
        #[arg(short = 'm', value_parser = parse_natural)]
        m: Option<Natural>,
        #[arg(long)]
        minimal: bool,
    },
    /// Exact gcds of all pairs 0 <= k < l <= K
    Scan {
        #[arg(short = 'd', value_parser = parse_natural)]
        d: Option<Natural>,
        #[arg(short = 'K', long = "max-index")]
        max_index: Index,
    },
    /// Split a_n = 2^k_n * b_n * c_n with b_n smooth below the bound
    Decompose {
        #[arg(short = 'd', value_parser = parse_natural)]
        d: Option<Natural>,
        #[arg(short = 'n')]
        n: Index,
        #[arg(short = 'b', long = "bound")]
        bound: u64,
    },
    /// Run the property suites
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
    /// Re-verify a certificate file
    Check { file: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteArg {
    #[value(name = "lemma1")]
    Lift,
    #[value(name = "lemma2")]
    CommonDivisor,
    #[value(name = "lemma4")]
    DivisorChain,
    #[value(name = "d1")]
    Fermat,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Lift => vec![Suite::Lift],
            SuiteArg::CommonDivisor => vec![Suite::CommonDivisor],
            SuiteArg::DivisorChain => vec![Suite::DivisorChain],
            SuiteArg::Fermat => vec![Suite::Fermat],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

fn resolve_config(cli: &Cli, env: &BTreeMap<String, String>) -> Result<RunConfig, Outcome> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), env)
        .map_err(|e| Outcome::fail(EXIT_PRECONDITION, e))?;
    if let Some(v) = &cli.cache {
        cfg.cache_path = Some(v.clone());
    }
    if let Some(v) = cli.format {
        cfg.output_format = Some(v);
    }
    if let Some(v) = cli.workers {
        cfg.workers = v;
    }
    if let Some(v) = cli.bit_cap {
        cfg.bit_cap = v;
    }
    if let Some(v) = cli.p_max {
        cfg.p_max = v;
    }
    if let Some(v) = cli.n_max {
        cfg.n_max = v;
    }
    if let Some(v) = cli.scan_max_index {
        cfg.scan_max_index = v;
    }
    cfg.validate()
        .map_err(|e| Outcome::fail(EXIT_PRECONDITION, e))?;
    Ok(cfg)
}

/// Runs one parsed invocation against the given environment.
pub fn run(cli: &Cli, env: &BTreeMap<String, String>) -> Outcome {
    let cfg = match resolve_config(cli, env) {
        Ok(cfg) => cfg,
        Err(outcome) => return outcome,
    };
    match &cli.command {
        Command::Verify { suite } => return verify(*suite),
        Command::Check { file } => return check(file, &cfg),
        _ => {}
    }
    let key = match cacheable_key(&cli.command, &cfg) {
        Ok(key) => key,
        Err(outcome) => return outcome,
    };
    let mut cache = match &cfg.cache_path {
        Some(path) => match Cache::open(path) {
            Ok(c) => Some(c),
            Err(e) => {
                return Outcome::fail(EXIT_PRECONDITION, format!("cache {}: {e}", path.display()))
            }
        },
        None => None,
    };
    if let Some(hit) = cache.as_ref().and_then(|c| c.get(&key)) {
        return hit.clone();
    }
    let outcome = execute(&cli.command, &cfg);
    if let Some(c) = cache.as_mut() {
        if let Err(e) = c.append(key, &outcome) {
            let mut outcome = outcome;
            outcome
                .stderr
                .push_str(&format!("warning: cache write failed: {e}\n"));
            return outcome;
        }
    }
    outcome
}

fn shift(d: &Option<Natural>, cfg: &RunConfig) -> Result<SequenceSpec, Outcome> {
    let d = d.clone().or_else(|| cfg.d.clone()).ok_or_else(|| {
        Outcome::fail(
            EXIT_PRECONDITION,
            "missing shift: pass -d or set d in the config",
        )
    })?;
    SequenceSpec::new(d).map_err(Outcome::from)
}

/// Subcommand name plus every resolved input that can change the output.
fn cacheable_key(cmd: &Command, cfg: &RunConfig) -> Result<String, Outcome> {
    let mut args: BTreeMap<&str, String> = BTreeMap::new();
    args.insert("bit_cap", cfg.bit_cap.to_string());
    args.insert(
        "format",
        cfg.output_format
            .map_or("default", |f| f.as_str())
            .to_string(),
    );
    let name = match cmd {
        Command::Term { d, n, modulus } => {
            args.insert("d", shift(d, cfg)?.d().to_string());
            args.insert("n", n.to_string());
            args.insert(
                "mod",
                modulus.as_ref().map_or(String::new(), |m| m.to_string()),
            );
            "term"
        }
        Command::Gcd { d, k, l } => {
            args.insert("d", shift(d, cfg)?.d().to_string());
            args.insert("k", k.to_string());
            args.insert("l", l.to_string());
            "gcd"
        }
        Command::Lift { n, k, minimal } => {
            args.insert("n", n.to_string());
            args.insert("k", k.to_string());
            args.insert("minimal", minimal.to_string());
            "lift"
        }
        Command::Chain { d, n, minimal } => {
            args.insert("d", shift(d, cfg)?.d().to_string());
            args.insert("n", n.to_string());
            args.insert("minimal", minimal.to_string());
            "chain"
        }
        Command::Profile { p, d, bound } => {
            args.insert("p", p.to_string());
            args.insert("d", shift(d, cfg)?.d().to_string());
            args.insert("bound", bound.to_string());
            "profile"
        }
        Command::Witness { d, m, minimal } => {
            args.insert("d", shift(d, cfg)?.d().to_string());
            let m = m
                .clone()
                .or_else(|| cfg.m.clone())
                .map_or(String::new(), |m| m.to_string());
            args.insert("m", m);
            args.insert("minimal", minimal.to_string());
            args.insert("p_max", cfg.p_max.to_string());
            args.insert("n_max", cfg.n_max.to_string());
            args.insert("scan_max_index", cfg.scan_max_index.to_string());
            "witness"
        }
        Command::Scan { d, max_index } => {
            args.insert("d", shift(d, cfg)?.d().to_string());
            args.insert("max_index", max_index.to_string());
            "scan"
        }
        Command::Decompose { d, n, bound } => {
            args.insert("d", shift(d, cfg)?.d().to_string());
            args.insert("n", n.to_string());
            args.insert("bound", bound.to_string());
            "decompose"
        }
        Command::Verify { .. } | Command::Check { .. } => unreachable!("not cached"),
    };
    Ok(cache_key(name, &args))
}

fn lift_mode(minimal: bool) -> LiftMode {
    if minimal {
        LiftMode::Order
    } else {
        LiftMode::Totient
    }
}

fn execute(cmd: &Command, cfg: &RunConfig) -> Outcome {
    match try_execute(cmd, cfg) {
        Ok(o) | Err(o) => o,
    }
}

fn try_execute(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, Outcome> {
    let fmt = |default: OutputFormat| cfg.output_format.unwrap_or(default);
    let out = match cmd {
        Command::Term { d, n, modulus } => {
            let spec = shift(d, cfg)?;
            let value = match modulus {
                Some(m) => {
                    if *m == Natural::from(0u32) {
                        return Err(Error::InvalidModulus.into());
                    }
                    spec.term_mod(*n, m)?
                }
                None => spec.term(*n, cfg.bit_cap)?,
            };
            let doc = TermJson {
                index_convention: IndexConvention::ZeroBased,
                d: spec.d().clone(),
                n: *n,
                modulus: modulus.clone(),
                value,
            };
            match fmt(OutputFormat::Human) {
                OutputFormat::Human => format!("{}\n", doc.value),
                OutputFormat::Csv => format!(
                    "d,n,modulus,value\n{},{},{},{}\n",
                    doc.d,
                    doc.n,
                    doc.modulus
                        .as_ref()
                        .map_or(String::new(), |m| m.to_string()),
                    doc.value
                ),
                OutputFormat::Json => json_line(Document::Term(doc)),
            }
        }
        Command::Gcd { d, k, l } => {
            let spec = shift(d, cfg)?;
            let gcd = spec.pair_gcd(*k, *l, cfg.bit_cap)?;
            let doc = PairGcdJson {
                index_convention: IndexConvention::ZeroBased,
                d: spec.d().clone(),
                k: *k,
                l: *l,
                gcd,
            };
            match fmt(OutputFormat::Human) {
                OutputFormat::Human => format!("{}\n", doc.gcd),
                OutputFormat::Csv => {
                    format!("d,k,l,gcd\n{},{},{},{}\n", doc.d, doc.k, doc.l, doc.gcd)
                }
                OutputFormat::Json => json_line(Document::PairGcd(doc)),
            }
        }
        Command::Lift { n, k, minimal } => {
            let lift = lemma::exponent_lift(*n, k, lift_mode(*minimal))?;
            let doc = LiftJson::from(&lift);
            match fmt(OutputFormat::Json) {
                OutputFormat::Human => format!(
                    "l = {} (n = {}, k = {} = 2^{} * {}); 2^{} = 2^{} (mod {})\n",
                    doc.l, doc.n, doc.k, doc.a, doc.b, doc.l, doc.n, doc.k
                ),
                OutputFormat::Csv => {
                    format!(
                        "n,k,a,b,l\n{},{},{},{},{}\n",
                        doc.n, doc.k, doc.a, doc.b, doc.l
                    )
                }
                OutputFormat::Json => json_line(Document::Lift(doc)),
            }
        }
        Command::Chain { d, n, minimal } => {
            let spec = shift(d, cfg)?;
            let w = lemma::divisor_chain(&spec, *n, lift_mode(*minimal), cfg.bit_cap)?;
            let doc = DivisorChainJson::from(&w);
            match fmt(OutputFormat::Json) {
                OutputFormat::Human => format!(
                    "a_{} divides a_{} (d = 2^{}); (2^{} - {}) / (2^{} - {}) is odd\n",
                    doc.n, doc.l, doc.t, doc.l, doc.t, doc.n, doc.t
                ),
                OutputFormat::Csv => format!(
                    "d,t,n,l,quotient_odd_check\n{},{},{},{},{}\n",
                    doc.d, doc.t, doc.n, doc.l, doc.quotient_odd_check
                ),
                OutputFormat::Json => json_line(Document::DivisorChainWitness(doc)),
            }
        }
        Command::Profile { p, d, bound } => {
            let spec = shift(d, cfg)?;
            if !shifted_fermat::arith::is_prime_u64(*p) {
                return Err(Error::InvalidBase(Natural::from(*p)).into());
            }
            let profile = search::divisibility_profile(*p, &spec, *bound)?;
            let doc = OrbitProfileJson::from(&profile);
            match fmt(OutputFormat::Json) {
                OutputFormat::Human => format!(
                    "p = {}, d = {}: tail {}, cycle {}; hits n <= {}: {}\n",
                    doc.p,
                    doc.d,
                    doc.tail_length,
                    doc.cycle_length,
                    doc.index_bound,
                    join(&doc.hits, " ")
                ),
                OutputFormat::Csv => format!(
                    "p,d,tail_length,cycle_length,hits_preperiodic,hits_periodic,index_bound,hits\n{},{},{},{},{},{},{},{}\n",
                    doc.p,
                    doc.d,
                    doc.tail_length,
                    doc.cycle_length,
                    join(&doc.hits_preperiodic, ";"),
                    join(&doc.hits_periodic, ";"),
                    doc.index_bound,
                    join(&doc.hits, ";")
                ),
                OutputFormat::Json => json_line(Document::OrbitProfile(doc)),
            }
        }
        Command::Witness { d, m, minimal } => {
            let spec = shift(d, cfg)?;
            let m = m.clone().or_else(|| cfg.m.clone()).ok_or_else(|| {
                Outcome::fail(
                    EXIT_PRECONDITION,
                    "missing bound: pass -m or set m in the config",
                )
            })?;
            let report =
                parallel::find_witness(&spec, &m, &cfg.search_config(*minimal), cfg.workers)?;
            let doc = WitnessReportJson::from(&report);
            match fmt(OutputFormat::Json) {
                OutputFormat::Human => format!(
                    "pair ({}, {}): {} {} gcd(a_{}, a_{}) and exceeds m = {} [{}]\n",
                    doc.k,
                    doc.l,
                    doc.gcd_lower_bound,
                    if doc.exact { "equals" } else { "divides" },
                    doc.k,
                    doc.l,
                    doc.m,
                    report.route.as_str()
                ),
                OutputFormat::Csv => format!(
                    "d,m,k,l,gcd_lower_bound,exact,route\n{},{},{},{},{},{},{}\n",
                    doc.d,
                    doc.m,
                    doc.k,
                    doc.l,
                    doc.gcd_lower_bound,
                    doc.exact,
                    report.route.as_str()
                ),
                OutputFormat::Json => json_line(Document::WitnessReport(doc)),
            }
        }
        Command::Scan { d, max_index } => {
            let spec = shift(d, cfg)?;
            let table = search::exhaustive_scan(&spec, *max_index, cfg.bit_cap)?;
            let doc = ScanTableJson::new(spec.d(), *max_index, &table);
            match fmt(OutputFormat::Json) {
                OutputFormat::Human => {
                    let mut s = String::new();
                    for e in &doc.entries {
                        s.push_str(&format!("gcd(a_{}, a_{}) = {}\n", e.k, e.l, e.gcd));
                    }
                    if let Some(b) = &doc.best {
                        s.push_str(&format!("best: ({}, {}) with gcd {}\n", b.k, b.l, b.gcd));
                    }
                    s
                }
                OutputFormat::Csv => {
                    let mut s = String::from("k,l,gcd\n");
                    for e in &doc.entries {
                        s.push_str(&format!("{},{},{}\n", e.k, e.l, e.gcd));
                    }
                    s
                }
                OutputFormat::Json => json_line(Document::ScanTable(doc)),
            }
        }
        Command::Decompose { d, n, bound } => {
            let spec = shift(d, cfg)?;
            let t = spec.decompose_term(*n, *bound, cfg.bit_cap)?;
            let doc = DecompositionJson::new(spec.d(), &t);
            match fmt(OutputFormat::Json) {
                OutputFormat::Human => format!(
                    "a_{} = 2^{} * {} * {} (smooth below {})\n",
                    doc.n, doc.k_n, doc.b_n, doc.c_n, doc.smooth_bound
                ),
                OutputFormat::Csv => format!(
                    "d,n,smooth_bound,k_n,b_n,c_n\n{},{},{},{},{},{}\n",
                    doc.d, doc.n, doc.smooth_bound, doc.k_n, doc.b_n, doc.c_n
                ),
                OutputFormat::Json => json_line(Document::Decomposition(doc)),
            }
        }
        Command::Verify { .. } | Command::Check { .. } => unreachable!("dispatched earlier"),
    };
    Ok(Outcome::ok(out))
}

fn json_line(doc: Document) -> String {
    let mut s = doc.to_canonical_json();
    s.push('\n');
    s
}

fn join(v: &[u64], sep: &str) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(sep)
}

fn verify(suite: SuiteArg) -> Outcome {
    let mut stdout = String::new();
    let mut stderr = String::new();
    let mut all = true;
    for s in suite.suites() {
        let r = s.run();
        stdout.push_str(&r.summary());
        stdout.push('\n');
        for f in r.failures.iter().take(10) {
            stderr.push_str(&format!("{}: {f}\n", r.name));
        }
        all &= r.passed();
    }
    Outcome {
        stdout,
        stderr,
        exit_code: if all { EXIT_OK } else { EXIT_SUITE_FAILED },
    }
}

fn check(file: &PathBuf, cfg: &RunConfig) -> Outcome {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return Outcome::fail(EXIT_PRECONDITION, format!("{}: {e}", file.display())),
    };
    let doc = match Document::parse(text.trim()) {
        Ok(doc) => doc,
        Err(e) => {
            return Outcome::fail(
                EXIT_INVALID_CERTIFICATE,
                format!("malformed certificate: {e}"),
            )
        }
    };
    match doc.check(cfg.bit_cap) {
        Some(true) => Outcome::ok("valid\n".into()),
        Some(false) => Outcome {
            stdout: "invalid\n".into(),
            stderr: String::new(),
            exit_code: EXIT_INVALID_CERTIFICATE,
        },
        None => Outcome::fail(
            EXIT_INVALID_CERTIFICATE,
            "document carries no checkable claim",
        ),
    }
}
