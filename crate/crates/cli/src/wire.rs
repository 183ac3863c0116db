//! Canonical JSON documents.
//!
//! Every document is an object whose first field is `"type"`. Field order
//! is fixed by the struct definitions below and every integer, index
//! included, is a decimal string without sign or leading zeros. Parsing is
//! strict: unknown fields and non-canonical numbers are rejected.

use std::fmt::Display;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use shifted_fermat::lemma::{self, Certificate};
use shifted_fermat::search::{self, ScanEntry};
use shifted_fermat::{
    CommonDivisorWitness, DivisorChainWitness, Index, Lift, Natural, OrbitProfile, Primality,
    ReportCertificate, Route, ScanTable, TermDecomposition, WitnessReport,
};

mod decimal {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr + Display,
        D: Deserializer<'de>,
    {
        let raw = String::deserialize(d)?;
        parse_canonical(&raw).map_err(D::Error::custom)
    }

    pub fn parse_canonical<T: FromStr + Display>(raw: &str) -> Result<T, String> {
        let value: T = raw
            .parse()
            .map_err(|_| format!("not a decimal integer: {raw:?}"))?;
        if value.to_string() != raw {
            return Err(format!("non-canonical decimal: {raw:?}"));
        }
        Ok(value)
    }
}

mod decimal_seq {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| decimal::parse_canonical(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub use decimal::parse_canonical;

/// All indices are zero-based (`a_0 = 2 + d`); every index-bearing
/// document says so.
#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexConvention {
    #[default]
    #[serde(rename = "zero-based")]
    ZeroBased,
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PrimalityJson {
    Deterministic,
    Probabilistic,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct LiftJson {
    pub index_convention: IndexConvention,
    #[serde(with = "decimal")]
    pub n: Index,
    #[serde(with = "decimal")]
    pub k: Natural,
    #[serde(with = "decimal")]
    pub a: u64,
    #[serde(with = "decimal")]
    pub b: Natural,
    #[serde(with = "decimal")]
    pub l: Index,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CommonDivisorJson {
    pub index_convention: IndexConvention,
    #[serde(with = "decimal")]
    pub p: Natural,
    pub primality: PrimalityJson,
    #[serde(with = "decimal")]
    pub d: Natural,
    #[serde(with = "decimal")]
    pub n: Index,
    #[serde(with = "decimal")]
    pub l: Index,
    pub lift: LiftJson,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DivisorChainJson {
    pub index_convention: IndexConvention,
    #[serde(with = "decimal")]
    pub d: Natural,
    #[serde(with = "decimal")]
    pub t: u64,
    #[serde(with = "decimal")]
    pub n: Index,
    #[serde(with = "decimal")]
    pub l: Index,
    pub quotient_odd_check: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ScanEntryJson {
    #[serde(with = "decimal")]
    pub k: Index,
    #[serde(with = "decimal")]
    pub l: Index,
    #[serde(with = "decimal")]
    pub gcd: Natural,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReportCertificateJson {
    DivisorChainWitness(DivisorChainJson),
    CommonDivisorWitness(CommonDivisorJson),
    ScanEntry(ScanEntryJson),
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteJson {
    #[serde(rename = "power-of-two-chain")]
    PowerOfTwoChain,
    #[serde(rename = "prime-driven")]
    PrimeDriven,
    #[serde(rename = "exhaustive-scan")]
    ExhaustiveScan,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct WitnessReportJson {
    pub index_convention: IndexConvention,
    #[serde(with = "decimal")]
    pub d: Natural,
    #[serde(with = "decimal")]
    pub m: Natural,
    #[serde(with = "decimal")]
    pub k: Index,
    #[serde(with = "decimal")]
    pub l: Index,
    #[serde(with = "decimal")]
    pub gcd_lower_bound: Natural,
    /// `true` when `gcd_lower_bound` is the gcd itself.
    pub exact: bool,
    pub route: RouteJson,
    pub certificate: ReportCertificateJson,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct OrbitProfileJson {
    pub index_convention: IndexConvention,
    #[serde(with = "decimal")]
    pub p: u64,
    #[serde(with = "decimal")]
    pub d: Natural,
    #[serde(with = "decimal")]
    pub tail_length: u64,
    #[serde(with = "decimal")]
    pub cycle_length: u64,
    #[serde(with = "decimal_seq")]
    pub hits_preperiodic: Vec<Index>,
    #[serde(with = "decimal_seq")]
    pub hits_periodic: Vec<u64>,
    #[serde(with = "decimal")]
    pub index_bound: Index,
    #[serde(with = "decimal_seq")]
    pub hits: Vec<Index>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub index_convention: IndexConvention,
    #[serde(with = "decimal")]
    pub d: Natural,
    #[serde(with = "decimal")]
    pub n: Index,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_decimal")]
    pub modulus: Option<Natural>,
    #[serde(with = "decimal")]
    pub value: Natural,
}

mod opt_decimal {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Natural>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.collect_str(x),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Natural>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        raw.map(|r| decimal::parse_canonical(&r).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PairGcdJson {
    pub index_convention: IndexConvention,
    #[serde(with = "decimal")]
    pub d: Natural,
    #[serde(with = "decimal")]
    pub k: Index,
    #[serde(with = "decimal")]
    pub l: Index,
    #[serde(with = "decimal")]
    pub gcd: Natural,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ScanTableJson {
    pub index_convention: IndexConvention,
    #[serde(with = "decimal")]
    pub d: Natural,
    #[serde(with = "decimal")]
    pub max_index: Index,
    pub entries: Vec<ScanEntryJson>,
    pub best: Option<ScanEntryJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DecompositionJson {
    pub index_convention: IndexConvention,
    #[serde(with = "decimal")]
    pub d: Natural,
    #[serde(with = "decimal")]
    pub n: Index,
    #[serde(with = "decimal")]
    pub smooth_bound: u64,
    #[serde(with = "decimal")]
    pub k_n: u64,
    #[serde(with = "decimal")]
    pub b_n: Natural,
    #[serde(with = "decimal")]
    pub c_n: Natural,
}

/// Any document the tool emits.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Document {
    Lift(LiftJson),
    CommonDivisorWitness(CommonDivisorJson),
    DivisorChainWitness(DivisorChainJson),
    WitnessReport(WitnessReportJson),
    OrbitProfile(OrbitProfileJson),
    Term(TermJson),
    PairGcd(PairGcdJson),
    ScanTable(ScanTableJson),
    Decomposition(DecompositionJson),
}

impl Document {
    /// Compact canonical encoding, no trailing newline.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("documents always serialize")
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Re-verifies certificates and reports. Documents that carry no claim
    /// to check yield `None`.
    pub fn check(&self, bit_cap: u64) -> Option<bool> {
        Some(match self {
            Document::Lift(j) => lemma::check_lift(&j.into()),
            Document::CommonDivisorWitness(j) => lemma::check_common_divisor(&j.into()),
            Document::DivisorChainWitness(j) => lemma::check_divisor_chain(&j.into(), bit_cap),
            Document::WitnessReport(j) => search::check_report(&j.into(), bit_cap),
            Document::OrbitProfile(j) => check_profile(j),
            _ => return None,
        })
    }
}

fn check_profile(j: &OrbitProfileJson) -> bool {
    let Ok(spec) = shifted_fermat::SequenceSpec::new(j.d.clone()) else {
        return false;
    };
    if !shifted_fermat::arith::is_prime_u64(j.p) {
        return false;
    }
    search::divisibility_profile(j.p, &spec, j.index_bound)
        .is_ok_and(|p| OrbitProfileJson::from(&p) == *j)
}

impl From<&Lift> for LiftJson {
    fn from(v: &Lift) -> Self {
        LiftJson {
            index_convention: IndexConvention::ZeroBased,
            n: v.n,
            k: v.k.clone(),
            a: v.a,
            b: v.b.clone(),
            l: v.l,
        }
    }
}

impl From<&LiftJson> for Lift {
    fn from(j: &LiftJson) -> Self {
        Lift {
            n: j.n,
            k: j.k.clone(),
            a: j.a,
            b: j.b.clone(),
            l: j.l,
        }
    }
}

impl From<Primality> for PrimalityJson {
    fn from(p: Primality) -> Self {
        match p {
            Primality::ProbablePrime => PrimalityJson::Probabilistic,
            // composites never reach a certificate
            Primality::Prime | Primality::Composite => PrimalityJson::Deterministic,
        }
    }
}

impl From<PrimalityJson> for Primality {
    fn from(p: PrimalityJson) -> Self {
        match p {
            PrimalityJson::Deterministic => Primality::Prime,
            PrimalityJson::Probabilistic => Primality::ProbablePrime,
        }
    }
}

impl From<&CommonDivisorWitness> for CommonDivisorJson {
    fn from(w: &CommonDivisorWitness) -> Self {
        CommonDivisorJson {
            index_convention: IndexConvention::ZeroBased,
            p: w.p.clone(),
            primality: w.primality.into(),
            d: w.d.clone(),
            n: w.n,
            l: w.l,
            lift: (&w.lift).into(),
        }
    }
}

impl From<&CommonDivisorJson> for CommonDivisorWitness {
    fn from(j: &CommonDivisorJson) -> Self {
        CommonDivisorWitness {
            p: j.p.clone(),
            primality: j.primality.into(),
            d: j.d.clone(),
            n: j.n,
            l: j.l,
            lift: (&j.lift).into(),
        }
    }
}

impl From<&DivisorChainWitness> for DivisorChainJson {
    fn from(w: &DivisorChainWitness) -> Self {
        DivisorChainJson {
            index_convention: IndexConvention::ZeroBased,
            d: w.d.clone(),
            t: w.t,
            n: w.n,
            l: w.l,
            quotient_odd_check: w.quotient_odd_check,
        }
    }
}

impl From<&DivisorChainJson> for DivisorChainWitness {
    fn from(j: &DivisorChainJson) -> Self {
        DivisorChainWitness {
            d: j.d.clone(),
            t: j.t,
            n: j.n,
            l: j.l,
            quotient_odd_check: j.quotient_odd_check,
        }
    }
}

impl From<&ScanEntry> for ScanEntryJson {
    fn from(e: &ScanEntry) -> Self {
        ScanEntryJson {
            k: e.k,
            l: e.l,
            gcd: e.gcd.clone(),
        }
    }
}

impl From<&ScanEntryJson> for ScanEntry {
    fn from(j: &ScanEntryJson) -> Self {
        ScanEntry {
            k: j.k,
            l: j.l,
            gcd: j.gcd.clone(),
        }
    }
}

impl From<Route> for RouteJson {
    fn from(r: Route) -> Self {
        match r {
            Route::PowerOfTwoChain => RouteJson::PowerOfTwoChain,
            Route::PrimeDriven => RouteJson::PrimeDriven,
            Route::ExhaustiveScan => RouteJson::ExhaustiveScan,
        }
    }
}

impl From<RouteJson> for Route {
    fn from(r: RouteJson) -> Self {
        match r {
            RouteJson::PowerOfTwoChain => Route::PowerOfTwoChain,
            RouteJson::PrimeDriven => Route::PrimeDriven,
            RouteJson::ExhaustiveScan => Route::ExhaustiveScan,
        }
    }
}

impl From<&WitnessReport> for WitnessReportJson {
    fn from(r: &WitnessReport) -> Self {
        WitnessReportJson {
            index_convention: IndexConvention::ZeroBased,
            d: r.d.clone(),
            m: r.m.clone(),
            k: r.k,
            l: r.l,
            gcd_lower_bound: r.gcd_lower_bound.clone(),
            exact: r.exact,
            route: r.route.into(),
            certificate: match &r.certificate {
                ReportCertificate::DivisorChain(w) => {
                    ReportCertificateJson::DivisorChainWitness(w.into())
                }
                ReportCertificate::CommonDivisor(w) => {
                    ReportCertificateJson::CommonDivisorWitness(w.into())
                }
                ReportCertificate::Scan(e) => ReportCertificateJson::ScanEntry(e.into()),
            },
        }
    }
}

impl From<&WitnessReportJson> for WitnessReport {
    fn from(j: &WitnessReportJson) -> Self {
        WitnessReport {
            d: j.d.clone(),
            m: j.m.clone(),
            k: j.k,
            l: j.l,
            gcd_lower_bound: j.gcd_lower_bound.clone(),
            exact: j.exact,
            route: j.route.into(),
            certificate: match &j.certificate {
                ReportCertificateJson::DivisorChainWitness(w) => {
                    ReportCertificate::DivisorChain(w.into())
                }
                ReportCertificateJson::CommonDivisorWitness(w) => {
                    ReportCertificate::CommonDivisor(w.into())
                }
                ReportCertificateJson::ScanEntry(e) => ReportCertificate::Scan(e.into()),
            },
        }
    }
}

impl From<&OrbitProfile> for OrbitProfileJson {
    fn from(p: &OrbitProfile) -> Self {
        OrbitProfileJson {
            index_convention: IndexConvention::ZeroBased,
            p: p.p,
            d: p.d.clone(),
            tail_length: p.tail_length,
            cycle_length: p.cycle_length,
            hits_preperiodic: p.hits_preperiodic.clone(),
            hits_periodic: p.hits_periodic.clone(),
            index_bound: p.index_bound,
            hits: p.hits(),
        }
    }
}

impl ScanTableJson {
    pub fn new(d: &Natural, max_index: Index, table: &ScanTable) -> Self {
        ScanTableJson {
            index_convention: IndexConvention::ZeroBased,
            d: d.clone(),
            max_index,
            entries: table.entries.iter().map(Into::into).collect(),
            best: table.best.as_ref().map(Into::into),
        }
    }
}

impl DecompositionJson {
    pub fn new(d: &Natural, t: &TermDecomposition) -> Self {
        DecompositionJson {
            index_convention: IndexConvention::ZeroBased,
            d: d.clone(),
            n: t.n,
            smooth_bound: t.smooth_bound,
            k_n: t.k_n,
            b_n: t.b_n.clone(),
            c_n: t.c_n.clone(),
        }
    }
}

impl From<&Certificate> for Document {
    fn from(c: &Certificate) -> Self {
        match c {
            Certificate::Lift(l) => Document::Lift(l.into()),
            Certificate::CommonDivisor(w) => Document::CommonDivisorWitness(w.into()),
            Certificate::DivisorChain(w) => Document::DivisorChainWitness(w.into()),
        }
    }
}

impl From<&WitnessReport> for Document {
    fn from(r: &WitnessReport) -> Self {
        Document::WitnessReport(r.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use shifted_fermat::lemma::{exponent_lift, LiftMode};

    #[test]
    fn lift_has_fixed_shape() {
        let lift = exponent_lift(3, &Natural::from(12u32), LiftMode::Totient).unwrap();
        let doc = Document::Lift((&lift).into());
        assert_eq!(
            doc.to_canonical_json(),
            r#"{"type":"lift","index_convention":"zero-based","n":"3","k":"12","a":"2","b":"3","l":"5"}"#
        );
        assert_eq!(Document::parse(&doc.to_canonical_json()).unwrap(), doc);
        assert_eq!(doc.check(1 << 22), Some(true));
    }

    #[test]
    fn strict_parsing() {
        let ok = r#"{"type":"lift","index_convention":"zero-based","n":"3","k":"12","a":"2","b":"3","l":"5"}"#;
        assert!(Document::parse(ok).is_ok());
        for bad in [
            ok.replace(r#""n":"3""#, r#""n":"03""#),
            ok.replace(r#""n":"3""#, r#""n":3"#),
            ok.replace(r#""n":"3""#, r#""n":"+3""#),
            ok.replace(r#""n":"3""#, r#""n":"-3""#),
            ok.replace(r#""l":"5"}"#, r#""l":"5","extra":"1"}"#),
            ok.replace("zero-based", "one-based"),
            ok.replace(r#""type":"lift""#, r#""type":"lifts""#),
        ] {
            assert!(Document::parse(&bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn term_omits_absent_modulus() {
        let doc = Document::Term(TermJson {
            index_convention: IndexConvention::ZeroBased,
            d: Natural::from(3u32),
            n: 3,
            modulus: None,
            value: Natural::from(259u32),
        });
        let text = doc.to_canonical_json();
        assert_eq!(
            text,
            r#"{"type":"term","index_convention":"zero-based","d":"3","n":"3","value":"259"}"#
        );
        assert_eq!(Document::parse(&text).unwrap(), doc);
        assert_eq!(doc.check(1 << 22), None);
    }
}
