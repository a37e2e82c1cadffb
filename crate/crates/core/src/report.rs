//! JSON and CSV renderings of the computed tables.
//!
//! JSON numbers are rounded to 15 significant digits and CSV weights are
//! printed with a fixed number of significant digits, so equal inputs give
//! byte-identical files.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::field::FieldSpec;
use crate::galois::AdmissibleClasses;
use crate::sieve::NormEvents;
use crate::stats::{grh_compare, VarianceReport};

pub const FORMAT_VERSION: u32 = 1;
pub const JSON_SIG_DIGITS: usize = 15;
pub const EVENT_SIG_DIGITS: usize = 12;

/// Rounds `v` to `digits` significant decimal digits.
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", digits - 1, v).parse().expect("formatted float parses")
}

/// `v` with `digits` significant digits; positional notation unless the
/// magnitude is extreme.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..16).contains(&exp) {
        return format!("{:.*e}", digits - 1, v);
    }
    let rounded = round_sig(v, digits);
    // rounding can carry into the next decade
    let exp = rounded.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{rounded:.decimals$}")
}

/// Recursively rounds every float in a JSON tree.
pub fn round_json(value: &mut Value, digits: usize) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().expect("f64"), digits);
            *value = serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(|v| round_json(v, digits)),
        Value::Object(map) => map.values_mut().for_each(|v| round_json(v, digits)),
        _ => {}
    }
}

/// Pretty JSON with floats at [`JSON_SIG_DIGITS`] and a trailing newline.
pub fn to_json_string<T: Serialize>(doc: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(doc)?;
    round_json(&mut v, JSON_SIG_DIGITS);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Invocation parameters recorded in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub command: String,
    pub field: String,
    pub x: Option<u64>,
    #[serde(rename = "Q")]
    pub big_q: Option<u64>,
    pub q: Option<u64>,
    #[serde(rename = "B")]
    pub oracle_bound: u64,
    #[serde(rename = "M")]
    pub m: f64,
    pub segment_size: usize,
}

/// Identity checks attached to a variance report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceChecks {
    pub orthogonality_max_gap: f64,
    pub large_sieve_holds: bool,
    pub exchange_max_gap: f64,
    pub exchange_bounds_ok: bool,
    /// Moduli used for the orthogonality and character-exchange checks.
    pub check_q_max: u64,
    #[serde(rename = "large_sieve_Q")]
    pub large_sieve_q: u64,
}

impl VarianceChecks {
    pub fn passed(&self, outside_mass: f64) -> bool {
        self.orthogonality_max_gap <= crate::stats::IDENTITY_TOL
            && self.large_sieve_holds
            && self.exchange_max_gap <= crate::stats::IDENTITY_TOL
            && self.exchange_bounds_ok
            && outside_mass == 0.0
    }
}

pub fn variance_json(report: &VarianceReport, checks: &VarianceChecks, config: &ReportConfig) -> Value {
    let grh = grh_compare(report);
    json!({
        "format_version": FORMAT_VERSION,
        "config": config,
        "field": report.field,
        "x": report.x,
        "Q": report.big_q,
        "M": report.m,
        "V": report.v,
        "ratio_bdh": report.ratio_bdh,
        "ratio_grh": report.ratio_grh,
        "envelope_bdh": grh.envelope_bdh,
        "envelope_grh": grh.envelope_grh,
        "outside_mass": report.outside_mass,
        "range_condition_satisfied": report.range_condition_satisfied,
        "small_q": report.small_q,
        "per_q": report.per_q,
        "dyadic": report.dyadic,
        "checks": checks,
    })
}

/// `q,phi_K,contribution` rows.
pub fn per_q_csv(report: &VarianceReport) -> String {
    let mut out = String::from("q,phi_K,contribution\n");
    for r in &report.per_q {
        writeln!(out, "{},{},{}", r.q, r.phi_k, fmt_sig(r.contribution, JSON_SIG_DIGITS)).unwrap();
    }
    out
}

/// `n,p,k,dk,lam` rows in ascending `n`.
pub fn events_csv(events: &NormEvents) -> String {
    let mut out = String::from("n,p,k,dk,lam\n");
    for e in events.sorted_by_norm() {
        writeln!(out, "{},{},{},{},{}", e.n, e.p, e.k, e.dk, fmt_sig(e.lam, EVENT_SIG_DIGITS)).unwrap();
    }
    out
}

/// One `q,phi,phi_K,aq_conductor,members` row; members dash-separated.
pub fn gq_csv_row(q: u64, classes: &AdmissibleClasses) -> String {
    let members: Vec<String> = classes.members.iter().map(|m| m.to_string()).collect();
    format!(
        "{},{},{},{},{}",
        q,
        crate::arith::euler_phi(q),
        classes.phi_k(),
        classes.aq_conductor,
        members.join("-")
    )
}

pub fn gq_csv<I: IntoIterator<Item = u64>>(field: &FieldSpec, moduli: I) -> String {
    let mut out = String::from("q,phi,phi_K,aq_conductor,members\n");
    for q in moduli {
        out.push_str(&gq_csv_row(q, &crate::galois::admissible_classes(field, q)));
        out.push('\n');
    }
    out
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub detail: String,
}

pub fn checks_json(field: &FieldSpec, config: &ReportConfig, outcomes: &[CheckOutcome]) -> Value {
    json!({
        "format_version": FORMAT_VERSION,
        "config": config,
        "field": field,
        "checks": outcomes,
        "all_passed": outcomes.iter().all(|c| c.passed),
    })
}

pub fn checks_csv(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::from("check,passed,value,detail\n");
    for c in outcomes {
        let value = c.value.map(|v| fmt_sig(v, JSON_SIG_DIGITS)).unwrap_or_default();
        writeln!(out, "{},{},{},\"{}\"", c.name, c.passed, value, c.detail.replace('"', "'")).unwrap();
    }
    out
}
