//! The variance `V(x, Q)` with its per-modulus and dyadic breakdowns.

use std::sync::Arc;

use serde::Serialize;

use super::{psi_chi_with, residue_buckets, shift_if_in_perp, squared_error};
use crate::characters::{characters_of, RootTable, UnitGroupModQ};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::FieldSpec;
use crate::galois::{admissible_classes, annihilator, GqRecord};
use crate::sieve::NormEvents;
use crate::sum::compensated;

/// Moduli checked (orthogonality, character exchange) alongside a variance run.
pub const REPORT_CHECK_Q_MAX: u64 = 30;
/// Largest `Q` for the large-sieve check embedded in a variance run.
pub const REPORT_LARGE_SIEVE_Q_MAX: u64 = 100;
/// Largest modulus for which `max |psi'|` is evaluated in the small-q block.
pub const SMALL_Q_PSI_CAP: u64 = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceOptions {
    pub big_q: u64,
    /// Label for the range condition `x (log x)^{-M} <= Q` and for `Q1 = (log x)^{M+1}`.
    pub m: f64,
    pub exec: Exec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerModulus {
    pub q: u64,
    #[serde(rename = "phi_K")]
    pub phi_k: u64,
    pub contribution: f64,
    #[serde(skip)]
    pub outside_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicBlock {
    #[serde(rename = "U_lo")]
    pub u_lo: f64,
    #[serde(rename = "U_hi")]
    pub u_hi: f64,
    pub contribution: f64,
}

/// Moduli `q <= Q1 = (log x)^{M+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallModulusBlock {
    #[serde(rename = "Q1")]
    pub q1: f64,
    pub contribution: f64,
    /// `max |psi'_K(x, chi ∘ N)|` over characters of modulus `<= psi_q_max`.
    pub max_abs_psi_prime: f64,
    pub psi_q_max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrhComparison {
    #[serde(rename = "V")]
    pub v: f64,
    /// `x Q log x`.
    pub envelope_bdh: f64,
    /// `x Q (log x)^4`.
    pub envelope_grh: f64,
    pub ratio_bdh: f64,
    pub ratio_grh: f64,
    /// `|envelope_grh / envelope_bdh - (log x)^3| / (log x)^3`.
    pub envelope_identity_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    pub field: FieldSpec,
    pub x: u64,
    pub big_q: u64,
    pub m: f64,
    pub v: f64,
    pub ratio_bdh: f64,
    pub ratio_grh: f64,
    pub outside_mass: f64,
    pub range_condition_satisfied: bool,
    pub per_q: Vec<PerModulus>,
    pub dyadic: Vec<DyadicBlock>,
    pub small_q: SmallModulusBlock,
}

/// `V = sum_{q <= Q} sum_{a in G_q} (psi_K(x; q, a) - x/phi_K(q))^2`.
pub fn variance(events: &NormEvents, opts: VarianceOptions) -> Result<VarianceReport> {
    let x = events.x();
    let big_q = opts.big_q;
    if big_q < 1 {
        return Err(Error::InvalidParameter("Q must be at least 1".into()));
    }
    if big_q > x {
        return Err(Error::InvalidParameter(format!("Q = {big_q} exceeds x = {x}")));
    }
    let per_q = opts.exec.map_range(1..big_q + 1, |q| {
        let classes = admissible_classes(events.field(), q);
        let buckets = residue_buckets(events, q);
        PerModulus {
            q,
            phi_k: classes.phi_k(),
            contribution: squared_error(&buckets, &classes),
            outside_mass: buckets.outside_mass(&classes),
        }
    });
    let v = compensated(per_q.iter().map(|r| r.contribution));
    let outside_mass = compensated(per_q.iter().map(|r| r.outside_mass));

    let xf = x as f64;
    let log_x = xf.ln();
    let grh = envelopes(v, x, big_q);
    let range_condition_satisfied = xf * log_x.powf(-opts.m) <= big_q as f64 && big_q <= x;

    let q1 = log_x.powf(opts.m + 1.0);
    let small_limit = (q1.floor() as u64).min(big_q);
    let small_contribution = compensated(per_q.iter().take(small_limit as usize).map(|r| r.contribution));
    let psi_q_max = small_limit.min(SMALL_Q_PSI_CAP);
    let max_abs_psi_prime = max_abs_psi_prime(events, psi_q_max, opts.exec);

    let dyadic = dyadic_profile(&per_q, big_q);
    Ok(VarianceReport {
        field: events.field().clone(),
        x,
        big_q,
        m: opts.m,
        v,
        ratio_bdh: grh.ratio_bdh,
        ratio_grh: grh.ratio_grh,
        outside_mass,
        range_condition_satisfied,
        per_q,
        dyadic,
        small_q: SmallModulusBlock { q1, contribution: small_contribution, max_abs_psi_prime, psi_q_max },
    })
}

/// `max |psi'_K(x, chi ∘ N)|` over all characters of modulus `<= q_max`.
fn max_abs_psi_prime(events: &NormEvents, q_max: u64, exec: Exec) -> f64 {
    exec.map_range(1..q_max + 1, |q| {
        let buckets = residue_buckets(events, q);
        let classes = admissible_classes(events.field(), q);
        let group = Arc::new(UnitGroupModQ::new(q));
        let record = GqRecord {
            q,
            phi_k: classes.phi_k(),
            perp: annihilator(&group, &classes.members),
            members: classes.members,
            aq_conductor: classes.aq_conductor,
        };
        let roots = RootTable::for_group(&group);
        characters_of(&group)
            .iter()
            .map(|chi| shift_if_in_perp(psi_chi_with(&buckets, chi, &roots), chi, &record, events.x()).norm())
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// Contributions of `q` in `(Q 2^{-k-1}, Q 2^{-k}]` for `k = 0, 1, ...` until every `q >= 1` is covered.
pub fn dyadic_profile(per_q: &[PerModulus], big_q: u64) -> Vec<DyadicBlock> {
    let mut blocks = Vec::new();
    let mut k = 0i32;
    loop {
        let u_hi = big_q as f64 / 2f64.powi(k);
        if u_hi < 1.0 {
            break;
        }
        let u_lo = u_hi / 2.0;
        let contribution = compensated(
            per_q
                .iter()
                .filter(|r| (r.q as f64) > u_lo && (r.q as f64) <= u_hi)
                .map(|r| r.contribution),
        );
        blocks.push(DyadicBlock { u_lo, u_hi, contribution });
        k += 1;
    }
    blocks
}

fn envelopes(v: f64, x: u64, big_q: u64) -> GrhComparison {
    let log_x = (x as f64).ln();
    let envelope_bdh = x as f64 * big_q as f64 * log_x;
    let envelope_grh = envelope_bdh * log_x.powi(3);
    let cube = log_x.powi(3);
    GrhComparison {
        v,
        envelope_bdh,
        envelope_grh,
        ratio_bdh: v / envelope_bdh,
        ratio_grh: v / envelope_grh,
        envelope_identity_gap: ((envelope_grh / envelope_bdh) - cube).abs() / cube,
    }
}

/// The unconditional and GRH envelopes for a finished variance run.
pub fn grh_compare(report: &VarianceReport) -> GrhComparison {
    envelopes(report.v, report.x, report.big_q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_field;
    use crate::sieve::norm_events;

    fn run(label: &str, x: u64, big_q: u64) -> VarianceReport {
        let ev = norm_events(&parse_field(label).unwrap(), x).unwrap();
        variance(&ev, VarianceOptions { big_q, m: 1.0, exec: Exec::Parallel }).unwrap()
    }

    #[test]
    fn q_one_is_squared_chebyshev_error() {
        let ev = norm_events(&FieldSpec::rational(), 1000).unwrap();
        let r = variance(&ev, VarianceOptions { big_q: 1, m: 1.0, exec: Exec::Sequential }).unwrap();
        let expect = (ev.moment_sums().0 - 1000.0).powi(2);
        assert!((r.v - expect).abs() <= 1e-9 * expect);
        assert_eq!(r.per_q.len(), 1);
    }

    #[test]
    fn rejects_q_above_x() {
        let ev = norm_events(&FieldSpec::rational(), 10).unwrap();
        let err = variance(&ev, VarianceOptions { big_q: 20, m: 1.0, exec: Exec::Sequential }).unwrap_err();
        assert!(err.to_string().contains("exceeds"));
        assert!(variance(&ev, VarianceOptions { big_q: 0, m: 1.0, exec: Exec::Sequential }).is_err());
    }

    #[test]
    fn breakdowns_sum_to_total() {
        for label in ["Q", "quad:-1", "cyclo:5"] {
            let r = run(label, 10_000, 1000);
            let from_q = compensated(r.per_q.iter().map(|p| p.contribution));
            let from_blocks = compensated(r.dyadic.iter().map(|b| b.contribution));
            assert!((from_q - r.v).abs() <= 1e-9 * r.v);
            assert!((from_blocks - r.v).abs() <= 1e-9 * r.v);
            assert!(r.per_q.iter().all(|p| p.contribution >= 0.0));
            assert_eq!(r.outside_mass, 0.0);
        }
    }

    #[test]
    fn dyadic_blocks_are_monotone() {
        let r = run("Q", 100_000, 1000);
        assert_eq!(r.dyadic.len(), 10);
        assert_eq!(r.dyadic[0].u_hi, 1000.0);
        for w in r.dyadic.windows(2) {
            assert_eq!(w[0].u_lo, w[1].u_hi);
        }
        assert!(r.dyadic.len() as f64 <= (1000f64).log2() + 1.0);
        let q1 = (1e5f64).ln().powi(2);
        assert!((r.small_q.q1 - q1).abs() < 1e-9);
        assert!((r.small_q.q1 - 132.5).abs() < 0.1);
        assert_eq!(r.small_q.psi_q_max, 132);
    }

    #[test]
    fn grh_envelopes() {
        let r = run("Q", 100_000, 1000);
        let g = grh_compare(&r);
        assert!(g.envelope_identity_gap < 1e-12);
        assert!(g.ratio_grh < g.ratio_bdh);
        assert_eq!(g.ratio_bdh, r.ratio_bdh);
        assert!(!r.range_condition_satisfied);
        let r = run("Q", 1000, 500);
        assert!(r.range_condition_satisfied);
    }
}
