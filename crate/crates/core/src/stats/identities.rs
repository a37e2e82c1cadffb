//! Exact identities and inequalities relating the error terms to character sums.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::{psi_chi_with, relative_gap_complex, residue_buckets, shift_if_in_perp, squared_error, ResidueBuckets};
use crate::arith::{euler_phi, prime_divisors};
use crate::characters::{characters_of, DirichletCharacter, RootTable, UnitGroupModQ};
use crate::exec::Exec;
use crate::galois::{annihilator, admissible_classes, GqRecord};
use crate::sieve::NormEvents;
use crate::sum::{compensated, CompensatedSum};

/// Both sides of the Parseval identity for one modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalityCheck {
    pub q: u64,
    /// `sum_{a in G_q} E_K(x; q, a)^2`.
    pub lhs: f64,
    /// `phi(q)^{-1} sum_{chi mod q} |psi'_K(x, chi ∘ N)|^2`.
    pub rhs: f64,
    /// `|lhs - rhs| / max(lhs, 1)`.
    pub gap: f64,
}

pub fn orthogonality_check(events: &NormEvents, q: u64) -> OrthogonalityCheck {
    let buckets = residue_buckets(events, q);
    let classes = admissible_classes(events.field(), q);
    let lhs = squared_error(&buckets, &classes);

    let group = Arc::new(UnitGroupModQ::new(q));
    let record = GqRecord {
        q,
        phi_k: classes.phi_k(),
        perp: annihilator(&group, &classes.members),
        members: classes.members,
        aq_conductor: classes.aq_conductor,
    };
    let roots = RootTable::for_group(&group);
    let rhs = compensated(characters_of(&group).iter().map(|chi| {
        shift_if_in_perp(psi_chi_with(&buckets, chi, &roots), chi, &record, events.x()).norm_sqr()
    })) / euler_phi(q) as f64;

    let gap = (lhs - rhs).abs() / lhs.max(1.0);
    OrthogonalityCheck { q, lhs, rhs, gap }
}

pub fn orthogonality_grid(events: &NormEvents, moduli: &[u64], exec: Exec) -> Vec<OrthogonalityCheck> {
    exec.map_slice(moduli, |&q| orthogonality_check(events, q))
}

/// The large-sieve inequality over primitive characters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeSieveCheck {
    #[serde(rename = "Q")]
    pub big_q: u64,
    /// `sum_{q <= Q} q/phi(q) sum_{chi primitive mod q} |psi_K(x, chi ∘ N)|^2`.
    pub lhs: f64,
    /// `(x + Q^2) S2`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn large_sieve_check(events: &NormEvents, big_q: u64, exec: Exec) -> LargeSieveCheck {
    assert!(big_q >= 1);
    let per_q = exec.map_range(1..big_q + 1, |q| {
        let buckets = residue_buckets(events, q);
        let group = Arc::new(UnitGroupModQ::new(q));
        let roots = RootTable::for_group(&group);
        let inner = compensated(
            characters_of(&group)
                .iter()
                .filter(|chi| chi.is_primitive())
                .map(|chi| psi_chi_with(&buckets, chi, &roots).norm_sqr()),
        );
        q as f64 / euler_phi(q) as f64 * inner
    });
    let lhs = compensated(per_q);
    let (_, s2) = events.moment_sums();
    let x = events.x() as f64;
    let rhs = (x + (big_q as f64).powi(2)) * s2;
    LargeSieveCheck { big_q, lhs, rhs, holds: lhs <= rhs * (1.0 + super::IDENTITY_TOL) }
}

/// Difference between a character sum and that of its primitive part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharExchange {
    pub q: u64,
    pub conductor: u64,
    pub exponents: Vec<u64>,
    /// `psi_K(x, chi ∘ N) - psi_K(x, chi_* ∘ N)` from the two bucket tables.
    #[serde(skip)]
    pub direct: Complex64,
    /// `-sum chi_*(n) D_K(n) Lambda*_K(n)` over `n = p^k`, `p | q`, `p ∤ f`.
    #[serde(skip)]
    pub explicit: Complex64,
    pub gap: f64,
    /// `2 [K:Q] (log qx)^2`.
    pub bound: f64,
    pub bound_ok: bool,
}

impl CharExchange {
    pub fn direct_abs(&self) -> f64 {
        self.direct.norm()
    }
}

/// Character-exchange difference for one character. Primitive characters
/// give the trivial result `(0, 0, true)`.
pub fn char_exchange_diff(events: &NormEvents, chi: &DirichletCharacter) -> CharExchange {
    let q = chi.q();
    let buckets_q = residue_buckets(events, q);
    let buckets_f = residue_buckets(events, chi.conductor());
    exchange_with(events, chi, &buckets_q, &buckets_f)
}

fn exchange_with(
    events: &NormEvents,
    chi: &DirichletCharacter,
    buckets_q: &ResidueBuckets,
    buckets_f: &ResidueBuckets,
) -> CharExchange {
    let q = chi.q();
    let f = chi.conductor();
    let bound = 2.0 * events.field().degree() as f64 * ((q as f64) * events.x() as f64).ln().powi(2);
    let zero = Complex64::new(0.0, 0.0);
    if chi.is_primitive() {
        return CharExchange {
            q,
            conductor: f,
            exponents: chi.exponents().to_vec(),
            direct: zero,
            explicit: zero,
            gap: 0.0,
            bound,
            bound_ok: true,
        };
    }
    let prim = chi.primitive_part();
    let roots_q = RootTable::for_group(chi.group());
    let roots_f = RootTable::for_group(prim.group());
    let direct = psi_chi_with(buckets_q, chi, &roots_q) - psi_chi_with(buckets_f, &prim, &roots_f);

    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for p in prime_divisors(q).into_iter().filter(|p| !f.is_multiple_of(*p)) {
        for e in events.events_of_prime(p) {
            let k = prim.numerator(e.n).expect("p does not divide the conductor");
            let z = roots_f.get(k) * e.weight();
            re.add(-z.re);
            im.add(-z.im);
        }
    }
    let explicit = Complex64::new(re.value(), im.value());
    CharExchange {
        q,
        conductor: f,
        exponents: chi.exponents().to_vec(),
        direct,
        explicit,
        gap: relative_gap_complex(direct, explicit),
        bound,
        bound_ok: direct.norm() <= bound,
    }
}

/// Character exchange over every imprimitive character with modulus `<= q_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchangeSummary {
    pub q_max: u64,
    pub characters_checked: usize,
    pub max_gap: f64,
    pub all_bounds_ok: bool,
    /// Largest `|direct| / bound` seen.
    pub max_bound_ratio: f64,
}

pub fn exchange_grid(events: &NormEvents, q_max: u64, exec: Exec) -> (ExchangeSummary, Vec<CharExchange>) {
    let buckets: Vec<ResidueBuckets> = exec.map_range(1..q_max + 1, |q| residue_buckets(events, q));
    let per_q: Vec<Vec<CharExchange>> = exec.map_range(1..q_max + 1, |q| {
        let group = Arc::new(UnitGroupModQ::new(q));
        characters_of(&group)
            .iter()
            .filter(|chi| !chi.is_primitive())
            .map(|chi| exchange_with(events, chi, &buckets[q as usize - 1], &buckets[chi.conductor() as usize - 1]))
            .collect()
    });
    let all: Vec<CharExchange> = per_q.into_iter().flatten().collect();
    let summary = ExchangeSummary {
        q_max,
        characters_checked: all.len(),
        max_gap: all.iter().map(|c| c.gap).fold(0.0, f64::max),
        all_bounds_ok: all.iter().all(|c| c.bound_ok),
        max_bound_ratio: all.iter().map(|c| c.direct.norm() / c.bound).fold(0.0, f64::max),
    };
    (summary, all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;
    use crate::field::parse_field;
    use crate::sieve::norm_events;

    fn events(label: &str, x: u64) -> NormEvents {
        norm_events(&parse_field(label).unwrap(), x).unwrap()
    }

    #[test]
    fn orthogonality_small() {
        let ev = events("Q", 1000);
        let c = orthogonality_check(&ev, 7);
        assert!(c.gap < 1e-10, "{c:?}");
        let one = orthogonality_check(&ev, 1);
        let expect = (ev.moment_sums().0 - 1000.0).powi(2);
        assert!((one.lhs - expect).abs() < 1e-9 * expect.max(1.0));
        assert!((one.rhs - expect).abs() < 1e-9 * expect.max(1.0));
        for label in ["quad:-1", "quad:5", "cyclo:5"] {
            let ev = events(label, 2000);
            for c in orthogonality_grid(&ev, &[1, 2, 5, 10, 12, 20, 24], Exec::Parallel) {
                assert!(c.gap < 1e-9, "{label} {c:?}");
            }
        }
    }

    #[test]
    fn large_sieve_small() {
        let ev = events("Q", 1000);
        let one = large_sieve_check(&ev, 1, Exec::Sequential);
        assert!((one.lhs - ev.moment_sums().0.powi(2)).abs() < 1e-9 * one.lhs);
        assert!(one.holds);
        assert!(large_sieve_check(&ev, 30, Exec::Parallel).holds);
    }

    #[test]
    fn exchange_examples() {
        let ev = events("Q", 1000);
        let chi0_6 = enumerate_characters(6).remove(0);
        let r = char_exchange_diff(&ev, &chi0_6);
        let mut expect = 0.0;
        let mut n = 2u64;
        while n <= 1000 {
            expect -= 2f64.ln();
            n *= 2;
        }
        let mut n = 3u64;
        while n <= 1000 {
            expect -= 3f64.ln();
            n *= 3;
        }
        assert!((r.direct.re - expect).abs() < 1e-9 && r.direct.im.abs() < 1e-12);
        assert!(r.gap < 1e-9 && r.bound_ok);

        let ev = events("quad:-1", 1000);
        let r = char_exchange_diff(&ev, &enumerate_characters(2).remove(0));
        let expect = -(9.0 * 2f64.ln());
        assert!((r.direct.re - expect).abs() < 1e-9);
        assert!((r.explicit.re - expect).abs() < 1e-9);

        let prim = enumerate_characters(5).remove(1);
        let r = char_exchange_diff(&ev, &prim);
        assert_eq!((r.direct, r.explicit, r.bound_ok), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), true));
    }

    #[test]
    fn exchange_grid_small() {
        for label in ["Q", "quad:-1", "quad:5", "cyclo:5"] {
            let ev = events(label, 1000);
            let (summary, all) = exchange_grid(&ev, 30, Exec::Parallel);
            assert!(summary.max_gap < 1e-9, "{label} {summary:?}");
            assert!(summary.all_bounds_ok);
            assert_eq!(all.len(), summary.characters_checked);
            let expect: usize = (1..=30u64)
                .map(|q| enumerate_characters(q).iter().filter(|c| !c.is_primitive()).count())
                .sum();
            assert_eq!(all.len(), expect);
        }
    }
}
