//! The subgroup `G_q` of `(Z/qZ)*` cut out by K.
//!
//! `G_q` is the image of `Gal(K(zeta_q)/K)` in `(Z/qZ)*`; it is the
//! subgroup fixing `A_q = K ∩ Q(zeta_q)`. For the supported families:
//!
//! * K = Q: `A_q = Q`, so `G_q` is everything.
//! * K quadratic of conductor `c`: `A_q = K` when `c | q` and then `G_q` is
//!   the kernel of the Kronecker character of K; otherwise `A_q = Q`.
//! * K = Q(zeta_m): `A_q = Q(zeta_g)` with `g = gcd(m, q)`, and `G_q` is the
//!   congruence subgroup `a = 1 (mod g)`.
//!
//! [`gq_empirical`] recomputes `G_q` from Frobenius data alone, as the
//! multiplicative closure of `N p = p^f (mod q)` over unramified `p`.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::arith::{gcd, kronecker, mul_mod};
use crate::characters::{characters_of, DirichletCharacter, UnitGroupModQ};
use crate::field::{FieldKind, FieldSpec};
use crate::sieve::primes_up_to;

/// Default prime bound for the Frobenius-closure oracle.
pub const DEFAULT_ORACLE_BOUND: u64 = 10_000;

/// `G_q` without its annihilator; cheap enough to build for every `q <= Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleClasses {
    pub q: u64,
    /// Sorted residues of `G_q`. For `q = 1` this is `[0]`.
    pub members: Vec<u64>,
    /// Conductor of `A_q`.
    pub aq_conductor: u64,
}

impl AdmissibleClasses {
    /// `phi_K(q) = |G_q|`.
    pub fn phi_k(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn contains(&self, a: u64) -> bool {
        self.members.binary_search(&(a % self.q)).is_ok()
    }

    /// `mask[a]` is true iff `a` is in `G_q`.
    pub fn membership_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.q as usize];
        for &a in &self.members {
            mask[a as usize] = true;
        }
        mask
    }
}

/// `G_q` with its annihilator `G_q^perp`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GqRecord {
    pub q: u64,
    pub members: Vec<u64>,
    pub phi_k: u64,
    pub aq_conductor: u64,
    /// Indices into [`crate::characters::enumerate_characters`] of the characters trivial on `G_q`.
    pub perp: Vec<usize>,
}

impl GqRecord {
    pub fn classes(&self) -> AdmissibleClasses {
        AdmissibleClasses { q: self.q, members: self.members.clone(), aq_conductor: self.aq_conductor }
    }

    pub fn in_perp(&self, chi: &DirichletCharacter) -> bool {
        self.perp.binary_search(&chi.index()).is_ok()
    }
}

/// Closed-form `G_q` members and `A_q` conductor.
pub fn admissible_classes(field: &FieldSpec, q: u64) -> AdmissibleClasses {
    assert!(q >= 1, "modulus must be positive");
    let units = (0..q).filter(move |&a| gcd(a, q) == 1);
    let (members, aq_conductor): (Vec<u64>, u64) = match field.kind() {
        FieldKind::Rational => (units.collect(), 1),
        FieldKind::Quadratic { .. } => {
            let c = field.conductor();
            if q.is_multiple_of(c) {
                let disc = field.quadratic_discriminant().expect("quadratic");
                (units.filter(|&a| kronecker(disc, a as i64) == 1).collect(), c)
            } else {
                (units.collect(), 1)
            }
        }
        FieldKind::Cyclotomic { m } => {
            let mut g0 = gcd(m, q);
            if g0 % 4 == 2 {
                g0 /= 2;
            }
            (units.filter(|&a| a % g0 == 1 % g0).collect(), g0)
        }
    };
    AdmissibleClasses { q, members, aq_conductor }
}

/// Full closed-form record, including `G_q^perp`.
pub fn gq_closed_form(field: &FieldSpec, q: u64) -> GqRecord {
    let classes = admissible_classes(field, q);
    let group = Arc::new(UnitGroupModQ::new(q));
    let perp = annihilator(&group, &classes.members);
    GqRecord {
        q,
        phi_k: classes.phi_k(),
        members: classes.members,
        aq_conductor: classes.aq_conductor,
        perp,
    }
}

/// Indices of the characters mod q that are 1 on every element of `members`.
pub fn annihilator(group: &Arc<UnitGroupModQ>, members: &[u64]) -> Vec<usize> {
    let gens = subgroup_generators(group.q(), members);
    characters_of(group)
        .iter()
        .filter(|chi| gens.iter().all(|&a| chi.numerator(a) == Some(0)))
        .map(|chi| chi.index())
        .collect()
}

/// A small generating set for the subgroup with the given members.
fn subgroup_generators(q: u64, members: &[u64]) -> Vec<u64> {
    let mut reached = vec![false; q as usize];
    reached[(1 % q) as usize] = true;
    let mut span = vec![1 % q];
    let mut gens = Vec::new();
    for &a in members {
        if reached[a as usize] {
            continue;
        }
        gens.push(a);
        span = closure(q, &gens);
        for &s in &span {
            reached[s as usize] = true;
        }
    }
    debug_assert_eq!(span.len(), members.len().max(1));
    gens
}

/// Multiplicative closure of `gens` together with 1, sorted.
fn closure(q: u64, gens: &[u64]) -> Vec<u64> {
    let mut seen = vec![false; q as usize];
    let one = 1 % q;
    seen[one as usize] = true;
    let mut queue = VecDeque::from([one]);
    let mut out = vec![one];
    while let Some(a) = queue.pop_front() {
        for &g in gens {
            let b = mul_mod(a, g, q);
            if !seen[b as usize] {
                seen[b as usize] = true;
                out.push(b);
                queue.push_back(b);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `G_q` recomputed from Frobenius elements of primes `p <= bound`.
///
/// Always a subgroup of the true `G_q`; equal once `bound` is large enough.
pub fn gq_empirical(field: &FieldSpec, q: u64, bound: u64) -> Vec<u64> {
    let primes = primes_up_to(bound.max(2)).expect("oracle bound below the sieve ceiling");
    gq_empirical_from_primes(field, q, &primes)
}

/// [`gq_empirical`] over a precomputed prime list.
pub fn gq_empirical_from_primes(field: &FieldSpec, q: u64, primes: &[u64]) -> Vec<u64> {
    let mut gens: Vec<u64> = primes
        .iter()
        .filter(|&&p| !q.is_multiple_of(p) && !field.is_ramified(p))
        .map(|&p| {
            let f = field.split_type(p).f;
            crate::arith::pow_mod(p, f, q)
        })
        .collect();
    gens.sort_unstable();
    gens.dedup();
    closure(q, &gens)
}

/// `phi_K(q) = |G_q|`.
pub fn phi_k(field: &FieldSpec, q: u64) -> u64 {
    admissible_classes(field, q).phi_k()
}

/// Indices of the characters mod q trivial on `G_q`.
pub fn gq_perp(field: &FieldSpec, q: u64) -> Vec<usize> {
    gq_closed_form(field, q).perp
}
