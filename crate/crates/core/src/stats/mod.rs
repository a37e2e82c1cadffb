//! Residue-class statistics of prime-ideal norms.
//!
//! Everything here is computed from one immutable [`NormEvents`] list. For
//! a modulus `q` the events are folded into [`ResidueBuckets`]
//! `t[a] = psi_K(x; q, a)`; error terms, character sums and the variance
//! are all read off those buckets.

mod identities;
mod variance;

pub use identities::{
    char_exchange_diff, large_sieve_check, exchange_grid, orthogonality_check, orthogonality_grid, CharExchange,
    LargeSieveCheck, ExchangeSummary, OrthogonalityCheck,
};
pub use variance::{
    dyadic_profile, grh_compare, variance, DyadicBlock, GrhComparison, PerModulus, SmallModulusBlock, VarianceOptions,
    VarianceReport, REPORT_CHECK_Q_MAX, REPORT_LARGE_SIEVE_Q_MAX, SMALL_Q_PSI_CAP,
};

use num_complex::Complex64;

use crate::characters::{DirichletCharacter, RootTable};
use crate::galois::{AdmissibleClasses, GqRecord};
use crate::sieve::NormEvents;
use crate::sum::CompensatedSum;

/// Relative tolerance for exact identities evaluated in floating point.
pub const IDENTITY_TOL: f64 = 1e-9;

/// `|a - b| / max(|a|, |b|, 1)`.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub(crate) fn relative_gap_complex(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// `t[a] = sum_{n <= x, n = a (mod q)} D_K(n) Lambda*_K(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueBuckets {
    q: u64,
    x: u64,
    t: Vec<f64>,
}

impl ResidueBuckets {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn table(&self) -> &[f64] {
        &self.t
    }

    pub fn get(&self, a: u64) -> f64 {
        self.t[(a % self.q) as usize]
    }

    /// Sum over all residues, in ascending residue order.
    pub fn total(&self) -> f64 {
        crate::sum::compensated(self.t.iter().copied())
    }

    /// Mass in residues coprime to `q` that lie outside `G_q`.
    pub fn outside_mass(&self, classes: &AdmissibleClasses) -> f64 {
        let mask = classes.membership_mask();
        let q = self.q;
        crate::sum::compensated(
            (0..q)
                .filter(|&a| !mask[a as usize] && crate::arith::gcd(a, q) == 1)
                .map(|a| self.t[a as usize]),
        )
    }
}

/// One pass over the events; each bucket is a compensated sum in event order.
pub fn residue_buckets(events: &NormEvents, q: u64) -> ResidueBuckets {
    assert!(q >= 1, "modulus must be positive");
    let mut acc = vec![CompensatedSum::new(); q as usize];
    for e in events.events() {
        acc[(e.n % q) as usize].add(e.weight());
    }
    ResidueBuckets { q, x: events.x(), t: acc.iter().map(|s| s.value()).collect() }
}

/// `E_K(x; q, a) = t[a] - x / phi_K(q)` for each `a` in `G_q`, ascending `a`.
pub fn error_terms(buckets: &ResidueBuckets, classes: &AdmissibleClasses) -> Vec<(u64, f64)> {
    assert_eq!(buckets.q, classes.q);
    let mean = buckets.x as f64 / classes.phi_k() as f64;
    classes.members.iter().map(|&a| (a, buckets.t[a as usize] - mean)).collect()
}

/// `sum_{a in G_q} E_K(x; q, a)^2`.
pub fn squared_error(buckets: &ResidueBuckets, classes: &AdmissibleClasses) -> f64 {
    crate::sum::compensated(error_terms(buckets, classes).into_iter().map(|(_, e)| e * e))
}

/// `psi_K(x, chi ∘ N) = sum_a chi(a) t[a]`, using a precomputed root table.
pub fn psi_chi_with(buckets: &ResidueBuckets, chi: &DirichletCharacter, roots: &RootTable) -> Complex64 {
    assert_eq!(buckets.q, chi.q(), "buckets and character must share the modulus");
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (a, &t) in buckets.t.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        if let Some(k) = chi.numerator(a as u64) {
            let z = roots.get(k);
            re.add(z.re * t);
            im.add(z.im * t);
        }
    }
    Complex64::new(re.value(), im.value())
}

/// `psi_K(x, chi ∘ N)`.
pub fn psi_chi(buckets: &ResidueBuckets, chi: &DirichletCharacter) -> Complex64 {
    psi_chi_with(buckets, chi, &RootTable::for_group(chi.group()))
}

/// `psi'_K(x, chi ∘ N)`: `psi_chi - x` when `chi` is trivial on `G_q`.
pub fn psi_prime_chi(buckets: &ResidueBuckets, chi: &DirichletCharacter, record: &GqRecord) -> Complex64 {
    shift_if_in_perp(psi_chi(buckets, chi), chi, record, buckets.x)
}

fn shift_if_in_perp(psi: Complex64, chi: &DirichletCharacter, record: &GqRecord, x: u64) -> Complex64 {
    if record.in_perp(chi) {
        psi - x as f64
    } else {
        psi
    }
}
