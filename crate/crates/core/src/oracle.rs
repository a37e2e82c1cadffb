//! Reference variance by direct double loop.
//!
//! No sieve, no buckets: primes come from trial division and every
//! `(q, a)` pair rescans the full list of prime powers. Used to certify the
//! bucketed pipeline in [`crate::stats::variance`].

use crate::arith::is_prime;
use crate::field::FieldSpec;
use crate::galois::admissible_classes;

/// `(n, weight)` for every prime-ideal-power norm `n <= x`.
fn weighted_prime_powers(field: &FieldSpec, x: u64) -> Vec<(u64, f64)> {
    let mut out = Vec::new();
    for p in (2..=x).filter(|&p| is_prime(p)) {
        let s = field.split_type(p);
        let mut k = 1u32;
        let mut n = p;
        loop {
            if (k as u64).is_multiple_of(s.f) {
                out.push((n, s.g as f64 * s.f as f64 * (p as f64).ln()));
            }
            match n.checked_mul(p) {
                Some(next) if next <= x => n = next,
                _ => break,
            }
            k += 1;
        }
    }
    out
}

/// Per-modulus contributions `sum_{a in G_q} (psi_K(x;q,a) - x/phi_K(q))^2` for `q = 1..=Q`.
pub fn naive_variance_per_q(field: &FieldSpec, x: u64, big_q: u64) -> Vec<f64> {
    let powers = weighted_prime_powers(field, x);
    (1..=big_q)
        .map(|q| {
            let classes = admissible_classes(field, q);
            let mean = x as f64 / classes.phi_k() as f64;
            classes
                .members
                .iter()
                .map(|&a| {
                    let psi: f64 = powers.iter().filter(|(n, _)| n % q == a).map(|(_, w)| w).sum();
                    (psi - mean) * (psi - mean)
                })
                .sum()
        })
        .collect()
}

pub fn naive_variance(field: &FieldSpec, x: u64, big_q: u64) -> f64 {
    naive_variance_per_q(field, x, big_q).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_one_by_hand() {
        // psi(10) = 3 log 2 + 2 log 3 + log 5 + log 7
        let psi = 3.0 * 2f64.ln() + 2.0 * 3f64.ln() + 5f64.ln() + 7f64.ln();
        let v = naive_variance(&FieldSpec::rational(), 10, 1);
        assert!((v - (psi - 10.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_prime_powers() {
        let k = crate::field::parse_field("quad:-1").unwrap();
        let norms: Vec<u64> = weighted_prime_powers(&k, 10).iter().map(|(n, _)| *n).collect();
        assert_eq!(norms, vec![2, 4, 8, 9, 5]);
    }
}
