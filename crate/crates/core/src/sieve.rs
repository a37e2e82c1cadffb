//! Segmented prime sieve and the stream of prime-ideal-power norms.
//!
//! For a rational prime `p` with splitting `(e, f, g)`, the prime ideals of
//! K above `p` all have norm `p^f`, so their powers have norms `p^{f j}`.
//! Each such norm `n = p^k` (with `f | k`) is one [`NormEvent`] carrying
//! `D_K(n) = g` and `Lambda*_K(n) = f log p`.

use crate::arith::isqrt;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{FieldSpec, SplitData};
use crate::sum::CompensatedSum;

/// Largest supported sieve limit.
pub const SIEVE_CEILING: u64 = 1 << 40;

/// Default number of integers per sieve segment.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeSplitRecord {
    pub p: u64,
    pub split: SplitData,
}

/// One prime-ideal-power norm `n = p^k` with its multiplicity and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEvent {
    pub n: u64,
    pub p: u64,
    pub k: u32,
    /// Number of prime-ideal powers of norm `n`.
    pub dk: u64,
    /// `f log p`, natural log.
    pub lam: f64,
}

impl NormEvent {
    #[inline]
    pub fn weight(&self) -> f64 {
        self.dk as f64 * self.lam
    }
}

/// Segmented sieve of Eratosthenes.
#[derive(Debug, Clone, Copy)]
pub struct PrimeSieve {
    segment_size: usize,
    exec: Exec,
}

impl Default for PrimeSieve {
    fn default() -> Self {
        Self { segment_size: DEFAULT_SEGMENT_SIZE, exec: Exec::default() }
    }
}

impl PrimeSieve {
    pub fn new(segment_size: usize, exec: Exec) -> Result<Self> {
        if segment_size < 16 {
            return Err(Error::InvalidParameter(format!("segment size {segment_size} is below 16")));
        }
        Ok(Self { segment_size, exec })
    }

    pub fn segment_size(&self) -> usize {
        self.segment_size
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    /// All primes `<= x`, ascending.
    pub fn primes_up_to(&self, x: u64) -> Result<Vec<u64>> {
        Ok(self.segments(x, |_, seg| seg.to_vec())?.concat())
    }

    /// Runs `per_segment` on the primes of each segment and returns the
    /// outputs in segment order.
    fn segments<T, F>(&self, x: u64, per_segment: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, &[u64]) -> T + Sync + Send,
    {
        if x > SIEVE_CEILING {
            return Err(Error::SieveCeiling(x));
        }
        if x < 2 {
            return Ok(Vec::new());
        }
        let root = isqrt(x);
        let base = small_primes(root);
        let size = self.segment_size as u64;
        let count = x / size + 1;
        Ok(self.exec.map_range(0..count, |i| {
            let lo = i * size;
            let hi = (lo + size - 1).min(x);
            let primes = sieve_segment(lo, hi, &base);
            per_segment(i, &primes)
        }))
    }
}

/// Plain sieve of Eratosthenes for the base primes.
fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in `[lo, hi]`, given every prime up to `sqrt(hi)`.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p > hi {
            break;
        }
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut j = start;
        while j <= hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|&(i, &c)| !c && lo + i as u64 >= 2)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

/// All primes `<= x` with the default sieve configuration.
pub fn primes_up_to(x: u64) -> Result<Vec<u64>> {
    PrimeSieve::default().primes_up_to(x)
}

/// The norm events of K up to `x`, in ascending `p` then ascending `k`.
#[derive(Debug, Clone)]
pub struct NormEvents {
    field: FieldSpec,
    x: u64,
    events: Vec<NormEvent>,
}

impl NormEvents {
    pub fn generate(field: &FieldSpec, x: u64, sieve: &PrimeSieve) -> Result<Self> {
        if x < 2 {
            return Err(Error::InvalidParameter(format!("x = {x} must be at least 2")));
        }
        let chunks = sieve.segments(x, |_, primes| {
            let mut out = Vec::new();
            for &p in primes {
                push_prime_events(&mut out, p, field.split_type(p), x);
            }
            out
        })?;
        Ok(Self { field: field.clone(), x, events: chunks.concat() })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    /// Events in canonical order: ascending `p`, then ascending `k`.
    pub fn events(&self) -> &[NormEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events sorted by ascending norm.
    pub fn sorted_by_norm(&self) -> Vec<NormEvent> {
        let mut v = self.events.clone();
        v.sort_by_key(|e| e.n);
        v
    }

    /// The events whose rational prime is `p` (contiguous in canonical order).
    pub fn events_of_prime(&self, p: u64) -> &[NormEvent] {
        let start = self.events.partition_point(|e| e.p < p);
        let end = self.events.partition_point(|e| e.p <= p);
        &self.events[start..end]
    }

    /// `(S1, S2)`: the sums of `D_K Lambda*_K` and of its square over `n <= x`.
    pub fn moment_sums(&self) -> (f64, f64) {
        let mut s1 = CompensatedSum::new();
        let mut s2 = CompensatedSum::new();
        for e in &self.events {
            let w = e.weight();
            s1.add(w);
            s2.add(w * w);
        }
        (s1.value(), s2.value())
    }
}

fn push_prime_events(out: &mut Vec<NormEvent>, p: u64, split: SplitData, x: u64) {
    let lam = split.f as f64 * (p as f64).ln();
    let Some(step) = p.checked_pow(split.f as u32) else {
        return;
    };
    let mut n = step;
    let mut k = split.f as u32;
    while n <= x {
        out.push(NormEvent { n, p, k, dk: split.g, lam });
        match n.checked_mul(step) {
            Some(next) => n = next,
            None => break,
        }
        k += split.f as u32;
    }
}

/// Split records for every prime `<= x`.
pub fn split_records(field: &FieldSpec, x: u64) -> Result<Vec<PrimeSplitRecord>> {
    Ok(primes_up_to(x)?
        .into_iter()
        .map(|p| PrimeSplitRecord { p, split: field.split_type(p) })
        .collect())
}

/// Norm events with the default sieve.
pub fn norm_events(field: &FieldSpec, x: u64) -> Result<NormEvents> {
    NormEvents::generate(field, x, &PrimeSieve::default())
}

/// `(S1, S2)` for K up to `x`.
pub fn event_moment_sums(field: &FieldSpec, x: u64) -> Result<(f64, f64)> {
    Ok(norm_events(field, x)?.moment_sums())
}
