//! The base field K and the splitting of rational primes in it.
//!
//! Supported fields are the abelian families whose splitting laws are
//! classical: Q itself, quadratic fields Q(sqrt d) and cyclotomic fields
//! Q(zeta_m).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{self, euler_phi, factorize, is_squarefree, kronecker};
use crate::error::Error;

/// Largest accepted `|d|` for quadratic fields, so that `4d` fits in `i64`.
pub const MAX_QUADRATIC_D: i64 = 1 << 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    Quadratic { d: i64 },
    Cyclotomic { m: u64 },
}

/// A supported normal field K, with its basic invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    kind: FieldKind,
    degree: u64,
    discriminant: BigInt,
    disc_primes: Vec<u64>,
    conductor: u64,
    // phi(conductor) and its prime factors, for residue-degree computations
    phi_conductor: u64,
    phi_conductor_primes: Vec<u64>,
}

/// Ramification index, residue degree and number of primes above `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SplitData {
    pub e: u64,
    pub f: u64,
    pub g: u64,
}

impl FieldSpec {
    pub fn rational() -> Self {
        Self::build(FieldKind::Rational, 1, BigInt::from(1), Vec::new(), 1)
    }

    /// Q(sqrt d) for squarefree `d` not in {0, 1}.
    pub fn quadratic(d: i64) -> Result<Self, Error> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::InvalidField(format!("quad:{d} (d must be squarefree and not 0 or 1)")));
        }
        if d.abs() > MAX_QUADRATIC_D {
            return Err(Error::InvalidField(format!("quad:{d} (|d| too large)")));
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        let conductor = disc.unsigned_abs();
        let primes = arith::prime_divisors(conductor);
        Ok(Self::build(FieldKind::Quadratic { d }, 2, BigInt::from(disc), primes, conductor))
    }

    /// Q(zeta_m). `m = 2 (mod 4)` is replaced by `m/2`; `m <= 2` gives Q.
    pub fn cyclotomic(m: u64) -> Result<Self, Error> {
        if m < 1 {
            return Err(Error::InvalidField(format!("cyclo:{m} (m must be >= 1)")));
        }
        let m = if m % 4 == 2 { m / 2 } else { m };
        if m == 1 {
            return Ok(Self::rational());
        }
        let phi = euler_phi(m);
        let factors = factorize(m);
        // disc(Q(zeta_m)) = (-1)^{phi/2} m^phi / prod_{p | m} p^{phi/(p-1)}
        let mut disc = BigInt::from(1);
        for &(p, e) in &factors {
            let exp = phi * e as u64 - phi / (p - 1);
            disc *= BigInt::from(p).pow(exp as u32);
        }
        if (phi / 2) % 2 == 1 {
            disc = -disc;
        }
        let primes = factors.iter().map(|&(p, _)| p).collect();
        Ok(Self::build(FieldKind::Cyclotomic { m }, phi, disc, primes, m))
    }

    fn build(kind: FieldKind, degree: u64, discriminant: BigInt, disc_primes: Vec<u64>, conductor: u64) -> Self {
        let phi_conductor = euler_phi(conductor);
        Self {
            kind,
            degree,
            discriminant,
            disc_primes,
            conductor,
            phi_conductor,
            phi_conductor_primes: arith::prime_divisors(phi_conductor),
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// The quadratic discriminant as a machine integer. `None` for other fields.
    pub fn quadratic_discriminant(&self) -> Option<i64> {
        match self.kind {
            FieldKind::Quadratic { d } => Some(if d.rem_euclid(4) == 1 { d } else { 4 * d }),
            _ => None,
        }
    }

    /// Smallest `f` with K inside Q(zeta_f).
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Primes dividing the discriminant (equivalently, the conductor).
    pub fn ramified_primes(&self) -> &[u64] {
        &self.disc_primes
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.disc_primes.contains(&p)
    }

    /// Splitting type of the rational prime `p`. The caller guarantees `p` is prime.
    pub fn split_type(&self, p: u64) -> SplitData {
        match self.kind {
            FieldKind::Rational => SplitData { e: 1, f: 1, g: 1 },
            FieldKind::Quadratic { .. } => {
                let disc = self.quadratic_discriminant().expect("quadratic");
                if self.is_ramified(p) {
                    return SplitData { e: 2, f: 1, g: 1 };
                }
                match kronecker(disc, p as i64) {
                    1 => SplitData { e: 1, f: 1, g: 2 },
                    _ => SplitData { e: 1, f: 2, g: 1 },
                }
            }
            FieldKind::Cyclotomic { m } => {
                let (pa, rest) = split_off_prime(m, p);
                let e = if pa == 1 { 1 } else { pa / p * (p - 1) };
                let f = if pa == 1 {
                    arith::order_with_phi(p, m, self.phi_conductor, &self.phi_conductor_primes)
                        .expect("p does not divide m")
                } else {
                    arith::multiplicative_order(p, rest).expect("p does not divide m'")
                };
                let g = euler_phi(rest) / f;
                SplitData { e, f, g }
            }
        }
    }

    /// Short name used on the command line, e.g. `quad:-1`.
    pub fn label(&self) -> String {
        self.to_string()
    }

    pub fn variant_name(&self) -> &'static str {
        match self.kind {
            FieldKind::Rational => "rational",
            FieldKind::Quadratic { .. } => "quadratic",
            FieldKind::Cyclotomic { .. } => "cyclotomic",
        }
    }

    /// `d` for quadratic fields, `m` for cyclotomic fields, `None` for Q.
    pub fn parameter(&self) -> Option<i64> {
        match self.kind {
            FieldKind::Rational => None,
            FieldKind::Quadratic { d } => Some(d),
            FieldKind::Cyclotomic { m } => Some(m as i64),
        }
    }
}

/// Writes `m = p^a * rest` with `p` not dividing `rest`; returns `(p^a, rest)`.
fn split_off_prime(mut m: u64, p: u64) -> (u64, u64) {
    let mut pa = 1;
    while m.is_multiple_of(p) {
        m /= p;
        pa *= p;
    }
    (pa, m)
}

/// Parses `Q`, `quad:<d>` or `cyclo:<m>`.
pub fn parse_field(text: &str) -> Result<FieldSpec, Error> {
    if text == "Q" {
        return Ok(FieldSpec::rational());
    }
    let bad = || Error::InvalidField(format!("{text:?} (expected Q, quad:<d> or cyclo:<m>)"));
    let (head, arg) = text.split_once(':').ok_or_else(bad)?;
    if arg.is_empty() || arg.chars().any(|c| c.is_whitespace()) {
        return Err(bad());
    }
    match head {
        "quad" => {
            let d: i64 = arg
                .parse()
                .map_err(|_| Error::InvalidField(format!("{arg:?} in {text:?} is not an integer")))?;
            FieldSpec::quadratic(d)
        }
        "cyclo" => {
            let m: i64 = arg
                .parse()
                .map_err(|_| Error::InvalidField(format!("{arg:?} in {text:?} is not an integer")))?;
            if m < 1 {
                return Err(Error::InvalidField(format!("cyclo:{m} (m must be >= 1)")));
            }
            FieldSpec::cyclotomic(m as u64)
        }
        _ => Err(bad()),
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_field(s)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Rational => write!(f, "Q"),
            FieldKind::Quadratic { d } => write!(f, "quad:{d}"),
            FieldKind::Cyclotomic { m } => write!(f, "cyclo:{m}"),
        }
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FieldSpec", 5)?;
        s.serialize_field("variant", self.variant_name())?;
        s.serialize_field("parameter", &self.parameter())?;
        s.serialize_field("degree", &self.degree)?;
        // discriminants of large cyclotomic fields overflow i64; those are written as strings
        match i64::try_from(&self.discriminant) {
            Ok(d) => s.serialize_field("discriminant", &d)?,
            Err(_) => s.serialize_field("discriminant", &self.discriminant.to_string())?,
        }
        s.serialize_field("conductor", &self.conductor)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;

    fn primes(limit: u64) -> impl Iterator<Item = u64> {
        (2..=limit).filter(|&p| is_prime(p))
    }

    fn split(field: &str, p: u64) -> (u64, u64, u64) {
        let s = parse_field(field).unwrap().split_type(p);
        (s.e, s.f, s.g)
    }

    #[test]
    fn parse_examples() {
        let q = parse_field("Q").unwrap();
        assert_eq!((q.degree(), q.discriminant().clone(), q.conductor()), (1, BigInt::from(1), 1));

        let k = parse_field("quad:-1").unwrap();
        assert_eq!(k.kind(), FieldKind::Quadratic { d: -1 });
        assert_eq!((k.degree(), k.discriminant().clone(), k.conductor()), (2, BigInt::from(-4), 4));

        let k = parse_field("cyclo:10").unwrap();
        assert_eq!(k.kind(), FieldKind::Cyclotomic { m: 5 });
        assert_eq!(k.degree(), 4);
        assert_eq!(k.discriminant(), &BigInt::from(125));

        assert_eq!(parse_field("quad:5").unwrap().discriminant(), &BigInt::from(5));
        assert_eq!(parse_field("quad:7").unwrap().conductor(), 28);
        assert_eq!(parse_field("cyclo:4").unwrap().discriminant(), &BigInt::from(-4));
        assert_eq!(parse_field("cyclo:3").unwrap().discriminant(), &BigInt::from(-3));
        assert_eq!(parse_field("cyclo:8").unwrap().discriminant(), &BigInt::from(256));
        assert_eq!(parse_field("cyclo:1").unwrap().kind(), FieldKind::Rational);
        assert_eq!(parse_field("cyclo:2").unwrap().kind(), FieldKind::Rational);
        assert_eq!(parse_field("cyclo:6").unwrap().kind(), FieldKind::Cyclotomic { m: 3 });
    }

    #[test]
    fn parse_errors_name_the_token() {
        for (text, token) in [
            ("quad:4", "quad:4"),
            ("quad:0", "quad:0"),
            ("quad:1", "quad:1"),
            ("quad:-12", "quad:-12"),
            ("quad:x", "\"x\""),
            ("cyclo:0", "cyclo:0"),
            ("cyclo:-3", "cyclo:-3"),
            ("cubic:3", "cubic:3"),
            ("q", "\"q\""),
            ("quad: 5", "quad: 5"),
            ("", "\"\""),
        ] {
            let err = parse_field(text).unwrap_err().to_string();
            assert!(err.contains(token), "{text}: {err}");
        }
    }

    #[test]
    fn split_examples() {
        assert_eq!(split("Q", 7), (1, 1, 1));
        assert_eq!(split("quad:-1", 5), (1, 1, 2));
        assert_eq!(split("quad:-1", 3), (1, 2, 1));
        assert_eq!(split("quad:-1", 2), (2, 1, 1));
        assert_eq!(split("cyclo:5", 2), (1, 4, 1));
        assert_eq!(split("cyclo:5", 11), (1, 1, 4));
        assert_eq!(split("cyclo:5", 5), (4, 1, 1));
        assert_eq!(split("cyclo:12", 2), (2, 2, 1));
        assert_eq!(split("cyclo:12", 3), (2, 2, 1));
    }

    #[test]
    fn efg_product_and_ramification() {
        for label in ["Q", "quad:-1", "quad:5", "quad:-3", "quad:7", "quad:-15", "cyclo:5", "cyclo:12", "cyclo:15", "cyclo:16"] {
            let k = parse_field(label).unwrap();
            for p in primes(10_000) {
                let s = k.split_type(p);
                assert_eq!(s.e * s.f * s.g, k.degree(), "{label} p={p}");
                let divides = (k.discriminant() % BigInt::from(p)) == BigInt::from(0);
                assert_eq!(s.e > 1, divides, "{label} p={p}");
            }
        }
    }

    #[test]
    fn quadratic_matches_root_count() {
        for d in [-1i64, 5, -3, 7, -5, 2, -2, 3, 13, -7] {
            let k = FieldSpec::quadratic(d).unwrap();
            let disc = k.quadratic_discriminant().unwrap();
            for p in primes(1000).filter(|p| *p > 2 && disc % *p as i64 != 0) {
                let dm = d.rem_euclid(p as i64) as u64;
                let roots = (0..p).filter(|y| (y * y) % p == dm).count();
                let s = k.split_type(p);
                let expect = if roots == 2 { (1, 1, 2) } else { (1, 2, 1) };
                assert_eq!((s.e, s.f, s.g), expect, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn cyclotomic_residue_degree_matches_brute_force() {
        for m in [3u64, 4, 5, 7, 8, 9, 12, 15, 16, 20, 21] {
            let k = FieldSpec::cyclotomic(m).unwrap();
            for p in primes(1000).filter(|p| m % p != 0) {
                let mut k_min = 1;
                let mut acc = p % m;
                while acc != 1 % m {
                    acc = acc * p % m;
                    k_min += 1;
                }
                assert_eq!(k.split_type(p).f, k_min, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn serializes_descriptor() {
        let v = serde_json::to_value(parse_field("quad:-1").unwrap()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"variant":"quadratic","parameter":-1,"degree":2,"discriminant":-4,"conductor":4})
        );
        let big = serde_json::to_value(parse_field("cyclo:101").unwrap()).unwrap();
        assert!(big["discriminant"].is_string());
    }
}
