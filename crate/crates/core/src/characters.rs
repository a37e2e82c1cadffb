//! Dirichlet characters modulo q.
//!
//! `(Z/qZ)*` is decomposed by CRT into cyclic components, one per odd prime
//! power (generated by its smallest primitive root) and zero, one or two
//! for the power of 2 (`-1` and `5`). A character is an exponent vector
//! against those generators. Values are kept as exact rational rotations
//! `exp(2 pi i num/den)`; they are turned into floating-point complex
//! numbers only when summed.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{crt_pair, euler_phi, factorize, gcd, lcm, smallest_primitive_root};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ComponentKind {
    /// Cyclic group of an odd prime power.
    Odd,
    /// The `-1` factor of `(Z/2^a)*`, `a >= 2`.
    TwoSign,
    /// The `5` factor of `(Z/2^a)*`, `a >= 3`.
    TwoFive,
}

/// One cyclic factor of the unit group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Generator as a residue mod q (1 modulo the other prime powers).
    pub generator: u64,
    pub order: u64,
    pub prime: u64,
    /// The prime power of q this component lives in.
    pub prime_power: u64,
    kind: ComponentKind,
}

/// Structure of `(Z/qZ)*` with a discrete-log table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroupModQ {
    q: u64,
    components: Vec<Component>,
    total_order: u64,
    exponent: u64,
    // dlog[r * ncomp + i]: exponent of component i in residue r; unused when r is not a unit
    dlog: Vec<u32>,
    unit: Vec<bool>,
}

impl UnitGroupModQ {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1, "modulus must be positive");
        let q_usize = usize::try_from(q).expect("modulus fits in memory");
        let mut components = Vec::new();
        // per prime power: (modulus, local log table, number of components it owns)
        let mut locals: Vec<(u64, Vec<[u32; 2]>, usize)> = Vec::new();

        for (p, a) in factorize(q) {
            let pp = p.pow(a);
            let rest = q / pp;
            let lift = |g_local: u64| crt_pair(g_local, pp, 1 % rest, rest);
            let mut table = vec![[0u32; 2]; pp as usize];
            if p == 2 {
                match a {
                    1 => continue,
                    2 => {
                        table[1] = [0, 0];
                        table[3] = [1, 0];
                        components.push(Component { generator: lift(3), order: 2, prime: 2, prime_power: 4, kind: ComponentKind::TwoSign });
                        locals.push((pp, table, 1));
                    }
                    _ => {
                        let half = pp / 4;
                        let mut five = 1u64;
                        for t in 0..half {
                            table[five as usize] = [0, t as u32];
                            table[(pp - five) as usize] = [1, t as u32];
                            five = five * 5 % pp;
                        }
                        components.push(Component { generator: lift(pp - 1), order: 2, prime: 2, prime_power: pp, kind: ComponentKind::TwoSign });
                        components.push(Component { generator: lift(5), order: half, prime: 2, prime_power: pp, kind: ComponentKind::TwoFive });
                        locals.push((pp, table, 2));
                    }
                }
            } else {
                let g = smallest_primitive_root(p, pp);
                let order = pp / p * (p - 1);
                let mut v = 1u64;
                for t in 0..order {
                    table[v as usize] = [t as u32, 0];
                    v = v * g % pp;
                }
                components.push(Component { generator: lift(g), order, prime: p, prime_power: pp, kind: ComponentKind::Odd });
                locals.push((pp, table, 1));
            }
        }

        let ncomp = components.len();
        let mut dlog = vec![0u32; q_usize * ncomp];
        let mut unit = vec![false; q_usize];
        for r in 0..q {
            if gcd(r, q) != 1 {
                continue;
            }
            unit[r as usize] = true;
            let mut slot = r as usize * ncomp;
            for (pp, table, owned) in &locals {
                let entry = table[(r % pp) as usize];
                dlog[slot..slot + owned].copy_from_slice(&entry[..*owned]);
                slot += owned;
            }
        }
        let exponent = components.iter().fold(1, |acc, c| lcm(acc, c.order));
        let total_order = components.iter().map(|c| c.order).product();
        debug_assert_eq!(total_order, euler_phi(q));
        Self { q, components, total_order, exponent, dlog, unit }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `phi(q)`.
    pub fn total_order(&self) -> u64 {
        self.total_order
    }

    /// Exponent of the group (lcm of component orders).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_unit(&self, n: u64) -> bool {
        self.unit[(n % self.q) as usize]
    }

    /// Exponent vector of `n` against the generators, or `None` if `n` is not a unit.
    pub fn discrete_log(&self, n: u64) -> Option<&[u32]> {
        let r = (n % self.q) as usize;
        let k = self.components.len();
        self.unit[r].then(|| &self.dlog[r * k..(r + 1) * k])
    }

    /// The units mod q in ascending order (`[0]` for q = 1).
    pub fn units(&self) -> Vec<u64> {
        (0..self.q).filter(|&r| self.unit[r as usize]).collect()
    }
}

/// `exp(2 pi i num/den)` in lowest terms, `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rotation {
    num: u64,
    den: u64,
}

impl Rotation {
    pub const ONE: Rotation = Rotation { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let num = num % den;
        let g = gcd(num, den).max(1);
        Self { num: num / g, den: den / g }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    /// The order of this root of unity.
    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_complex(self) -> Complex64 {
        let (s, c) = (std::f64::consts::TAU * self.num as f64 / self.den as f64).sin_cos();
        Complex64::new(c, s)
    }

    pub fn conj(self) -> Self {
        Self::new(self.den - self.num, self.den)
    }
}

impl std::ops::Mul for Rotation {
    type Output = Rotation;

    fn mul(self, other: Self) -> Self {
        let den = lcm(self.den, other.den);
        Self::new(self.num * (den / self.den) + other.num * (den / other.den), den)
    }
}

/// A character value: zero, or a root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharValue {
    Zero,
    Root(Rotation),
}

impl CharValue {
    pub fn to_complex(self) -> Complex64 {
        match self {
            CharValue::Zero => Complex64::new(0.0, 0.0),
            CharValue::Root(r) => r.to_complex(),
        }
    }
}

/// A Dirichlet character mod q, as an exponent vector.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroupModQ>,
    exponents: Vec<u64>,
    conductor: u64,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("q", &self.q())
            .field("exponents", &self.exponents)
            .field("conductor", &self.conductor)
            .finish()
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.q() == other.q() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

/// External reference to a character: modulus and exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterRef {
    pub q: u64,
    pub exponents: Vec<u64>,
}

impl DirichletCharacter {
    /// The character with the given exponents (each reduced mod its component order).
    pub fn from_exponents(group: Arc<UnitGroupModQ>, exponents: &[u64]) -> Self {
        assert_eq!(exponents.len(), group.components.len(), "one exponent per component");
        let exponents: Vec<u64> = exponents
            .iter()
            .zip(&group.components)
            .map(|(e, c)| e % c.order)
            .collect();
        let conductor = conductor_of(&group, &exponents);
        Self { group, exponents, conductor }
    }

    pub fn trivial(group: Arc<UnitGroupModQ>) -> Self {
        let n = group.components.len();
        Self::from_exponents(group, &vec![0; n])
    }

    pub fn q(&self) -> u64 {
        self.group.q
    }

    pub fn group(&self) -> &Arc<UnitGroupModQ> {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.q()
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn reference(&self) -> CharacterRef {
        CharacterRef { q: self.q(), exponents: self.exponents.clone() }
    }

    /// Position of this character in [`enumerate_characters`] order.
    pub fn index(&self) -> usize {
        self.exponents
            .iter()
            .zip(&self.group.components)
            .fold(0u64, |acc, (e, c)| acc * c.order + e) as usize
    }

    /// Value numerator over the group exponent `L`: `chi(n) = exp(2 pi i k/L)`.
    #[inline]
    pub fn numerator(&self, n: u64) -> Option<u64> {
        let logs = self.group.discrete_log(n)?;
        let l = self.group.exponent;
        let mut k = 0u64;
        for ((&d, &e), c) in logs.iter().zip(&self.exponents).zip(&self.group.components) {
            k = (k + (d as u64 * e % c.order) * (l / c.order)) % l;
        }
        Some(k)
    }

    pub fn value(&self, n: u64) -> CharValue {
        match self.numerator(n) {
            Some(k) => CharValue::Root(Rotation::new(k, self.group.exponent)),
            None => CharValue::Zero,
        }
    }

    /// Value numerators over `L` for every residue `0..q`.
    pub fn numerator_table(&self) -> Vec<Option<u64>> {
        (0..self.q()).map(|r| self.numerator(r)).collect()
    }

    /// Product with another character of the same modulus.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.q(), other.q());
        let exps: Vec<u64> = self.exponents.iter().zip(&other.exponents).map(|(a, b)| a + b).collect();
        Self::from_exponents(self.group.clone(), &exps)
    }

    pub fn conj(&self) -> Self {
        let exps: Vec<u64> = self
            .exponents
            .iter()
            .zip(&self.group.components)
            .map(|(e, c)| (c.order - e) % c.order)
            .collect();
        Self::from_exponents(self.group.clone(), &exps)
    }

    /// The primitive character inducing this one, modulo the conductor.
    pub fn primitive_part(&self) -> DirichletCharacter {
        if self.is_primitive() {
            return self.clone();
        }
        let f = self.conductor;
        let small = Arc::new(UnitGroupModQ::new(f));
        let q = self.q();
        let exps: Vec<u64> = small
            .components
            .iter()
            .map(|c| {
                // a unit mod q reducing to the generator mod f
                let lifted = (0..)
                    .map(|t| c.generator + f * t)
                    .find(|&n| gcd(n, q) == 1)
                    .expect("every unit mod f lifts to a unit mod q");
                let r = Rotation::new(self.numerator(lifted).expect("unit"), self.group.exponent);
                debug_assert_eq!(c.order % r.den, 0);
                r.num * (c.order / r.den)
            })
            .collect();
        let prim = DirichletCharacter::from_exponents(small, &exps);
        debug_assert!(prim.is_primitive());
        prim
    }
}

/// Conductor from the component exponents, prime by prime.
fn conductor_of(group: &UnitGroupModQ, exps: &[u64]) -> u64 {
    let mut cond = 1u64;
    let comps = &group.components;
    let mut i = 0;
    while i < comps.len() {
        let c = &comps[i];
        match c.kind {
            ComponentKind::Odd => {
                let e = exps[i];
                if e != 0 {
                    // kernel of reduction mod p^b is generated by g^{phi(p^b)}
                    let mut pb = c.prime;
                    while !(e as u128 * euler_phi(pb) as u128).is_multiple_of(c.order as u128) {
                        pb *= c.prime;
                    }
                    cond *= pb;
                }
                i += 1;
            }
            ComponentKind::TwoSign if c.prime_power == 4 => {
                if exps[i] != 0 {
                    cond *= 4;
                }
                i += 1;
            }
            ComponentKind::TwoSign => {
                let (sign, five) = (exps[i], exps[i + 1]);
                let order5 = comps[i + 1].order;
                if five != 0 {
                    // kernel mod 2^b (b >= 3) is generated by 5^{2^{b-2}}
                    let mut step = 2u64;
                    let mut pb = 8u64;
                    while !(five * step).is_multiple_of(order5) {
                        step *= 2;
                        pb *= 2;
                    }
                    cond *= pb;
                } else if sign != 0 {
                    cond *= 4;
                }
                i += 2;
            }
            ComponentKind::TwoFive => unreachable!("paired with its sign component"),
        }
    }
    cond
}

pub fn unit_group(q: u64) -> UnitGroupModQ {
    UnitGroupModQ::new(q)
}

/// All `phi(q)` characters of an existing group; index 0 is trivial.
pub fn characters_of(group: &Arc<UnitGroupModQ>) -> Vec<DirichletCharacter> {
    let orders: Vec<u64> = group.components.iter().map(|c| c.order).collect();
    let mut out = Vec::with_capacity(group.total_order as usize);
    let mut exps = vec![0u64; orders.len()];
    loop {
        out.push(DirichletCharacter::from_exponents(group.clone(), &exps));
        // odometer, last component fastest
        let mut i = orders.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// All `phi(q)` characters mod q; index 0 is the trivial character.
pub fn enumerate_characters(q: u64) -> Vec<DirichletCharacter> {
    characters_of(&Arc::new(UnitGroupModQ::new(q)))
}

pub fn char_value(chi: &DirichletCharacter, n: u64) -> CharValue {
    chi.value(n)
}

pub fn conductor(chi: &DirichletCharacter) -> u64 {
    chi.conductor()
}

pub fn primitive_part(chi: &DirichletCharacter) -> DirichletCharacter {
    chi.primitive_part()
}

/// Cached `exp(2 pi i k/L)` for `k < L`.
#[derive(Debug, Clone)]
pub struct RootTable {
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(l: u64) -> Self {
        Self { roots: (0..l).map(|k| Rotation::new(k, l).to_complex()).collect() }
    }

    pub fn for_group(group: &UnitGroupModQ) -> Self {
        Self::new(group.exponent)
    }

    #[inline]
    pub fn get(&self, k: u64) -> Complex64 {
        self.roots[k as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::mobius;

    /// Least d | q such that chi is 1 on every unit n = 1 (mod d).
    fn brute_conductor(chi: &DirichletCharacter) -> u64 {
        let q = chi.q();
        (1..=q)
            .filter(|d| q.is_multiple_of(*d))
            .find(|&d| {
                (0..q)
                    .filter(|&n| gcd(n, q) == 1 && n % d == 1 % d)
                    .all(|n| chi.value(n) == CharValue::Root(Rotation::ONE))
            })
            .unwrap()
    }

    #[test]
    fn unit_group_examples() {
        let g = unit_group(1);
        assert!(g.components().is_empty());
        assert_eq!(g.total_order(), 1);
        assert!(unit_group(2).components().is_empty());

        let g = unit_group(5);
        assert_eq!(g.components().len(), 1);
        assert_eq!((g.components()[0].generator, g.components()[0].order), (2, 4));

        let g = unit_group(12);
        let orders: Vec<u64> = g.components().iter().map(|c| c.order).collect();
        assert_eq!(orders, vec![2, 2]);
        assert_eq!(g.total_order(), 4);

        let g = unit_group(32);
        let orders: Vec<u64> = g.components().iter().map(|c| c.order).collect();
        assert_eq!(orders, vec![2, 8]);
    }

    #[test]
    fn discrete_logs_are_unique() {
        for q in 1..=300u64 {
            let g = unit_group(q);
            let mut seen = std::collections::HashSet::new();
            for n in g.units() {
                let logs = g.discrete_log(n).unwrap().to_vec();
                // reconstruct n from the generators
                let rebuilt = logs
                    .iter()
                    .zip(g.components())
                    .fold(1 % q, |acc, (&d, c)| acc * crate::arith::pow_mod(c.generator, d as u64, q) % q);
                assert_eq!(rebuilt, n % q, "q={q} n={n}");
                assert!(seen.insert(logs));
            }
            assert_eq!(seen.len() as u64, euler_phi(q));
        }
    }

    #[test]
    fn enumeration_examples() {
        let chars = enumerate_characters(1);
        assert_eq!(chars.len(), 1);
        assert!(chars[0].is_trivial());

        let chars = enumerate_characters(5);
        assert_eq!(chars.len(), 4);
        assert_eq!(chars[0].conductor(), 1);
        assert_eq!(chars.iter().filter(|c| c.is_primitive()).count(), 3);

        let mut conds: Vec<u64> = enumerate_characters(8).iter().map(|c| c.conductor()).collect();
        conds.sort_unstable();
        assert_eq!(conds, vec![1, 4, 8, 8]);

        for (i, c) in enumerate_characters(60).iter().enumerate() {
            assert_eq!(c.index(), i);
        }
    }

    #[test]
    fn value_examples() {
        let chars = enumerate_characters(7);
        assert_eq!(chars[0].value(3), CharValue::Root(Rotation::ONE));
        let mod4 = enumerate_characters(4);
        assert_eq!(mod4[1].value(3), CharValue::Root(Rotation::new(1, 2)));
        assert!((mod4[1].value(3).to_complex() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        for chi in enumerate_characters(6) {
            assert_eq!(chi.value(3), CharValue::Zero);
        }
    }

    #[test]
    fn conductor_examples() {
        assert_eq!(enumerate_characters(4)[1].conductor(), 4);
        // mod 12: trivial on {1, 7}, -1 on {5, 11}
        let chi = enumerate_characters(12)
            .into_iter()
            .find(|c| {
                let one = CharValue::Root(Rotation::ONE);
                let minus = CharValue::Root(Rotation::new(1, 2));
                c.value(7) == one && c.value(5) == minus && c.value(11) == minus
            })
            .unwrap();
        assert_eq!(chi.conductor(), 3);
        let prim = chi.primitive_part();
        assert_eq!(prim.q(), 3);
        assert!(!prim.is_trivial());
        for n in [1u64, 5, 7, 11] {
            assert_eq!(prim.value(n), chi.value(n));
        }

        let trivial = enumerate_characters(12).remove(0).primitive_part();
        assert_eq!(trivial.q(), 1);
        let p = enumerate_characters(5)[1].clone();
        assert_eq!(p.primitive_part(), p);
    }

    #[test]
    fn conductor_matches_brute_force() {
        for q in 1..=200u64 {
            for chi in enumerate_characters(q) {
                assert_eq!(chi.conductor(), brute_conductor(&chi), "q={q} {:?}", chi.exponents());
            }
        }
    }

    #[test]
    fn primitive_parts_agree_exactly() {
        for q in 1..=100u64 {
            for chi in enumerate_characters(q) {
                let prim = chi.primitive_part();
                assert_eq!(prim.q(), chi.conductor());
                assert!(prim.is_primitive());
                for n in (0..q).filter(|&n| gcd(n, q) == 1) {
                    assert_eq!(chi.value(n), prim.value(n), "q={q} n={n}");
                }
            }
        }
    }

    #[test]
    fn primitive_counts() {
        for q in 1..=300u64 {
            let expect: i64 = (1..=q)
                .filter(|d| q % d == 0)
                .map(|d| mobius(q / d) * euler_phi(d) as i64)
                .sum();
            let got = enumerate_characters(q).iter().filter(|c| c.is_primitive()).count() as i64;
            assert_eq!(got, expect, "q={q}");
        }
    }

    #[test]
    fn orthogonality() {
        for q in 1..=100u64 {
            let chars = enumerate_characters(q);
            let phi = euler_phi(q) as f64;
            let vals: Vec<Vec<Complex64>> = chars
                .iter()
                .map(|c| (0..q).map(|a| c.value(a).to_complex()).collect())
                .collect();
            for (i, u) in vals.iter().enumerate() {
                for (j, v) in vals.iter().enumerate() {
                    let s: Complex64 = u.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
                    let expect = if i == j { phi } else { 0.0 };
                    assert!((s - expect).norm() < 1e-12 * phi.max(1.0), "q={q} {i} {j} {s}");
                }
            }
        }
    }

    #[test]
    fn value_orders_divide_group_exponent() {
        for q in 1..=120u64 {
            let g = Arc::new(unit_group(q));
            for chi in characters_of(&g) {
                for n in g.units() {
                    if let CharValue::Root(r) = chi.value(n) {
                        assert_eq!(g.exponent() % r.den(), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicativity() {
        for q in [12u64, 15, 16, 45, 63] {
            for chi in enumerate_characters(q) {
                for m in 1..q {
                    for n in 1..q {
                        let lhs = chi.value(m * n);
                        let rhs = match (chi.value(m), chi.value(n)) {
                            (CharValue::Root(a), CharValue::Root(b)) => CharValue::Root(a * b),
                            _ => CharValue::Zero,
                        };
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn group_operations() {
        let chars = enumerate_characters(15);
        for a in &chars {
            assert!(a.mul(&a.conj()).is_trivial());
            for b in &chars {
                let ab = a.mul(b);
                for n in [1u64, 2, 4, 7, 8, 11, 13, 14] {
                    let (CharValue::Root(x), CharValue::Root(y)) = (a.value(n), b.value(n)) else { panic!() };
                    assert_eq!(ab.value(n), CharValue::Root(x * y));
                }
            }
        }
    }
}
