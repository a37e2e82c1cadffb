//! Small-integer arithmetic shared by the field, character and Galois modules.
//!
//! Everything here works on machine integers. Moduli are assumed to fit in
//! `u64`; products are formed in `u128` so nothing overflows below 2^64.

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime(n: u64) -> bool {
    match n {
        0 | 1 => false,
        2 | 3 => true,
        _ if n.is_multiple_of(2) || n.is_multiple_of(3) => false,
        _ => {
            let mut p = 5u64;
            while p.saturating_mul(p) <= n {
                if n.is_multiple_of(p) || n.is_multiple_of(p + 2) {
                    return false;
                }
                p += 6;
            }
            true
        }
    }
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Whether `|d|` has no repeated prime factor. Zero is not squarefree.
pub fn is_squarefree(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    factorize(d.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Multiplicative order of `a` modulo `m`, given the prime factors of
/// `phi(m)`. Returns `None` when `gcd(a, m) > 1`.
pub fn order_with_phi(a: u64, m: u64, phi: u64, phi_primes: &[u64]) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd(a % m, m) != 1 {
        return None;
    }
    let mut ord = phi;
    for &r in phi_primes {
        while ord.is_multiple_of(r) && pow_mod(a, ord / r, m) == 1 {
            ord /= r;
        }
    }
    Some(ord)
}

/// Multiplicative order of `a` modulo `m`.
pub fn multiplicative_order(a: u64, m: u64) -> Option<u64> {
    let phi = euler_phi(m);
    order_with_phi(a, m, phi, &prime_divisors(phi))
}

/// Smallest primitive root modulo an odd prime power `p^k`.
pub fn smallest_primitive_root(p: u64, pk: u64) -> u64 {
    debug_assert!(p > 2 && pk.is_multiple_of(p));
    let phi = pk / p * (p - 1);
    let primes = prime_divisors(phi);
    (2..pk)
        .find(|&g| g % p != 0 && primes.iter().all(|&r| pow_mod(g, phi / r, pk) != 1))
        .expect("odd prime powers are cyclic")
}

/// Kronecker symbol `(a / n)` for arbitrary integers.
pub fn kronecker(a: i64, n: i64) -> i32 {
    let mut a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut sign = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    // factor of 2 in n: (a/2) = 0 for even a, else +1 if a = ±1 mod 8, -1 if a = ±3 mod 8
    let mut twos = 0;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
    }
    // Jacobi symbol (a/n) for odd positive n
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Chinese remainder for coprime moduli: the unique `x mod m1*m2` with
/// `x = r1 (mod m1)` and `x = r2 (mod m2)`.
pub fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> u64 {
    let m = m1 as u128 * m2 as u128;
    // m1 * (m1^{-1} mod m2) * (r2 - r1) + r1
    let inv = mod_inverse(m1 % m2, m2).expect("coprime moduli");
    let diff = (r2 as i128 - r1 as i128).rem_euclid(m2 as i128) as u128;
    let t = diff * inv as u128 % m2 as u128;
    ((r1 as u128 + m1 as u128 * t) % m) as u64
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_brute(a: i64, p: i64) -> i32 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        if (1..p).any(|y| (y * y) % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_matches_euler_criterion_for_odd_primes() {
        for p in [3i64, 5, 7, 11, 13, 97, 101] {
            for a in -60..60 {
                assert_eq!(kronecker(a, p), legendre_brute(a, p), "({a}/{p})");
            }
        }
    }

    #[test]
    fn kronecker_at_two_and_negatives() {
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-1, -1), -1);
        assert_eq!(kronecker(3, -1), 1);
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(2, 0), 0);
    }

    #[test]
    fn kronecker_is_multiplicative_in_the_bottom() {
        for a in [-20i64, -7, -4, -3, 5, 8, 12, 13] {
            for m in 1..40i64 {
                for n in 1..40i64 {
                    assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
                }
            }
        }
    }

    #[test]
    fn totient_and_mobius() {
        let phis: Vec<u64> = (1..=12).map(euler_phi).collect();
        assert_eq!(phis, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
    }

    #[test]
    fn orders_and_roots() {
        assert_eq!(multiplicative_order(2, 5), Some(4));
        assert_eq!(multiplicative_order(11, 5), Some(1));
        assert_eq!(multiplicative_order(2, 6), None);
        assert_eq!(smallest_primitive_root(5, 5), 2);
        assert_eq!(smallest_primitive_root(7, 49), 3);
        assert_eq!(smallest_primitive_root(41, 41), 6);
    }

    #[test]
    fn crt_and_inverse() {
        let x = crt_pair(2, 5, 3, 7);
        assert_eq!((x % 5, x % 7), (2, 3));
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(isqrt(99), 9);
        assert_eq!(isqrt(100), 10);
    }

    #[test]
    fn squarefree() {
        assert!(is_squarefree(-1));
        assert!(is_squarefree(30));
        assert!(!is_squarefree(12));
        assert!(!is_squarefree(0));
        assert!(!is_squarefree(-8));
    }
}
