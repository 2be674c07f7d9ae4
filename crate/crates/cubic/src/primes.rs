use tetra_core::arith::{is_prime, primes_up_to};

/// Primes `ell <= max` with `ell = 1 mod 3`, ascending.
pub fn sieve_candidates(max: u64) -> Vec<u64> {
    primes_up_to(max).into_iter().filter(|p| p % 3 == 1).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shanks {
    /// `ell = a^2 + 3a + 9`.
    Shanks(i64),
    NotShanks,
}

impl Shanks {
    pub fn parameter(&self) -> Option<i64> {
        match self {
            Shanks::Shanks(a) => Some(*a),
            Shanks::NotShanks => None,
        }
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Smallest `a >= -1` with `ell = a^2 + 3a + 9`, if any.
pub fn shanks_classify(ell: u64) -> Shanks {
    // a = (-3 + sqrt(4 ell - 27)) / 2
    if ell < 7 {
        return Shanks::NotShanks;
    }
    let d = 4 * ell - 27;
    let s = isqrt(d);
    if s * s != d || s % 2 == 0 {
        return Shanks::NotShanks;
    }
    let a = (s as i64 - 3) / 2;
    debug_assert_eq!(a * a + 3 * a + 9, ell as i64);
    Shanks::Shanks(a)
}

/// Shanks' simplest cubic `x^3 - a x^2 - (a + 3) x - 1` as `[c2, c1, c0]`.
pub fn simplest_cubic(a: i64) -> [i64; 3] {
    [-a, -(a + 3), -1]
}

/// Prime factorization by trial division, ascending.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    assert!(is_prime(p));
    if p == 2 {
        return 1;
    }
    let qs: Vec<u64> = factor(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| qs.iter().all(|&q| tetra_core::arith::pow_mod(g, (p - 1) / q, p) != 1))
        .expect("primes have primitive roots")
}
