//! The cubic subfield `L` of `Q(zeta_ell)` in the basis of Gaussian periods
//! `eta_i = sum_{t in g^i C} zeta^t`, where `C` is the subgroup of cubes in
//! `(Z/ell)^*` and `g` a primitive root. The periods are an integral basis
//! and `sigma: eta_i -> eta_{i+1}` generates the Galois group.

use std::f64::consts::PI;
use std::fmt;

use tetra_core::arith::is_prime;

use crate::primes::{primitive_root, shanks_classify, Shanks};
use crate::CubicError;

/// Element of `O_L` as coordinates in the period basis.
pub type Element = [i128; 3];

/// Multiplication table and numerical values of the periods.
#[derive(Clone, Debug)]
pub struct PeriodBasis {
    ell: u64,
    generator: u64,
    /// `class[x]` = i with `x in g^i C`, for `1 <= x < ell`.
    class: Vec<u8>,
    /// `table[i][j]` = coordinates of `eta_i * eta_j`.
    table: [[[i64; 3]; 3]; 3],
    numeric: [f64; 3],
}

impl PeriodBasis {
    pub fn new(ell: u64) -> Result<Self, CubicError> {
        if !is_prime(ell) || ell % 3 != 1 {
            return Err(CubicError::NotOneModThree(ell));
        }
        let g = primitive_root(ell);
        let mut class = vec![0u8; ell as usize];
        let mut x = 1u64;
        for k in 0..ell - 1 {
            class[x as usize] = (k % 3) as u8;
            x = x * g % ell;
        }
        let f = ((ell - 1) / 3) as i64;
        // eta_0 eta_i = sum_{u in g^i C} (eta_{class(1+u)} or f when u = -1)
        let mut base = [[0i64; 3]; 3];
        for u in 1..ell {
            let i = class[u as usize] as usize;
            let s = (u + 1) % ell;
            if s == 0 {
                for c in base[i].iter_mut() {
                    *c -= f;
                }
            } else {
                base[i][class[s as usize] as usize] += 1;
            }
        }
        // eta_j eta_{j+i} = sigma^j (eta_0 eta_i)
        let mut table = [[[0i64; 3]; 3]; 3];
        for j in 0..3 {
            for i in 0..3 {
                for k in 0..3 {
                    table[j][(j + i) % 3][(k + j) % 3] = base[i][k];
                }
            }
        }
        let mut numeric = [0f64; 3];
        for t in 1..ell {
            numeric[class[t as usize] as usize] += (2.0 * PI * t as f64 / ell as f64).cos();
        }
        Ok(PeriodBasis {
            ell,
            generator: g,
            class,
            table,
            numeric,
        })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Coset index of a unit mod ell.
    pub fn class_of(&self, x: u64) -> usize {
        self.class[(x % self.ell) as usize] as usize
    }

    pub fn table(&self) -> &[[[i64; 3]; 3]; 3] {
        &self.table
    }

    pub fn one(&self) -> Element {
        [-1, -1, -1]
    }

    pub fn from_integer(&self, n: i128) -> Element {
        [-n, -n, -n]
    }

    /// The rational integer represented by `a`, if it is one.
    pub fn as_integer(&self, a: &Element) -> Option<i128> {
        (a[0] == a[1] && a[1] == a[2]).then_some(-a[0])
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut out = [0i128; 3];
        for i in 0..3 {
            if a[i] == 0 {
                continue;
            }
            for j in 0..3 {
                if b[j] == 0 {
                    continue;
                }
                let ab = a[i] * b[j];
                for k in 0..3 {
                    out[k] += ab * self.table[i][j][k] as i128;
                }
            }
        }
        out
    }

    pub fn sigma(&self, a: &Element) -> Element {
        [a[2], a[0], a[1]]
    }

    pub fn trace(&self, a: &Element) -> i128 {
        -(a[0] + a[1] + a[2])
    }

    pub fn norm(&self, a: &Element) -> i128 {
        let s1 = self.sigma(a);
        let s2 = self.sigma(&s1);
        let n = self.mul(&self.mul(a, &s1), &s2);
        self.as_integer(&n).expect("norms are rational")
    }

    /// Characteristic polynomial `x^3 + c2 x^2 + c1 x + c0` as `[c2, c1, c0]`.
    pub fn char_poly(&self, a: &Element) -> [i128; 3] {
        let s1 = self.sigma(a);
        let s2 = self.sigma(&s1);
        let e2 = self.add(&self.add(&self.mul(a, &s1), &self.mul(&s1, &s2)), &self.mul(&s2, a));
        [
            -self.trace(a),
            self.as_integer(&e2).expect("symmetric functions are rational"),
            -self.norm(a),
        ]
    }

    /// Value of `a` under the real embedding `eta_i -> eta_{i+k}`.
    pub fn embed(&self, a: &Element, k: usize) -> f64 {
        (0..3).map(|i| a[i] as f64 * self.numeric[(i + k) % 3]).sum()
    }

    pub fn periods(&self) -> [f64; 3] {
        self.numeric
    }

    /// Gram matrix of the trace form `Tr(eta_i eta_j)`.
    pub fn trace_form(&self) -> [[i128; 3]; 3] {
        let mut g = [[0i128; 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let t = self.table[i][j];
                *v = -(t[0] + t[1] + t[2]) as i128;
            }
        }
        g
    }

    /// `log|.|` of `N_{Q(zeta)/L}(1 - zeta)` under the three embeddings.
    pub fn theta_logs(&self) -> [f64; 3] {
        let mut out = [0f64; 3];
        let l = self.ell as f64;
        for t in 1..self.ell {
            out[self.class_of(t)] += (2.0 * (PI * t as f64 / l).sin()).ln();
        }
        out
    }
}

pub fn cubic_discriminant(c: &[i128; 3]) -> i128 {
    let (a, b, c) = (c[0], c[1], c[2]);
    a * a * b * b - 4 * b * b * b - 4 * a * a * a * c - 27 * c * c + 18 * a * b * c
}

fn det3(m: &[[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn isqrt_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Real roots of a monic cubic with three real roots, ascending.
pub fn real_roots(c: &[i128; 3]) -> Option<[f64; 3]> {
    let (a, b, cc) = (c[0] as f64, c[1] as f64, c[2] as f64);
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + cc;
    if p >= 0.0 {
        return None;
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let mut roots = [0f64; 3];
    for (k, r) in roots.iter_mut().enumerate() {
        let mut x = m * (phi - 2.0 * PI * k as f64 / 3.0).cos() - a / 3.0;
        for _ in 0..3 {
            let f = ((x + a) * x + b) * x + cc;
            let df = (3.0 * x + 2.0 * a) * x + b;
            if df != 0.0 {
                x -= f / df;
            }
        }
        *r = x;
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Some(roots)
}

fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let mut a = [[0f64; 4]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&m[i]);
        a[i][3] = rhs[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..4 {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

/// A monic cubic `x^3 + c2 x^2 + c1 x + c0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cubic(pub [i128; 3]);

impl fmt::Display for Cubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^3")?;
        for (c, mono) in self.0.iter().zip(["x^2", "x", ""]) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { '-' } else { '+' };
            let abs = c.unsigned_abs();
            match (abs, mono) {
                (1, m) if !m.is_empty() => write!(f, " {sign} {m}")?,
                (_, "") => write!(f, " {sign} {abs}")?,
                (_, m) => write!(f, " {sign} {abs}*{m}")?,
            }
        }
        Ok(())
    }
}

impl Cubic {
    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        let p = p as i128;
        let x = x as i128;
        let v = ((x + self.0[0]) * x % p + self.0[1]) * x % p + self.0[2];
        v.rem_euclid(p) as u64
    }

    pub fn discriminant(&self) -> i128 {
        cubic_discriminant(&self.0)
    }
}

/// The cubic subfield of `Q(zeta_ell)`.
#[derive(Clone, Debug)]
pub struct CubicField {
    pub ell: u64,
    /// Minimal polynomial of `eta_0`.
    pub poly: Cubic,
    /// Field discriminant, `ell^2`.
    pub disc_field: u128,
    /// `[O_L : Z[eta_0]]`.
    pub index: u64,
    pub shanks: Shanks,
    basis: PeriodBasis,
}

/// Minimal polynomial of the Gaussian period, with its discriminant checks.
pub fn period_polynomial(ell: u64) -> Result<CubicField, CubicError> {
    let basis = PeriodBasis::new(ell)?;
    let eta0: Element = [1, 0, 0];
    let cp = basis.char_poly(&eta0);
    if cp[0] != 1 {
        return Err(CubicError::Check(format!("period trace is {}, expected -1", -cp[0])));
    }
    let poly = Cubic(cp);
    let l2 = (ell as i128) * (ell as i128);
    let basis_disc = det3(&basis.trace_form());
    if basis_disc != l2 {
        return Err(CubicError::Check(format!(
            "period basis has discriminant {basis_disc}, expected {l2}"
        )));
    }
    let disc = poly.discriminant();
    if disc % l2 != 0 {
        return Err(CubicError::Check(format!("disc {disc} is not divisible by ell^2")));
    }
    let index = isqrt_i128(disc / l2)
        .ok_or_else(|| CubicError::Check(format!("disc / ell^2 = {} is not a square", disc / l2)))?;
    if real_roots(&poly.0).is_none() {
        return Err(CubicError::Check("period polynomial is not totally real".into()));
    }
    Ok(CubicField {
        ell,
        poly,
        disc_field: l2 as u128,
        index: index as u64,
        shanks: shanks_classify(ell),
        basis,
    })
}

impl CubicField {
    pub fn basis(&self) -> &PeriodBasis {
        &self.basis
    }

    /// An algebraic integer of `L` with characteristic polynomial `target`,
    /// found by matching real roots against the period embeddings and then
    /// checked exactly. Its existence shows `target` defines `L`.
    pub fn root_of(&self, target: &Cubic) -> Option<Element> {
        let roots = real_roots(&target.0)?;
        let eta = self.basis.periods();
        let m = [
            [eta[0], eta[1], eta[2]],
            [eta[1], eta[2], eta[0]],
            [eta[2], eta[0], eta[1]],
        ];
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let rhs = [roots[perm[0]], roots[perm[1]], roots[perm[2]]];
            let Some(x) = solve3(m, rhs) else { continue };
            if x.iter().any(|v| (v - v.round()).abs() > 1e-6) {
                continue;
            }
            let a: Element = [x[0].round() as i128, x[1].round() as i128, x[2].round() as i128];
            if self.basis.char_poly(&a) == target.0 {
                return Some(a);
            }
        }
        None
    }
}

/// Ramification data `(e, f, g)` of `ell` in `L`, read off from the period
/// polynomial modulo `ell` when `ell` does not divide `[O_L : Z[eta_0]]`.
pub fn factorization_profile(field: &CubicField) -> Result<(u32, u32, u32), CubicError> {
    let ell = field.ell;
    if field.index % ell == 0 {
        return Err(CubicError::Check(format!("ell divides the index {}", field.index)));
    }
    // f = (x - r)^3 mod ell forces 3r = -c2
    let inv3 = tetra_core::arith::pow_mod(3, ell - 2, ell);
    let c2 = field.poly.0[0].rem_euclid(ell as i128) as u64;
    let r = (ell - c2) % ell * inv3 % ell;
    let l = ell as i128;
    let r = r as i128;
    let expected = [(-3 * r).rem_euclid(l), (3 * r * r).rem_euclid(l), (-r * r * r).rem_euclid(l)];
    let actual = field.poly.0.map(|c| c.rem_euclid(l));
    if expected == actual {
        return Ok((3, 1, 1));
    }
    let roots = (0..ell).filter(|&x| field.poly.eval_mod(x, ell) == 0).count();
    Err(CubicError::Check(format!(
        "period polynomial is not a cube of a linear factor mod {ell} ({roots} roots)"
    )))
}
