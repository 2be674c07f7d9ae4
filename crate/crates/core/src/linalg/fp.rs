use std::fmt;

use super::LinalgError;

/// True for primes below 256, the only moduli `FpMatrix` accepts.
pub fn is_small_prime(p: u32) -> bool {
    if !(2..256).contains(&p) {
        return false;
    }
    (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub fn inv_mod(a: u8, p: u8) -> u8 {
    assert!(a % p != 0, "zero has no inverse mod {p}");
    // Fermat: a^(p-2)
    let (p32, mut base, mut e, mut acc) = (p as u32, (a % p) as u32, p as u32 - 2, 1u32);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p32;
        }
        base = base * base % p32;
        e >>= 1;
    }
    acc as u8
}

/// Dense matrix over F_p with entries stored as canonical residues in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u8,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: FpMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl FpMatrix {
    pub fn zeros(p: u8, rows: usize, cols: usize) -> Self {
        assert!(is_small_prime(p as u32), "modulus {p} is not prime");
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod `p`.
    pub fn from_rows<R: AsRef<[i64]>>(p: u32, rows: &[R]) -> Result<Self, LinalgError> {
        if !is_small_prime(p) {
            return Err(LinalgError::BadModulus(p));
        }
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    got: r.len(),
                    expected: cols,
                });
            }
            data.extend(r.iter().map(|&x| x.rem_euclid(p as i64) as u8));
        }
        Ok(FpMatrix {
            p: p as u8,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(p: u8, rows: usize, columns: &[Vec<u8>]) -> Self {
        let mut m = Self::zeros(p, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has wrong length");
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x as i64);
            }
        }
        m
    }

    pub fn from_row_vectors(p: u8, cols: usize, rows: &[Vec<u8>]) -> Self {
        let mut m = Self::zeros(p, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x as i64);
            }
        }
        m
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v.rem_euclid(self.p as i64) as u8;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[u8] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == (i == j) as u8))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.p, other.p, "moduli differ");
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let p = self.p as u32;
        let mut out = Self::zeros(self.p, self.rows, other.cols);
        let mut acc = vec![0u32; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(i, k) as u32;
                if a == 0 {
                    continue;
                }
                for (j, slot) in acc.iter_mut().enumerate() {
                    *slot += a * other.get(k, j) as u32;
                }
                if k % 64 == 63 {
                    acc.iter_mut().for_each(|x| *x %= p);
                }
            }
            for (j, &a) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = (a % p) as u8;
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        let p = self.p as u32;
        (0..self.rows)
            .map(|i| {
                let s: u32 = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u32 * b as u32)
                    .sum();
                (s % p) as u8
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn apply_left(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.rows);
        let p = self.p as u32;
        let mut acc = vec![0u32; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a != 0 {
                for (j, slot) in acc.iter_mut().enumerate() {
                    *slot += a as u32 * self.get(i, j) as u32;
                }
            }
        }
        acc.into_iter().map(|s| (s % p) as u8).collect()
    }

    fn zip_with(&self, other: &FpMatrix, f: impl Fn(u32, u32) -> u32) -> FpMatrix {
        assert_eq!(self.p, other.p, "moduli differ");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shapes differ");
        let p = self.p as u32;
        FpMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| (f(a as u32, b as u32) % p) as u8)
                .collect(),
        }
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &FpMatrix) -> FpMatrix {
        let p = self.p as u32;
        self.zip_with(other, move |a, b| a + p - b)
    }

    pub fn scale(&self, c: i64) -> FpMatrix {
        let p = self.p as u32;
        let c = c.rem_euclid(p as i64) as u32;
        FpMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| (a as u32 * c % p) as u8).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> FpMatrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.p, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Side-by-side concatenation `[self | other]`.
    pub fn hstack(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.p, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            let dst = &mut m.data[i * m.cols..(i + 1) * m.cols];
            dst[..self.cols].copy_from_slice(self.row(i));
            dst[self.cols..].copy_from_slice(other.row(i));
        }
        m
    }

    pub fn vstack(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FpMatrix {
            p: self.p,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &FpMatrix) -> FpMatrix {
        let mut m = Self::zeros(self.p, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[i * m.cols + j] = self.get(i, j);
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.data[(self.rows + i) * m.cols + self.cols + j] = other.get(i, j);
            }
        }
        m
    }

    pub fn rref(&self) -> Rref {
        let p = self.p as u32;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(piv, r);
            let inv = inv_mod(m.get(r, c), self.p) as u32;
            for j in c..m.cols {
                let idx = r * m.cols + j;
                m.data[idx] = (m.data[idx] as u32 * inv % p) as u8;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c) as u32;
                if f == 0 {
                    continue;
                }
                let neg = p - f;
                for j in c..m.cols {
                    let src = m.data[r * m.cols + j] as u32;
                    if src != 0 {
                        let idx = i * m.cols + j;
                        m.data[idx] = ((m.data[idx] as u32 + neg * src) % p) as u8;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: m,
            rank: pivots.len(),
            pivots,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        for j in 0..c {
            self.data.swap(a * c + j, b * c + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the right kernel `{v : self * v = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u8>> {
        let Rref { matrix, pivots, .. } = self.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![0u8; self.cols];
                v[f] = 1;
                for (r, &c) in pivots.iter().enumerate() {
                    let x = matrix.get(r, f);
                    v[c] = if x == 0 { 0 } else { p - x };
                }
                v
            })
            .collect()
    }

    /// Nonzero rows of the RREF: a canonical basis of the row space.
    pub fn row_space_basis(&self) -> Vec<Vec<u8>> {
        let rr = self.rref();
        (0..rr.rank).map(|i| rr.matrix.row(i).to_vec()).collect()
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let rr = self.hstack(&Self::identity(self.p, n)).rref();
        if rr.pivots.iter().take(n).enumerate().any(|(i, &c)| c != i) || rr.rank < n {
            return None;
        }
        let mut inv = Self::zeros(self.p, n, n);
        for i in 0..n {
            inv.data[i * n..(i + 1) * n].copy_from_slice(&rr.matrix.row(i)[n..]);
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn determinant(&self) -> u8 {
        assert!(self.is_square());
        let p = self.p as u32;
        let mut m = self.clone();
        let n = self.rows;
        let mut det = 1u32;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| m.get(i, c) != 0) else {
                return 0;
            };
            if piv != c {
                m.swap_rows(piv, c);
                det = (p - det) % p;
            }
            let d = m.get(c, c);
            det = det * d as u32 % p;
            let inv = inv_mod(d, self.p) as u32;
            for i in c + 1..n {
                let f = m.get(i, c) as u32 * inv % p;
                if f == 0 {
                    continue;
                }
                for j in c..n {
                    let idx = i * n + j;
                    m.data[idx] =
                        ((m.data[idx] as u32 + (p - f) * m.get(c, j) as u32) % p) as u8;
                }
            }
        }
        det as u8
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}[", self.p)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}
