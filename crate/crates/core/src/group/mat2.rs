use std::fmt;

/// 2x2 matrix with entries in Z/3^level.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    level: u32,
    e: [u32; 4],
}

pub fn three_pow(level: u32) -> u32 {
    3u32.pow(level)
}

impl Mat2 {
    /// `[[a, b], [c, d]]` reduced mod 3^level.
    pub fn new(level: u32, a: i64, b: i64, c: i64, d: i64) -> Self {
        assert!((1..=12).contains(&level), "level {level} out of range");
        let m = three_pow(level) as i64;
        Mat2 {
            level,
            e: [a, b, c, d].map(|x| x.rem_euclid(m) as u32),
        }
    }

    pub fn identity(level: u32) -> Self {
        Self::new(level, 1, 0, 0, 1)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> u32 {
        three_pow(self.level)
    }

    /// Row-major entries `[a, b, c, d]`.
    pub fn entries(&self) -> [u32; 4] {
        self.e
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        assert_eq!(self.level, o.level, "levels differ");
        let m = self.modulus() as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        let [w, x, y, z] = o.e.map(|x| x as u64);
        Mat2 {
            level: self.level,
            e: [
                ((a * w + b * y) % m) as u32,
                ((a * x + b * z) % m) as u32,
                ((c * w + d * y) % m) as u32,
                ((c * x + d * z) % m) as u32,
            ],
        }
    }

    pub fn det(&self) -> u32 {
        let m = self.modulus() as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        ((a * d % m + m - b * c % m) % m) as u32
    }

    pub fn trace(&self) -> u32 {
        (self.e[0] + self.e[3]) % self.modulus()
    }

    pub fn neg(&self) -> Mat2 {
        let m = self.modulus();
        Mat2 {
            level: self.level,
            e: self.e.map(|x| (m - x) % m),
        }
    }

    pub fn scale(&self, s: i64) -> Mat2 {
        let [a, b, c, d] = self.e.map(|x| x as i64 * s);
        Mat2::new(self.level, a, b, c, d)
    }

    /// Inverse when the determinant is a unit mod 3.
    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        let inv = inv_mod_3n(det as u64, self.level)?;
        let [a, b, c, d] = self.e.map(|x| x as i64);
        Some(Mat2::new(self.level, d, -b, -c, a).scale(inv as i64))
    }

    pub fn pow(&self, mut e: u64) -> Mat2 {
        let mut base = *self;
        let mut acc = Mat2::identity(self.level);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, other: &Mat2, k: i64) -> Mat2 {
        assert_eq!(self.level, other.level, "levels differ");
        let x = self.e.map(|v| v as i64);
        let y = other.e.map(|v| v as i64);
        Mat2::new(self.level, x[0] + k * y[0], x[1] + k * y[1], x[2] + k * y[2], x[3] + k * y[3])
    }

    pub fn is_identity(&self) -> bool {
        self.e == [1, 0, 0, 1]
    }

    /// Reduction to a lower level.
    pub fn reduce(&self, level: u32) -> Mat2 {
        assert!(level <= self.level);
        let [a, b, c, d] = self.e.map(|x| x as i64);
        Mat2::new(level, a, b, c, d)
    }

    /// Lift of the same integer representatives to a higher level.
    pub fn lift(&self, level: u32) -> Mat2 {
        assert!(level >= self.level);
        let [a, b, c, d] = self.e.map(|x| x as i64);
        Mat2::new(level, a, b, c, d)
    }
}

/// Inverse of `a` modulo 3^level, if `a` is prime to 3.
pub fn inv_mod_3n(a: u64, level: u32) -> Option<u64> {
    let m = three_pow(level) as u64;
    if a % 3 == 0 {
        return None;
    }
    // Euler: a^(phi(m) - 1)
    let phi = m / 3 * 2;
    let (mut base, mut e, mut acc) = (a % m, phi - 1, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    Some(acc)
}

/// Multiplicative order of a matrix with unit determinant.
pub fn element_order(x: &Mat2) -> u64 {
    assert!(x.det() % 3 != 0, "not invertible");
    // |GL(2, Z/3^n)| bounds the order
    let bound = 48 * 3u64.pow(4 * (x.level() - 1));
    let mut acc = *x;
    for k in 1..=bound {
        if acc.is_identity() {
            return k;
        }
        acc = acc.mul(x);
    }
    unreachable!("order exceeds group size")
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.modulus())
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}
