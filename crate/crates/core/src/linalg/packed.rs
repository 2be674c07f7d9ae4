//! Bitsliced rows over F_3 for rank computations on wide matrices.
//!
//! Each row is stored as two bit planes: `one` marks entries equal to 1 and
//! `two` marks entries equal to 2. Addition of whole words then costs a
//! handful of boolean operations.

/// A growing list of F_3 rows of fixed width, reduced in place by `rank`.
#[derive(Clone, Debug)]
pub struct PackedF3Rows {
    cols: usize,
    words: usize,
    // row r occupies data[2*r*words .. 2*(r+1)*words]: `one` plane then `two` plane
    data: Vec<u64>,
}

#[inline]
fn add_words(xo: u64, xt: u64, yo: u64, yt: u64) -> (u64, u64) {
    let zx = !(xo | xt);
    let zy = !(yo | yt);
    let one = (zx & yo) | (xo & zy) | (xt & yt);
    let two = (zx & yt) | (xt & zy) | (xo & yo);
    (one, two)
}

impl PackedF3Rows {
    pub fn new(cols: usize) -> Self {
        PackedF3Rows {
            cols,
            words: cols.div_ceil(64).max(1),
            data: Vec::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len() / (2 * self.words)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Appends a row given as `(column, value)` pairs; repeated columns accumulate.
    pub fn push_sparse(&mut self, entries: &[(usize, i64)]) {
        let base = self.data.len();
        self.data.resize(base + 2 * self.words, 0);
        for &(c, v) in entries {
            assert!(c < self.cols, "column {c} out of range");
            let cur = self.get_at(base, c);
            let nv = (cur as i64 + v).rem_euclid(3) as u8;
            self.set_at(base, c, nv);
        }
    }

    pub fn push_dense(&mut self, row: &[u8]) {
        assert_eq!(row.len(), self.cols);
        let base = self.data.len();
        self.data.resize(base + 2 * self.words, 0);
        for (c, &v) in row.iter().enumerate() {
            self.set_at(base, c, v % 3);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.get_at(2 * r * self.words, c)
    }

    fn get_at(&self, base: usize, c: usize) -> u8 {
        let (w, b) = (c / 64, c % 64);
        let one = (self.data[base + w] >> b) & 1;
        let two = (self.data[base + self.words + w] >> b) & 1;
        (one + 2 * two) as u8
    }

    fn set_at(&mut self, base: usize, c: usize, v: u8) {
        let (w, b) = (c / 64, c % 64);
        let mask = 1u64 << b;
        self.data[base + w] &= !mask;
        self.data[base + self.words + w] &= !mask;
        match v {
            1 => self.data[base + w] |= mask,
            2 => self.data[base + self.words + w] |= mask,
            _ => {}
        }
    }

    /// Rank of the stored rows. Consumes the rows (they are eliminated in place).
    pub fn rank(mut self) -> usize {
        let n = self.len();
        let ww = self.words;
        let stride = 2 * ww;
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == n {
                break;
            }
            let (w, bit) = (c / 64, c % 64);
            let has = |data: &[u64], r: usize| {
                ((data[r * stride + w] | data[r * stride + ww + w]) >> bit) & 1 == 1
            };
            let Some(piv) = (rank..n).find(|&r| has(&self.data, r)) else {
                continue;
            };
            if piv != rank {
                for k in 0..stride {
                    self.data.swap(piv * stride + k, rank * stride + k);
                }
            }
            let (head, tail) = self.data.split_at_mut((rank + 1) * stride);
            let pivot = &mut head[rank * stride..];
            if (pivot[ww + w] >> bit) & 1 == 1 {
                // scale by 2 = negate: swap the planes
                for k in w..ww {
                    pivot.swap(k, ww + k);
                }
            }
            let pivot = &*pivot;
            for row in tail.chunks_exact_mut(stride) {
                let one = (row[w] >> bit) & 1 == 1;
                let two = (row[ww + w] >> bit) & 1 == 1;
                if !one && !two {
                    continue;
                }
                // entry 1: subtract pivot (add its negation); entry 2: add pivot
                for k in w..ww {
                    let (po, pt) = if one {
                        (pivot[ww + k], pivot[k])
                    } else {
                        (pivot[k], pivot[ww + k])
                    };
                    let (o, t) = add_words(row[k], row[ww + k], po, pt);
                    row[k] = o;
                    row[ww + k] = t;
                }
            }
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FpMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn word_addition_table() {
        for x in 0..3u64 {
            for y in 0..3u64 {
                let (o, t) = add_words((x == 1) as u64, (x == 2) as u64, (y == 1) as u64, (y == 2) as u64);
                let s = (x + y) % 3;
                assert_eq!((o, t), ((s == 1) as u64, (s == 2) as u64), "{x}+{y}");
            }
        }
    }

    #[test]
    fn sparse_push_accumulates() {
        let mut rows = PackedF3Rows::new(70);
        rows.push_sparse(&[(3, 1), (3, 1), (69, -1), (69, 3)]);
        assert_eq!(rows.get(0, 3), 2);
        assert_eq!(rows.get(0, 69), 2);
        assert_eq!(rows.get(0, 0), 0);
    }

    #[test]
    fn rank_agrees_with_dense_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let r = rng.gen_range(0..12);
            let c = rng.gen_range(1..150);
            let sparsity = rng.gen_range(1..4);
            let rows: Vec<Vec<u8>> = (0..r)
                .map(|_| {
                    (0..c)
                        .map(|_| if rng.gen_range(0..sparsity) == 0 { rng.gen_range(0..3) } else { 0 })
                        .collect()
                })
                .collect();
            // duplicate some rows to force dependencies
            let mut all = rows.clone();
            if r > 1 {
                let combo: Vec<u8> = rows[0].iter().zip(&rows[1]).map(|(a, b)| (a + 2 * b) % 3).collect();
                all.push(combo);
            }
            let mut packed = PackedF3Rows::new(c);
            for row in &all {
                packed.push_dense(row);
            }
            let dense = FpMatrix::from_row_vectors(3, c, &all);
            assert_eq!(packed.rank(), dense.rank());
        }
    }
}
