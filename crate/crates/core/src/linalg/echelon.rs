use super::fp::inv_mod;

/// Incrementally built row-echelon basis of a subspace of F_p^n.
///
/// Each stored vector has a leading 1 at its pivot column and zeros in the
/// pivot columns of the vectors stored before it.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u8,
    n: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: u8, n: usize) -> Self {
        Echelon {
            p,
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    /// The stored (reduced) vectors.
    pub fn basis(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Residue of `v` after subtracting its components along the basis.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.n);
        let p = self.p as u32;
        let mut w = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = w[c] as u32;
            if f == 0 {
                continue;
            }
            for (x, &r) in w.iter_mut().zip(row) {
                *x = ((*x as u32 + (p - f) * r as u32) % p) as u8;
            }
        }
        w
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        let mut w = self.reduce(v);
        let Some(c) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p as u32;
        let inv = inv_mod(w[c], self.p) as u32;
        w.iter_mut().for_each(|x| *x = (*x as u32 * inv % p) as u8);
        // keep earlier rows reduced at the new pivot
        for row in &mut self.rows {
            let f = row[c] as u32;
            if f != 0 {
                for (x, &r) in row.iter_mut().zip(&w) {
                    *x = ((*x as u32 + (p - f) * r as u32) % p) as u8;
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(c);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FpMatrix;

    #[test]
    fn incremental_span_matches_rank() {
        let vs = vec![vec![1u8, 2, 0, 1], vec![2, 1, 0, 2], vec![0, 1, 1, 0], vec![1, 0, 1, 1]];
        let mut e = Echelon::new(3, 4);
        let added: Vec<bool> = vs.iter().map(|v| e.insert(v)).collect();
        assert_eq!(added, vec![true, false, true, false]);
        assert_eq!(e.dim(), FpMatrix::from_row_vectors(3, 4, &vs).rank());
        assert!(e.contains(&[2, 0, 2, 2]));
        assert!(!e.contains(&[0, 0, 0, 1]));
    }
}
