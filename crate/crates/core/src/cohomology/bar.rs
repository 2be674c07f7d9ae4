//! Cohomology of a finite group from normalized inhomogeneous cochains.
//!
//! A normalized k-cochain is a function on k-tuples of non-identity
//! elements; its coordinates are laid out as `tuple_index * dim + j`, where
//! tuples are read in base `|G| - 1`.

use super::{normalize_rep, CohomologyError, CohomologyReport};
use crate::group::GroupTable;
use crate::linalg::{Echelon, FpMatrix, PackedF3Rows};
use crate::rep::GModule;

/// Upper bound on `dim C^k * dim C^(k+1)` for a packed rank computation.
pub const MAX_DIFFERENTIAL_ENTRIES: usize = 120_000_000;

/// Precomputed data for the bar complex of `(G, M)`.
pub struct BarComplex<'a, E> {
    table: &'a GroupTable<E>,
    rho: Vec<FpMatrix>,
    dim: usize,
}

impl<'a, E> BarComplex<'a, E> {
    pub fn new(table: &'a GroupTable<E>, module: &GModule) -> Result<Self, CohomologyError> {
        let rho = module
            .element_actions(table)
            .map_err(|e| CohomologyError::Mismatch(e.to_string()))?;
        Ok(BarComplex {
            table,
            rho,
            dim: module.dim(),
        })
    }

    fn base(&self) -> usize {
        self.table.order() - 1
    }

    /// Dimension of the space of normalized k-cochains.
    pub fn cochain_dim(&self, k: u32) -> usize {
        self.base().pow(k) * self.dim
    }

    fn tuple(&self, mut idx: usize, k: u32) -> Vec<usize> {
        let b = self.base();
        let mut t = vec![0; k as usize];
        for slot in t.iter_mut().rev() {
            *slot = idx % b + 1;
            idx /= b;
        }
        t
    }

    fn tuple_index(&self, t: &[usize]) -> usize {
        let b = self.base();
        t.iter().fold(0, |acc, &g| acc * b + (g - 1))
    }

    /// Image of the basis cochain `delta_t * e_j` (t a k-tuple index) under
    /// the differential, as sparse `(coordinate, coefficient)` pairs in C^(k+1).
    pub fn differential_of_basis(&self, k: u32, t_idx: usize, j: usize) -> Vec<(usize, i64)> {
        let n = self.table.order();
        let d = self.dim;
        let t = self.tuple(t_idx, k);
        let k = k as usize;
        let mut out = Vec::new();
        let mut s = vec![0usize; k + 1];
        // g_1 . f(g_2, ..., g_{k+1})
        s[1..].copy_from_slice(&t);
        for g in 1..n {
            s[0] = g;
            let base = self.tuple_index(&s) * d;
            for r in 0..d {
                let c = self.rho[g].get(r, j);
                if c != 0 {
                    out.push((base + r, c as i64));
                }
            }
        }
        // (-1)^i f(..., g_i g_{i+1}, ...)
        for i in 1..=k {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let target = t[i - 1];
            for a in 1..n {
                let b = self.table.mul(self.table.inverse(a), target);
                if b == 0 {
                    continue;
                }
                s[..i - 1].copy_from_slice(&t[..i - 1]);
                s[i - 1] = a;
                s[i] = b;
                s[i + 1..].copy_from_slice(&t[i..]);
                out.push((self.tuple_index(&s) * d + j, sign));
            }
        }
        // (-1)^(k+1) f(g_1, ..., g_k)
        let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
        s[..k].copy_from_slice(&t);
        for g in 1..n {
            s[k] = g;
            out.push((self.tuple_index(&s) * d + j, sign));
        }
        out
    }

    /// Applies the k-th differential to a dense cochain.
    pub fn apply(&self, k: u32, cochain: &[u8]) -> Vec<u8> {
        assert_eq!(cochain.len(), self.cochain_dim(k));
        let mut out = vec![0i64; self.cochain_dim(k + 1)];
        for (pos, &c) in cochain.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (idx, v) in self.differential_of_basis(k, pos / self.dim, pos % self.dim) {
                out[idx] += v * c as i64;
            }
        }
        out.into_iter().map(|x| x.rem_euclid(3) as u8).collect()
    }

    /// Rank of the k-th differential.
    pub fn differential_rank(&self, k: u32) -> Result<usize, CohomologyError> {
        let rows = self.cochain_dim(k);
        let cols = self.cochain_dim(k + 1);
        if rows.saturating_mul(cols) > MAX_DIFFERENTIAL_ENTRIES {
            return Err(CohomologyError::TooLarge { degree: k, rows, cols });
        }
        let mut packed = PackedF3Rows::new(cols);
        let tuples = self.base().pow(k);
        for t in 0..tuples {
            for j in 0..self.dim {
                packed.push_sparse(&self.differential_of_basis(k, t, j));
            }
        }
        Ok(packed.rank())
    }
}

/// Crossed homomorphisms `G -> M` through their values on the generators.
///
/// A function is a cocycle iff `f(x s) = f(x) + x f(s)` for every element
/// `x` and generator `s`; walking the Cayley graph turns this into a linear
/// system whose unknowns are the generator values.
pub fn cocycles_on_generators<E>(
    table: &GroupTable<E>,
    module: &GModule,
) -> Result<Vec<Vec<u8>>, CohomologyError> {
    let rho = module
        .element_actions(table)
        .map_err(|e| CohomologyError::Mismatch(e.to_string()))?;
    let d = module.dim();
    let ng = table.generators().len();
    let unknowns = ng * d;
    // f(x) as a d x unknowns matrix, built along the spanning tree
    let mut f: Vec<FpMatrix> = vec![FpMatrix::zeros(3, d, unknowns)];
    let value_of_gen = |slot: usize| {
        let mut m = FpMatrix::zeros(3, d, unknowns);
        for r in 0..d {
            m.set(r, slot * d + r, 1);
        }
        m
    };
    let gens: Vec<FpMatrix> = (0..ng).map(value_of_gen).collect();
    for link in table.spanning_tree().iter().skip(1) {
        let (parent, slot) = link.expect("tree");
        f.push(f[parent].add(&rho[parent].mul(&gens[slot])));
    }
    let mut eqs = FpMatrix::zeros(3, 0, unknowns);
    for x in 0..table.order() {
        for (slot, &s) in table.generators().iter().enumerate() {
            let lhs = &f[table.mul(x, s)];
            let rhs = f[x].add(&rho[x].mul(&gens[slot]));
            let diff = lhs.sub(&rhs);
            if !diff.is_zero() {
                eqs = eqs.vstack(&diff);
            }
        }
    }
    Ok(eqs.kernel_basis())
}

/// H^0, H^1 and (when `max_degree >= 2` and the complex is small enough) H^2.
///
/// H^1 is computed from cocycles on generators, which scales to the 648
/// elements of SL(2, Z/9); H^2 needs the rank of the second bar differential
/// and returns `TooLarge` beyond `MAX_DIFFERENTIAL_ENTRIES`.
pub fn finite_group_cohomology<E>(
    table: &GroupTable<E>,
    module: &GModule,
    max_degree: u32,
) -> Result<CohomologyReport, CohomologyError> {
    if max_degree > 2 {
        return Err(CohomologyError::Unsupported(format!("degree {max_degree}")));
    }
    let d = module.dim();
    let h0 = module.invariants().len();
    let z1 = cocycles_on_generators(table, module)?;
    let b1_dim = d - h0;
    let h1 = z1.len() - b1_dim;

    // coboundaries on generators: s -> (s - 1) m
    let mut span = Echelon::new(3, z1.first().map_or(table.generators().len() * d, Vec::len));
    for j in 0..d {
        let mut v = Vec::new();
        for a in module.actions() {
            let mut col = a.column(j);
            col[j] = (col[j] + 2) % 3;
            v.extend(col);
        }
        span.insert(&v);
    }
    let mut reps = Vec::new();
    for z in &z1 {
        if span.insert(z) {
            reps.push(normalize_rep(z.clone()));
        }
    }
    debug_assert_eq!(reps.len(), h1);

    let h2 = if max_degree >= 2 {
        let bar = BarComplex::new(table, module)?;
        let r1 = bar.differential_rank(1)?;
        let r2 = bar.differential_rank(2)?;
        debug_assert_eq!(bar.cochain_dim(1) - r1 - (d - h0), h1);
        Some(bar.cochain_dim(2) - r2 - r1)
    } else {
        None
    };
    Ok(CohomologyReport {
        h0,
        h1,
        h2,
        h1_cocycles: reps,
    })
}
