use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RepError;
use crate::group::GroupTable;
use crate::linalg::{Echelon, FpMatrix};

/// A finite-dimensional F_3-representation given by one action matrix per
/// group generator. Matrices act on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    dim: usize,
    actions: Vec<FpMatrix>,
}

impl GModule {
    pub fn new(dim: usize, actions: Vec<FpMatrix>) -> Result<Self, RepError> {
        for (i, a) in actions.iter().enumerate() {
            if a.p() != 3 {
                return Err(RepError::Dimension(format!("action {i} is not over F_3")));
            }
            if a.rows() != dim || a.cols() != dim {
                return Err(RepError::Dimension(format!(
                    "action {i} is {}x{}, module dimension is {dim}",
                    a.rows(),
                    a.cols()
                )));
            }
            if !a.is_invertible() {
                return Err(RepError::NotInvertible(i));
            }
        }
        Ok(GModule { dim, actions })
    }

    pub fn trivial(dim: usize, generators: usize) -> Self {
        GModule {
            dim,
            actions: vec![FpMatrix::identity(3, dim); generators],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn actions(&self) -> &[FpMatrix] {
        &self.actions
    }

    pub fn action(&self, i: usize) -> &FpMatrix {
        &self.actions[i]
    }

    pub fn num_generators(&self) -> usize {
        self.actions.len()
    }

    pub fn direct_sum(&self, other: &GModule) -> Result<GModule, RepError> {
        if self.num_generators() != other.num_generators() {
            return Err(RepError::Dimension("generator counts differ".into()));
        }
        Ok(GModule {
            dim: self.dim + other.dim,
            actions: self
                .actions
                .iter()
                .zip(&other.actions)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        })
    }

    /// Rewrites the module in the basis given by the columns of `basis`.
    pub fn change_basis(&self, basis: &FpMatrix) -> Result<GModule, RepError> {
        let inv = basis
            .inverse()
            .ok_or_else(|| RepError::Dimension("change of basis is singular".into()))?;
        Ok(GModule {
            dim: self.dim,
            actions: self.actions.iter().map(|a| inv.mul(a).mul(basis)).collect(),
        })
    }

    /// Action matrices of every element of `table`, built along its spanning
    /// tree. Fails unless `x -> rho(x)` is a homomorphism on the whole table.
    pub fn element_actions<E>(&self, table: &GroupTable<E>) -> Result<Vec<FpMatrix>, RepError> {
        if table.generators().len() != self.actions.len() {
            return Err(RepError::Dimension(format!(
                "group has {} generators, module has {}",
                table.generators().len(),
                self.actions.len()
            )));
        }
        let mut rho: Vec<FpMatrix> = Vec::with_capacity(table.order());
        rho.push(FpMatrix::identity(3, self.dim));
        for (i, link) in table.spanning_tree().iter().enumerate().skip(1) {
            let (parent, slot) = link.expect("non-identity elements have parents");
            debug_assert!(parent < i);
            rho.push(rho[parent].mul(&self.actions[slot]));
        }
        for x in 0..table.order() {
            for (slot, &g) in table.generators().iter().enumerate() {
                if rho[x].mul(&self.actions[slot]) != rho[table.mul(x, g)] {
                    return Err(RepError::Relations(format!(
                        "action is not a homomorphism at element {x}, generator {slot}"
                    )));
                }
            }
        }
        Ok(rho)
    }

    /// Checks `g1^2 = g2^3 = (g1 g2)^3 = 1`, a presentation of A_4.
    pub fn check_a4_relations(&self) -> Result<(), RepError> {
        if self.actions.len() != 2 {
            return Err(RepError::Relations(format!(
                "A4 modules carry 2 generator actions, found {}",
                self.actions.len()
            )));
        }
        let (a, b) = (&self.actions[0], &self.actions[1]);
        let checks = [
            ("g1^2", a.pow(2)),
            ("g2^3", b.pow(3)),
            ("(g1 g2)^3", a.mul(b).pow(3)),
        ];
        for (name, m) in checks {
            if !m.is_identity() {
                return Err(RepError::Relations(format!("{name} acts nontrivially")));
            }
        }
        Ok(())
    }

    /// Contragredient twisted by a character: `g -> chi(g) * (rho(g)^-1)^T`.
    pub fn dual_twist(&self, character: &[u8]) -> Result<GModule, RepError> {
        if character.len() != self.actions.len() {
            return Err(RepError::Dimension("one character value per generator".into()));
        }
        if let Some(&bad) = character.iter().find(|&&c| c % 3 == 0) {
            return Err(RepError::NotUnit(bad));
        }
        Ok(GModule {
            dim: self.dim,
            actions: self
                .actions
                .iter()
                .zip(character)
                .map(|(a, &c)| a.inverse().expect("invertible").transpose().scale(c as i64))
                .collect(),
        })
    }

    /// Vectors fixed by every generator.
    pub fn invariants(&self) -> Vec<Vec<u8>> {
        let id = FpMatrix::identity(3, self.dim);
        let stacked = self
            .actions
            .iter()
            .fold(FpMatrix::zeros(3, 0, self.dim), |acc, a| acc.vstack(&a.sub(&id)));
        stacked.kernel_basis()
    }

    /// Basis (reduced echelon) of the submodule generated by `vectors`.
    pub fn spin(&self, vectors: &[Vec<u8>]) -> Vec<Vec<u8>> {
        let mut span = Echelon::new(3, self.dim);
        let mut queue: Vec<Vec<u8>> = Vec::new();
        for v in vectors {
            if span.insert(v) {
                queue.push(v.clone());
            }
        }
        while let Some(v) = queue.pop() {
            for a in &self.actions {
                let w = a.apply(&v);
                if span.insert(&w) {
                    queue.push(w);
                }
            }
        }
        FpMatrix::from_row_vectors(3, self.dim, span.basis()).row_space_basis()
    }

    pub fn is_submodule(&self, basis: &[Vec<u8>]) -> bool {
        let mut span = Echelon::new(3, self.dim);
        for v in basis {
            span.insert(v);
        }
        basis
            .iter()
            .all(|v| self.actions.iter().all(|a| span.contains(&a.apply(v))))
    }

    /// Basis of Hom_G(self, target): matrices `f` (target.dim x self.dim) with
    /// `target(g) f = f self(g)` for every generator, subject to the extra
    /// requirement `f v = 0` for each `v` in `killed`.
    pub fn hom_to_killing(&self, target: &GModule, killed: &[Vec<u8>]) -> Vec<FpMatrix> {
        assert_eq!(self.num_generators(), target.num_generators());
        let (n, m) = (self.dim, target.dim);
        let unknown = |r: usize, c: usize| r * n + c;
        let mut eqs: Vec<Vec<u8>> = Vec::new();
        for (a, b) in self.actions.iter().zip(&target.actions) {
            for r2 in 0..m {
                for c2 in 0..n {
                    let mut row = vec![0u8; m * n];
                    // (B f)[r2][c2] = sum_r B[r2][r] f[r][c2]
                    for r in 0..m {
                        row[unknown(r, c2)] = (row[unknown(r, c2)] + b.get(r2, r)) % 3;
                    }
                    // - (f A)[r2][c2] = - sum_c f[r2][c] A[c][c2]
                    for c in 0..n {
                        row[unknown(r2, c)] = (row[unknown(r2, c)] + 3 - a.get(c, c2)) % 3;
                    }
                    eqs.push(row);
                }
            }
        }
        for v in killed {
            for r in 0..m {
                let mut row = vec![0u8; m * n];
                for c in 0..n {
                    row[unknown(r, c)] = v[c];
                }
                eqs.push(row);
            }
        }
        let sys = FpMatrix::from_row_vectors(3, m * n, &eqs);
        sys.kernel_basis()
            .into_iter()
            .map(|v| {
                let mut f = FpMatrix::zeros(3, m, n);
                for r in 0..m {
                    for c in 0..n {
                        f.set(r, c, v[unknown(r, c)] as i64);
                    }
                }
                f
            })
            .collect()
    }

    pub fn hom_to(&self, target: &GModule) -> Vec<FpMatrix> {
        self.hom_to_killing(target, &[])
    }

    /// An invertible G-map `self -> other`, if one exists among combinations
    /// of the hom basis (exhaustive for small hom spaces, seeded random search
    /// otherwise).
    pub fn find_isomorphism(&self, other: &GModule) -> Option<FpMatrix> {
        if self.dim != other.dim || self.num_generators() != other.num_generators() {
            return None;
        }
        let homs = self.hom_to(other);
        let k = homs.len();
        let combine = |coeffs: &[u8]| {
            homs.iter()
                .zip(coeffs)
                .fold(FpMatrix::zeros(3, other.dim, self.dim), |acc, (h, &c)| {
                    acc.add(&h.scale(c as i64))
                })
        };
        if k <= 7 {
            for code in 1..3usize.pow(k as u32) {
                let mut c = code;
                let coeffs: Vec<u8> = (0..k)
                    .map(|_| {
                        let d = (c % 3) as u8;
                        c /= 3;
                        d
                    })
                    .collect();
                let f = combine(&coeffs);
                if f.is_invertible() {
                    return Some(f);
                }
            }
            return (self.dim == 0).then(|| FpMatrix::zeros(3, 0, 0));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1505);
        for _ in 0..2000 {
            let coeffs: Vec<u8> = (0..k).map(|_| rng.gen_range(0..3)).collect();
            let f = combine(&coeffs);
            if f.is_invertible() {
                return Some(f);
            }
        }
        None
    }
}
