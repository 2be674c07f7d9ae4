//! F_3-representations of A_4 and SL(2, F_3): the adjoint module, dual
//! twists, irreducibility tests and splitting off adjoint summands.

mod module;

pub use module::GModule;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::group::{sl2_generators, traceless_coords, traceless_from_coords, Mat2};
use crate::linalg::FpMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("action matrix for generator {0} is not invertible")]
    NotInvertible(usize),
    #[error("{0}")]
    Dimension(String),
    #[error("group relations violated: {0}")]
    Relations(String),
    #[error("character value {0} is not a unit mod 3")]
    NotUnit(u8),
    #[error("image {0} does not lie in SL(2, F_3)")]
    NotSl2(String),
    #[error("given vectors do not span a submodule")]
    NotSubmodule,
    #[error("decomposition check failed: {0}")]
    Decomposition(String),
}

/// Matrix of `X -> g X g^-1` on traceless matrices in the basis (E+, H, E-).
pub fn adjoint_matrix(g: &Mat2) -> FpMatrix {
    let g1 = g.reduce(1);
    let ginv = g1.inverse().expect("invertible");
    let cols: Vec<Vec<u8>> = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        .iter()
        .map(|&v| {
            let x = traceless_from_coords(1, v);
            traceless_coords(&g1.mul(&x).mul(&ginv)).map(|c| c as u8).to_vec()
        })
        .collect();
    FpMatrix::from_columns(3, 3, &cols)
}

/// Ad^0 of a representation given by the images of the group generators.
pub fn build_ad0(images: &[Mat2]) -> Result<GModule, RepError> {
    let mut actions = Vec::with_capacity(images.len());
    for g in images {
        if g.level() != 1 || g.det() != 1 {
            return Err(RepError::NotSl2(g.to_string()));
        }
        actions.push(adjoint_matrix(g));
    }
    GModule::new(3, actions)
}

/// Ad^0 as an A_4-module on the generators (12)(34) and (123), which
/// correspond to the classes of `S` and `T` in PSL(2, F_3).
pub fn ad0_a4() -> GModule {
    build_ad0(&sl2_generators(1)).expect("S and T lie in SL(2, F_3)")
}

/// Contragredient of `m` twisted by the mod-3 cyclotomic character values on
/// the generators.
pub fn build_dual_twist(m: &GModule, cyclotomic: &[u8]) -> Result<GModule, RepError> {
    m.dual_twist(cyclotomic)
}

/// Outcome of an irreducibility test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible(IrreducibilityCertificate),
    /// Basis of a proper nonzero submodule (empty for the zero module).
    Reducible(Vec<Vec<u8>>),
}

/// How irreducibility was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreducibilityCertificate {
    pub dim: usize,
    pub method: CertificateMethod,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateMethod {
    /// Every line spins up to the whole module.
    Exhaustive,
    /// Norton's test on an algebra element with a nullity-one eigenvalue.
    Norton,
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Irreducibility::Irreducible(_))
    }
}

/// Modules of at most this dimension are checked line by line.
pub const EXHAUSTIVE_MAX_DIM: usize = 4;
const MEATAXE_TRIES: usize = 64;

fn lines(dim: usize) -> impl Iterator<Item = Vec<u8>> {
    (1..3usize.pow(dim as u32)).filter_map(move |code| {
        let mut c = code;
        let v: Vec<u8> = (0..dim)
            .map(|_| {
                let d = (c % 3) as u8;
                c /= 3;
                d
            })
            .collect();
        // one representative per line: first nonzero coordinate equal to 1
        (v.iter().find(|&&x| x != 0) == Some(&1)).then_some(v)
    })
}

fn exhaustive_irreducibility(m: &GModule) -> Irreducibility {
    for v in lines(m.dim()) {
        let sub = m.spin(&[v]);
        if sub.len() < m.dim() {
            return Irreducibility::Reducible(sub);
        }
    }
    Irreducibility::Irreducible(IrreducibilityCertificate {
        dim: m.dim(),
        method: CertificateMethod::Exhaustive,
    })
}

fn random_algebra_element(m: &GModule, rng: &mut ChaCha8Rng) -> FpMatrix {
    let n = m.dim();
    let mut acc = FpMatrix::zeros(3, n, n);
    for _ in 0..4 {
        let len = rng.gen_range(0..5);
        let mut word = FpMatrix::identity(3, n);
        for _ in 0..len {
            word = word.mul(m.action(rng.gen_range(0..m.num_generators())));
        }
        acc = acc.add(&word.scale(rng.gen_range(0..3)));
    }
    acc
}

/// Irreducibility test: line-by-line for small dimension, otherwise a
/// seeded meataxe with Norton's test, falling back to the exhaustive check
/// if no conclusive algebra element turns up.
pub fn is_irreducible(m: &GModule) -> Irreducibility {
    let n = m.dim();
    if n == 0 {
        return Irreducibility::Reducible(Vec::new());
    }
    if n <= EXHAUSTIVE_MAX_DIM || m.num_generators() == 0 {
        return exhaustive_irreducibility(m);
    }
    let dual = GModule::new(n, m.actions().iter().map(FpMatrix::transpose).collect())
        .expect("transposes of invertible matrices");
    let mut rng = ChaCha8Rng::seed_from_u64(0x3a7e);
    let id = FpMatrix::identity(3, n);
    for _ in 0..MEATAXE_TRIES {
        let a = random_algebra_element(m, &mut rng);
        for lambda in 0..3 {
            let shifted = a.sub(&id.scale(lambda));
            let ker = shifted.kernel_basis();
            let Some(v) = ker.first() else { continue };
            let sub = m.spin(&[v.clone()]);
            if sub.len() < n {
                return Irreducibility::Reducible(sub);
            }
            if ker.len() != 1 {
                continue;
            }
            let w = shifted.transpose().kernel_basis();
            let dual_sub = dual.spin(&[w[0].clone()]);
            if dual_sub.len() < n {
                // annihilator of a proper dual submodule is a proper submodule
                let ann = FpMatrix::from_row_vectors(3, n, &dual_sub).kernel_basis();
                return Irreducibility::Reducible(m.spin(&ann));
            }
            return Irreducibility::Irreducible(IrreducibilityCertificate {
                dim: n,
                method: CertificateMethod::Norton,
            });
        }
    }
    exhaustive_irreducibility(m)
}

/// Splitting `V = Ad^0^m (+) W` of an A_4-module.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Ad^0-multiplicity, `dim Hom_{A4}(V, Ad^0)`.
    pub m: usize,
    /// Dimension of the complement `W`.
    pub n: usize,
    /// Basis of Hom_{A4}(V, Ad^0); each is surjective and equivariant.
    pub projections: Vec<FpMatrix>,
    /// Basis of Hom_{A4}(Ad^0, V) used to embed the adjoint copies.
    pub embeddings: Vec<FpMatrix>,
    /// Basis of `W`, the common kernel of the projections.
    pub complement_basis: Vec<Vec<u8>>,
    /// `W` with its induced action.
    pub complement: GModule,
    /// Whether `W` is literally a trivial module (not merely unipotent).
    pub complement_trivial_action: bool,
    /// Columns: images of the adjoint copies, then the basis of `W`. Conjugates
    /// the action of `V` into block-diagonal form.
    pub isomorphism: FpMatrix,
}

/// Splits the adjoint summands off an A_4-module.
pub fn decompose(v: &GModule) -> Result<Decomposition, RepError> {
    v.check_a4_relations()?;
    let ad = ad0_a4();
    let projections = v.hom_to(&ad);
    let embeddings = ad.hom_to(v);
    let m = projections.len();
    if embeddings.len() != m {
        return Err(RepError::Decomposition(format!(
            "dim Hom(V, Ad0) = {m} but dim Hom(Ad0, V) = {}",
            embeddings.len()
        )));
    }
    let stacked = projections
        .iter()
        .fold(FpMatrix::zeros(3, 0, v.dim()), |acc, f| acc.vstack(f));
    if stacked.rank() != 3 * m {
        return Err(RepError::Decomposition("projections are not jointly surjective".into()));
    }
    let complement_basis = stacked.kernel_basis();
    let n = complement_basis.len();
    let mut columns: Vec<Vec<u8>> = Vec::with_capacity(v.dim());
    for s in &embeddings {
        for j in 0..3 {
            columns.push(s.column(j));
        }
    }
    columns.extend(complement_basis.iter().cloned());
    let iso = FpMatrix::from_columns(3, v.dim(), &columns);
    let inv = iso
        .inverse()
        .ok_or_else(|| RepError::Decomposition("adjoint copies meet the complement".into()))?;
    let mut w_actions = Vec::new();
    for (i, a) in v.actions().iter().enumerate() {
        let conj = inv.mul(a).mul(&iso);
        let mut expected = FpMatrix::zeros(3, 0, 0);
        for _ in 0..m {
            expected = expected.direct_sum(ad.action(i));
        }
        let mut w = FpMatrix::zeros(3, n, n);
        for r in 0..n {
            for c in 0..n {
                w.set(r, c, conj.get(3 * m + r, 3 * m + c) as i64);
            }
        }
        if conj != expected.direct_sum(&w) {
            return Err(RepError::Decomposition(format!(
                "generator {i} is not block diagonal in the split basis"
            )));
        }
        w_actions.push(w);
    }
    let complement = GModule::new(n, w_actions)?;
    if !complement.hom_to(&ad).is_empty() {
        return Err(RepError::Decomposition("complement still maps onto Ad0".into()));
    }
    let complement_trivial_action = complement.actions().iter().all(FpMatrix::is_identity);
    Ok(Decomposition {
        m,
        n,
        projections,
        embeddings,
        complement_basis,
        complement,
        complement_trivial_action,
        isomorphism: iso,
    })
}

/// Ad^0-multiplicity of `V / W` for a submodule `W` given by a spanning set.
pub fn ad0_multiplicity_of_quotient(v: &GModule, w: &[Vec<u8>]) -> Result<usize, RepError> {
    if !v.is_submodule(w) {
        return Err(RepError::NotSubmodule);
    }
    Ok(v.hom_to_killing(&ad0_a4(), w).len())
}
