//! Cohomology of the tame quotient `<sigma, tau | sigma tau sigma^-1 = tau^ell>`
//! at a prime `ell != 3`, through the complex `M -> M^2 -> M` built from the
//! Fox derivatives of the relator.

use super::{normalize_rep, CohomologyError, CohomologyReport};
use crate::arith::is_prime;
use crate::group::TameLocalDatum;
use crate::linalg::{Echelon, FpMatrix};
use crate::rep::{adjoint_matrix, GModule};

/// The two differentials of the tame complex for a module on which sigma
/// acts by `s` and tau by `t`.
#[derive(Clone, Debug)]
pub struct TameComplex {
    pub ell: u64,
    pub sigma: FpMatrix,
    pub tau: FpMatrix,
    /// `m -> ((sigma - 1) m, (tau - 1) m)`, a `2d x d` matrix.
    pub d0: FpMatrix,
    /// `(a, b) -> (1 - tau^ell) a + (sigma - N) b`, a `d x 2d` matrix, where
    /// `N = 1 + tau + ... + tau^(ell - 1)`.
    pub d1: FpMatrix,
}

fn matrix_order(t: &FpMatrix) -> u64 {
    let mut acc = t.clone();
    let mut k = 1;
    while !acc.is_identity() {
        acc = acc.mul(t);
        k += 1;
        assert!(k <= 1_000_000, "matrix order too large");
    }
    k
}

// 1 + t + ... + t^(count - 1)
fn geometric_sum(t: &FpMatrix, count: u64) -> FpMatrix {
    let n = t.rows();
    let mut acc = FpMatrix::zeros(3, n, n);
    let mut pow = FpMatrix::identity(3, n);
    for _ in 0..count {
        acc = acc.add(&pow);
        pow = pow.mul(t);
    }
    acc
}

impl TameComplex {
    /// Builds the complex after checking the tame relation on the module.
    pub fn new(ell: u64, module: &GModule) -> Result<Self, CohomologyError> {
        if ell == 3 || !is_prime(ell) {
            return Err(CohomologyError::TameRelation(format!("{ell} is not a prime other than 3")));
        }
        if module.num_generators() != 2 {
            return Err(CohomologyError::Mismatch(
                "tame modules carry actions for (sigma, tau)".into(),
            ));
        }
        let d = module.dim();
        let sigma = module.action(0).clone();
        let tau = module.action(1).clone();
        let e = matrix_order(&tau);
        let tau_ell = tau.pow(ell % e);
        let sinv = sigma.inverse().expect("module actions are invertible");
        if sigma.mul(&tau).mul(&sinv) != tau_ell {
            return Err(CohomologyError::TameRelation(
                "sigma tau sigma^-1 != tau^ell on the module".into(),
            ));
        }
        // N_ell = (ell div e) * (1 + ... + tau^(e-1)) + (1 + ... + tau^(ell mod e - 1))
        let full = geometric_sum(&tau, e).scale(((ell / e) % 3) as i64);
        let norm = full.add(&geometric_sum(&tau, ell % e));
        let id = FpMatrix::identity(3, d);
        let d0 = sigma.sub(&id).vstack(&tau.sub(&id));
        let d1 = id.sub(&tau_ell).hstack(&sigma.sub(&norm));
        Ok(TameComplex {
            ell,
            sigma,
            tau,
            d0,
            d1,
        })
    }

    pub fn dim(&self) -> usize {
        self.sigma.rows()
    }

    /// Dimensions (h0, h1, h2) together with H^1 representatives given by
    /// their values `(f(sigma), f(tau))`.
    pub fn cohomology(&self) -> CohomologyReport {
        let d = self.dim();
        let r0 = self.d0.rank();
        let r1 = self.d1.rank();
        let z1 = self.d1.kernel_basis();
        let mut span = Echelon::new(3, 2 * d);
        for j in 0..d {
            span.insert(&self.d0.column(j));
        }
        let reps = z1
            .iter()
            .filter(|z| span.insert(z))
            .map(|z| normalize_rep(z.clone()))
            .collect();
        CohomologyReport {
            h0: d - r0,
            h1: 2 * d - r1 - r0,
            h2: Some(d - r1),
            h1_cocycles: reps,
        }
    }
}

/// Module for the tame quotient on which sigma and tau act through the
/// adjoint action of the datum's matrices (reduced mod 3).
pub fn tame_ad0(datum: &TameLocalDatum) -> GModule {
    GModule::new(
        3,
        vec![adjoint_matrix(&datum.sigma()), adjoint_matrix(&datum.tau())],
    )
    .expect("adjoint matrices are invertible")
}

/// Cyclotomic character values on (sigma, tau) at `ell`.
pub fn tame_cyclotomic(ell: u64) -> [u8; 2] {
    [(ell % 3) as u8, 1]
}

/// Tame local cohomology of `module`, after validating the datum, the tame
/// relation on the module, the Euler identity `h1 = h0 + h2` and local
/// duality `h2 = h0` of the dual twist.
pub fn tame_local_cohomology(
    datum: &TameLocalDatum,
    module: &GModule,
) -> Result<CohomologyReport, CohomologyError> {
    tame_module_cohomology(datum.ell(), module)
}

/// As `tame_local_cohomology`, for a module given only by its (sigma, tau) actions.
pub fn tame_module_cohomology(
    ell: u64,
    module: &GModule,
) -> Result<CohomologyReport, CohomologyError> {
    let complex = TameComplex::new(ell, module)?;
    let report = complex.cohomology();
    let h2 = report.h2.expect("tame complex has degree 2");
    if report.h1 != report.h0 + h2 {
        return Err(CohomologyError::Validation(format!(
            "Euler identity fails: h1 = {}, h0 + h2 = {}",
            report.h1,
            report.h0 + h2
        )));
    }
    let dual = module
        .dual_twist(&tame_cyclotomic(ell))
        .map_err(|e| CohomologyError::Mismatch(e.to_string()))?;
    let h0_dual = dual.invariants().len();
    if h2 != h0_dual {
        return Err(CohomologyError::Validation(format!(
            "duality fails: h2 = {h2}, h0 of dual twist = {h0_dual}"
        )));
    }
    Ok(report)
}

/// The unramified part of H^1: classes with `f(tau) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnramifiedH1 {
    pub dim: usize,
    /// Values at sigma of representatives of a basis (tau maps to 0).
    pub sigma_values: Vec<Vec<u8>>,
}

impl UnramifiedH1 {
    /// The spanning cocycle when the space is a line.
    pub fn line(&self) -> Option<&[u8]> {
        (self.dim == 1).then(|| self.sigma_values[0].as_slice())
    }
}

/// `M^tau / (sigma - 1) M^tau`, with representatives in `M^tau`.
pub fn unramified_h1(datum: &TameLocalDatum, module: &GModule) -> Result<UnramifiedH1, CohomologyError> {
    let complex = TameComplex::new(datum.ell(), module)?;
    let d = complex.dim();
    let id = FpMatrix::identity(3, d);
    let fixed = complex.tau.sub(&id).kernel_basis();
    let mut span = Echelon::new(3, d);
    for v in &fixed {
        let w: Vec<u8> = complex.sigma.apply(v).iter().zip(v).map(|(a, b)| (a + 3 - b) % 3).collect();
        span.insert(&w);
    }
    let reps: Vec<Vec<u8>> = fixed
        .iter()
        .filter(|v| span.insert(v))
        .map(|v| normalize_rep(v.clone()))
        .collect();
    Ok(UnramifiedH1 {
        dim: reps.len(),
        sigma_values: reps,
    })
}
