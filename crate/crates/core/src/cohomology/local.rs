//! The archimedean place and the place above 3.

use super::{CohomologyError, CohomologyReport};
use crate::group::Mat2;
use crate::linalg::FpMatrix;
use crate::rep::{adjoint_matrix, GModule};

/// Cohomology of Z/2 acting on a module through the involution `c`.
pub fn archimedean_cohomology(c: &FpMatrix) -> Result<CohomologyReport, CohomologyError> {
    if c.p() != 3 || !c.is_square() {
        return Err(CohomologyError::Mismatch("expected a square matrix over F_3".into()));
    }
    let d = c.rows();
    let id = FpMatrix::identity(3, d);
    if !c.mul(c).is_identity() {
        return Err(CohomologyError::NotInvolution);
    }
    let minus = c.sub(&id);
    let plus = c.add(&id);
    let ker_minus = d - minus.rank();
    let ker_plus = d - plus.rank();
    Ok(CohomologyReport {
        h0: ker_minus,
        h1: ker_plus - minus.rank(),
        h2: Some(ker_minus - plus.rank()),
        h1_cocycles: Vec::new(),
    })
}

/// Local data at 3 for Ad^0 with an unramified action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Local3Report {
    /// Frobenius image the module was built from, when known.
    pub frobenius: Option<Mat2>,
    pub h0: usize,
    /// Invariants of the dual twist; zero forces h2 = 0 by local duality.
    pub h0_dual: usize,
    pub h2: usize,
    /// `h1 - h0`, which the local Euler characteristic over Q_3 makes equal to `dim M`.
    pub euler_gap: usize,
    pub h1: usize,
    /// Dimension of the local condition at 3: all of H^1.
    pub dim_n: usize,
}

/// Character values of the mod-3 cyclotomic character on (Frobenius, inertia)
/// at 3: a Frobenius lift fixing the cube roots of unity, and an inertia
/// element acting on them by inversion.
pub const CYCLOTOMIC_AT_3: [u8; 2] = [1, 2];

/// Local report for a 3-dimensional module with actions (Frobenius, inertia).
pub fn local_at_3_from_module(m: &GModule) -> Result<Local3Report, CohomologyError> {
    if m.dim() != 3 {
        return Err(CohomologyError::Dimension(m.dim()));
    }
    if m.num_generators() != 2 {
        return Err(CohomologyError::Mismatch("expected (Frobenius, inertia) actions".into()));
    }
    if !m.action(1).is_identity() {
        return Err(CohomologyError::Ramified);
    }
    let dual = m
        .dual_twist(&CYCLOTOMIC_AT_3)
        .map_err(|e| CohomologyError::Mismatch(e.to_string()))?;
    let h0_dual = dual.invariants().len();
    if h0_dual != 0 {
        return Err(CohomologyError::Validation(format!(
            "dual twist has {h0_dual}-dimensional invariants"
        )));
    }
    let h0 = m.invariants().len();
    let euler_gap = m.dim();
    let h1 = h0 + h0_dual + euler_gap;
    Ok(Local3Report {
        frobenius: None,
        h0,
        h0_dual,
        h2: h0_dual,
        euler_gap,
        h1,
        dim_n: h1,
    })
}

/// Local report at 3 for Ad^0 with Frobenius acting through `frobenius`.
pub fn local_at_3_report(frobenius: &Mat2) -> Result<Local3Report, CohomologyError> {
    if frobenius.level() != 1 || frobenius.det() != 1 {
        return Err(CohomologyError::Mismatch(format!("{frobenius} is not in SL(2, F_3)")));
    }
    let m = GModule::new(3, vec![adjoint_matrix(frobenius), FpMatrix::identity(3, 3)])
        .expect("adjoint action is invertible");
    let mut r = local_at_3_from_module(&m)?;
    r.frobenius = Some(*frobenius);
    Ok(r)
}
