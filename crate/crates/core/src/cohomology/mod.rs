//! Group cohomology over F_3: finite groups through the bar complex, the
//! tame local group at a prime `ell != 3`, the archimedean place and the
//! unramified place above 3.

mod bar;
mod local;
mod tame;

pub use bar::{cocycles_on_generators, finite_group_cohomology, BarComplex, MAX_DIFFERENTIAL_ENTRIES};
pub use local::{
    archimedean_cohomology, local_at_3_from_module, local_at_3_report, Local3Report, CYCLOTOMIC_AT_3,
};
pub use tame::{
    tame_ad0, tame_cyclotomic, tame_local_cohomology, tame_module_cohomology, unramified_h1,
    TameComplex, UnramifiedH1,
};

use thiserror::Error;

use crate::linalg::inv_mod;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("module does not match the group: {0}")]
    Mismatch(String),
    #[error("degree-{degree} differential is {rows}x{cols}, beyond the dense size limit")]
    TooLarge { degree: u32, rows: usize, cols: usize },
    #[error("{0}")]
    TameRelation(String),
    #[error("complex conjugation must act as an involution")]
    NotInvolution,
    #[error("expected a 3-dimensional module, got dimension {0}")]
    Dimension(usize),
    #[error("inertia at 3 acts nontrivially")]
    Ramified,
    #[error("validation identity failed: {0}")]
    Validation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Dimensions of H^0, H^1, H^2 and representatives of an H^1 basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyReport {
    pub h0: usize,
    pub h1: usize,
    /// `None` when degree 2 was not requested.
    pub h2: Option<usize>,
    /// Cocycles (values on the generators, concatenated in generator order)
    /// whose classes form a basis of H^1; first nonzero coordinate is 1.
    pub h1_cocycles: Vec<Vec<u8>>,
}

pub(crate) fn normalize_rep(mut v: Vec<u8>) -> Vec<u8> {
    if let Some(&lead) = v.iter().find(|&&x| x != 0) {
        let inv = inv_mod(lead, 3);
        v.iter_mut().for_each(|x| *x = *x * inv % 3);
    }
    v
}
