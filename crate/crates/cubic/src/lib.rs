//! Cyclic cubic fields of prime conductor `ell = 1 mod 3`: the candidate
//! sieve, Shanks' simplest cubics, Gaussian periods and class groups.

use thiserror::Error;

pub mod classgroup;
pub mod field;
mod lll;
pub mod primes;

pub use classgroup::{
    class_group, class_group_with, condition2, ClassGroupCertificate, ClassGroupOptions,
    ClassGroupResult,
};
pub use field::{factorization_profile, period_polynomial, Cubic, CubicField, Element, PeriodBasis};
pub use primes::{shanks_classify, sieve_candidates, simplest_cubic, Shanks};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubicError {
    #[error("{0} is not a prime congruent to 1 mod 3")]
    NotOneModThree(u64),
    #[error("consistency check failed: {0}")]
    Check(String),
    #[error("relation search exhausted at radius {radius} (rank {rank} of {columns}, candidate h {candidate_h:?}, unit index {unit_index:?})")]
    Budget {
        radius: i64,
        rank: usize,
        columns: usize,
        candidate_h: Option<u64>,
        unit_index: Option<u64>,
    },
}

/// `periods --prime` output as `key: value` lines.
pub fn periods_report(field: &CubicField) -> String {
    let mut out = String::new();
    out.push_str(&format!("ell: {}\n", field.ell));
    out.push_str(&format!("poly: {}\n", field.poly));
    out.push_str(&format!("disc_field: {}\n", field.disc_field));
    out.push_str(&format!("poly_index: {}\n", field.index));
    match field.shanks {
        Shanks::Shanks(a) => out.push_str(&format!("shanks: {a}\n")),
        Shanks::NotShanks => out.push_str("shanks: none\n"),
    }
    out
}

/// `classgroup --prime` output as `key: value` lines.
pub fn classgroup_report(field: &CubicField, cg: &ClassGroupResult) -> String {
    let c = &cg.certificate;
    let inv: Vec<String> = cg.invariants.iter().map(u64::to_string).collect();
    format!(
        "ell: {}\npoly: {}\nh: {}\ninvariants: [{}]\nminkowski_bound: {}\nfactor_base_bound: {}\n\
         factor_base_size: {}\nrelations: {}\nsweep_radius: {}\nunits_used: {}\nunit_index: {}\n",
        field.ell,
        field.poly,
        cg.h,
        inv.join(", "),
        c.minkowski_bound,
        c.factor_base_bound,
        c.factor_base_size,
        c.relation_count,
        c.sweep_radius,
        c.unit_count,
        c.unit_index
    )
}
