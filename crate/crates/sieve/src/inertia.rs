//! Which lift a tame inertia image forces, read off from its trace.

use std::fmt;

use tetra_core::arith::is_prime;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Inertia has eigenvalue 1: the lift is the universal one.
    UniversalLift,
    /// Inertia has eigenvalues the primitive cube roots of unity: the lift
    /// factors through the section SL(2, F_3) -> SL(2, Z_3).
    BanalLift,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::UniversalLift => "UniversalLift",
            Branch::BanalLift => "BanalLift",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InertiaClassification {
    /// Trace reduced into `[0, 3^level)`.
    pub trace: u64,
    pub level: u32,
    pub ell: u64,
    pub branch: Branch,
    pub explanation: String,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InertiaError {
    #[error("level must be at least 1")]
    Level,
    #[error("{0} is not a prime different from 3")]
    Prime(u64),
    #[error("trace {trace} mod 3^{level} rejected: {reason}")]
    Rejected { trace: i64, level: u32, reason: String },
}

/// Classifies the image of a tame inertia generator at `ell` in
/// SL(2, Z/3^level) by its trace `trace` (any integer representative).
///
/// Tame inertia has pro-3 image, so its reduction mod 3 is unipotent and the
/// trace is 2 mod 3; traces 0 and 1 mod 3 belong to elements of order 4, 2 or
/// 6 and are rejected. Above that, trace 2 means the eigenvalue 1 and trace
/// -1 the eigenvalue pair of primitive cube roots of unity, which needs
/// `tau^(ell-1) = 1` with an element of order 3, so `3 | ell - 1`.
///
/// At level 1 the residues 2 and -1 coincide, so the given integer decides:
/// 2 is the eigenvalue-1 trace and -1 the cube-root trace. Other integers
/// are ambiguous at level 1 and rejected.
pub fn classify_inertia(trace: i64, level: u32, ell: u64) -> Result<InertiaClassification, InertiaError> {
    if level == 0 {
        return Err(InertiaError::Level);
    }
    if ell == 3 || !is_prime(ell) {
        return Err(InertiaError::Prime(ell));
    }
    let modulus = 3i64
        .checked_pow(level)
        .ok_or_else(|| InertiaError::Rejected {
            trace,
            level,
            reason: "level too large".into(),
        })?;
    let reject = |reason: &str| InertiaError::Rejected {
        trace,
        level,
        reason: reason.to_string(),
    };
    let residue = trace.rem_euclid(modulus);
    match trace.rem_euclid(3) {
        0 => return Err(reject("trace 0 mod 3 belongs to elements of order 4, which are not pro-3")),
        1 => return Err(reject("trace 1 mod 3 belongs to -I times a unipotent element (order 2 or 6), which is not pro-3")),
        _ => {}
    }
    let branch = if level == 1 {
        match trace {
            2 => Branch::UniversalLift,
            -1 => Branch::BanalLift,
            _ => return Err(reject("at level 1 only the integers 2 and -1 name a branch")),
        }
    } else if residue == 2 {
        Branch::UniversalLift
    } else if residue == modulus - 1 {
        Branch::BanalLift
    } else {
        return Err(reject("trace is neither 2 nor -1: no tame inertia image of a lift has it"));
    };
    if branch == Branch::BanalLift && (ell - 1) % 3 != 0 {
        return Err(reject("an inertia image of order 3 needs 3 | ell - 1"));
    }
    let explanation = match branch {
        Branch::UniversalLift => format!(
            "trace 2: inertia has 1 as an eigenvalue (unipotent image); the lift is the universal \
             deformation rho^({ell})"
        ),
        Branch::BanalLift => format!(
            "trace -1: eigenvalues zeta_3, zeta_3^-1; rho(tau_ell) has order 3, so \
             rho(tau_ell)^(ell-1) = I as {ell} = 1 mod 3; the lift is the banal lift"
        ),
    };
    Ok(InertiaClassification {
        trace: residue as u64,
        level,
        ell,
        branch,
        explanation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tetra_core::group::{element_order, enumerate_sl2};

    #[test]
    fn branches_at_levels_one_and_two() {
        for ell in [7u64, 163, 277] {
            assert_eq!(classify_inertia(2, 1, ell).unwrap().branch, Branch::UniversalLift);
            assert_eq!(classify_inertia(-1, 1, ell).unwrap().branch, Branch::BanalLift);
            assert_eq!(classify_inertia(2, 2, ell).unwrap().branch, Branch::UniversalLift);
            assert_eq!(classify_inertia(8, 2, ell).unwrap().branch, Branch::BanalLift);
            assert_eq!(classify_inertia(-1, 2, ell).unwrap().branch, Branch::BanalLift);
            assert_eq!(classify_inertia(-1, 2, ell).unwrap().trace, 8);
        }
        assert_eq!(classify_inertia(26, 3, 163).unwrap().branch, Branch::BanalLift);
        assert_eq!(classify_inertia(11, 2, 163).unwrap().branch, Branch::UniversalLift);
    }

    #[test]
    fn rejections() {
        assert!(classify_inertia(0, 1, 163).is_err());
        assert!(classify_inertia(1, 1, 163).is_err());
        assert!(classify_inertia(5, 1, 163).is_err());
        assert!(classify_inertia(5, 2, 163).is_err());
        assert!(classify_inertia(3, 2, 163).is_err());
        assert!(classify_inertia(2, 0, 163).is_err());
        assert!(classify_inertia(2, 1, 9).is_err());
        // no order-3 inertia when 3 does not divide ell - 1
        assert!(classify_inertia(-1, 2, 5).is_err());
        assert_eq!(classify_inertia(2, 2, 5).unwrap().branch, Branch::UniversalLift);
    }

    // rejected residues mod 3 are exactly those of elements that are not of 3-power order
    #[test]
    fn level_one_traces_match_element_orders() {
        let sl = enumerate_sl2(1).unwrap();
        for g in sl.elements() {
            let order = element_order(g);
            let pro3 = order == 1 || order == 3;
            let t = g.trace() as i64;
            assert_eq!(pro3, t % 3 == 2, "{g} of order {order}");
            if t == 0 {
                assert_eq!(order, 4);
            }
        }
    }

    // at level 2, trace 2 forces (g - 1)^2 = 0 and trace -1 forces g^3 = 1
    #[test]
    fn level_two_traces_match_eigenvalues() {
        let sl = enumerate_sl2(2).unwrap();
        let mut seen = [0usize; 2];
        for g in sl.elements() {
            match classify_inertia(g.trace() as i64, 2, 163).map(|c| c.branch) {
                Ok(Branch::UniversalLift) => {
                    let id = tetra_core::group::Mat2::identity(2);
                    let n = g.add_scaled(&id, -1);
                    assert!(n.mul(&n).entries().iter().all(|&x| x == 0), "{g}");
                    seen[0] += 1;
                }
                Ok(Branch::BanalLift) => {
                    assert!(g.pow(3).is_identity(), "{g}");
                    assert!(!g.is_identity());
                    seen[1] += 1;
                }
                Err(_) => assert!(g.trace() % 3 != 2 || ![2, 8].contains(&g.trace())),
            }
        }
        assert!(seen[0] > 0 && seen[1] > 0);
    }
}
