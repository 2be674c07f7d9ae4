//! Dimension and group-theoretic claims, recomputed from scratch.

use std::fmt::Display;

use tetra_core::cohomology::{
    archimedean_cohomology, finite_group_cohomology, local_at_3_report, tame_ad0, tame_local_cohomology,
    unramified_h1,
};
use tetra_core::group::{
    a4_isomorphism, a4_table, element_order, enumerate_sl2, frattini_quotient_gamma, projectivize, sl2_generators,
    Mat2, TameLocalDatum,
};
use tetra_core::linalg::FpMatrix;
use tetra_core::rep::{ad0_a4, build_ad0, is_irreducible};
use tetra_core::selmer::{canonical_ledger, default_frobenius_at_3, full_h1_at_ell_ledger, wiles_difference};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyRow {
    pub claim: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

fn row<T: Display + PartialEq, E: Display>(claim: &str, expected: T, observed: Result<T, E>) -> VerifyRow {
    match observed {
        Ok(v) => VerifyRow {
            claim: claim.to_string(),
            expected: expected.to_string(),
            pass: v == expected,
            observed: v.to_string(),
        },
        Err(e) => VerifyRow {
            claim: claim.to_string(),
            expected: expected.to_string(),
            observed: format!("error: {e}"),
            pass: false,
        },
    }
}

fn triple(a: usize, b: usize, c: usize) -> String {
    format!("({a},{b},{c})")
}

/// Local and global cohomology dimensions of Ad^0, at the prime `ell`.
pub fn cohomology_rows(ell: u64) -> Vec<VerifyRow> {
    let mut rows = Vec::new();
    let datum = TameLocalDatum::residual(ell).map_err(|e| e.to_string());
    let tame = datum.clone().and_then(|d| {
        let m = tame_ad0(&d);
        let r = tame_local_cohomology(&d, &m).map_err(|e| e.to_string())?;
        let u = unramified_h1(&d, &m).map_err(|e| e.to_string())?;
        Ok((r, u))
    });
    rows.push(row(
        &format!("(h0,h1,h2) of Ad0 at ell={ell}"),
        triple(1, 2, 1),
        tame.clone().map(|(r, _)| triple(r.h0, r.h1, r.h2.unwrap_or(usize::MAX))),
    ));
    rows.push(row(
        &format!("dim H1_unr of Ad0 at ell={ell}"),
        1,
        tame.map(|(_, u)| u.dim),
    ));
    let at3 = local_at_3_report(&default_frobenius_at_3()).map_err(|e| e.to_string());
    rows.push(row("h2 of Ad0 at 3", 0, at3.clone().map(|r| r.h2)));
    rows.push(row("Euler gap h1 - h0 of Ad0 at 3", 3, at3.map(|r| r.h1 - r.h0)));
    rows.push(row(
        "(h0,h1,h2) of Ad0 at infinity, conjugation trivial",
        triple(3, 0, 0),
        archimedean_cohomology(&FpMatrix::identity(3, 3))
            .map(|r| triple(r.h0, r.h1, r.h2.unwrap_or(usize::MAX))),
    ));
    rows.push(row(
        &format!("Wiles difference, unramified condition at ell={ell}"),
        0,
        canonical_ledger(ell).map(|g| wiles_difference(&g)),
    ));
    rows.push(row(
        &format!("Wiles difference, full H1 at ell={ell}"),
        1,
        full_h1_at_ell_ledger(ell).map(|g| wiles_difference(&g)),
    ));
    rows.push(row(
        "H2(SL(2,F3), Ad0) = 0 via the bar resolution",
        0,
        enumerate_sl2(1).map_err(|e| e.to_string()).and_then(|sl| {
            let ad = build_ad0(&sl2_generators(1)).map_err(|e| e.to_string())?;
            let r = finite_group_cohomology(&sl, &ad, 2).map_err(|e| e.to_string())?;
            r.h2.ok_or_else(|| "degree 2 not computed".to_string())
        }),
    ));
    rows.push(row(
        "Ad0 is an irreducible F3[A4]-module",
        true,
        Ok::<_, String>(is_irreducible(&ad0_a4()).is_irreducible()),
    ));
    rows
}

/// Facts about SL(2, Z/3^n), A_4 and the Frattini quotient.
pub fn group_rows() -> Vec<VerifyRow> {
    let mut rows = Vec::new();
    let sl = enumerate_sl2(1).map_err(|e| e.to_string());
    rows.push(row("|SL(2,F3)| = 24", 24, sl.clone().map(|t| t.order())));
    let psl = sl.clone().and_then(|t| projectivize(&t).map_err(|e| e.to_string()));
    rows.push(row(
        "PSL(2,F3) = A4 (explicit isomorphism)",
        12,
        psl.and_then(|p| a4_isomorphism(&p).map(|m| m.len()).map_err(|e| e.to_string())),
    ));
    let a4 = a4_table();
    let v4 = a4.commutator_subgroup();
    rows.push(row(
        "V4 = [A4, A4] is normal of order 4",
        "order 4, normal".to_string(),
        Ok::<_, String>(format!(
            "order {}, {}",
            v4.len(),
            if a4.is_normal(&v4) { "normal" } else { "not normal" }
        )),
    ));
    rows.push(row(
        "unipotent [[1,1],[0,1]] has order 9 in SL(2,Z/9)",
        9,
        Ok::<_, String>(element_order(&Mat2::new(2, 1, 1, 0, 1))),
    ));
    rows.push(row(
        "|SL(2,Z/9)| = 648",
        648,
        enumerate_sl2(2).map(|t| t.order()).map_err(|e| e.to_string()),
    ));
    rows.push(row(
        "Frattini quotient of the level-3 congruence subgroup = Ad0",
        true,
        frattini_quotient_gamma().map_err(|e| e.to_string()).and_then(|fr| {
            let ad = build_ad0(&sl2_generators(1)).map_err(|e| e.to_string())?;
            Ok(fr.find_isomorphism(&ad).is_some())
        }),
    ));
    rows
}

/// Every row of the verification suite, at the smallest member 163.
pub fn verify_all() -> Vec<VerifyRow> {
    let mut rows = cohomology_rows(163);
    rows.extend(group_rows());
    rows
}

pub fn all_pass(rows: &[VerifyRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

pub fn emit_rows(rows: &[VerifyRow]) -> String {
    let width = rows.iter().map(|r| r.claim.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<6} {:<width$}  {:<16} {}\n", "result", "claim", "expected", "observed");
    for r in rows {
        out.push_str(&format!(
            "{:<6} {:<width$}  {:<16} {}\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.claim,
            r.expected,
            r.observed
        ));
    }
    out
}
