use super::{enumerate_sl2, sl2_generators, GroupError, Mat2};
use crate::linalg::FpMatrix;
use crate::rep::GModule;

/// Coordinates of a traceless matrix `[[a, b], [c, -a]]` in the basis
/// `E+ = [[0,1],[0,0]]`, `H = [[1,0],[0,-1]]`, `E- = [[0,0],[1,0]]`: `(b, a, c)`.
pub fn traceless_coords(x: &Mat2) -> [u32; 3] {
    let [a, b, c, d] = x.entries();
    debug_assert_eq!((a + d) % x.modulus(), 0, "not traceless");
    [b, a, c]
}

pub fn traceless_from_coords(level: u32, v: [i64; 3]) -> Mat2 {
    let [b, a, c] = v;
    Mat2::new(level, a, b, c, -a)
}

/// The level-2 congruence kernel `{g in SL(2, Z/9) : g = I mod 3}`.
pub fn gamma_one() -> Result<Vec<Mat2>, GroupError> {
    let sl9 = enumerate_sl2(2)?;
    Ok(sl9
        .elements()
        .iter()
        .filter(|g| g.reduce(1).is_identity())
        .copied()
        .collect())
}

// g = I + 3X  ->  X mod 3
fn log_coords(g: &Mat2) -> [u32; 3] {
    let [a, b, c, d] = g.entries();
    let x = Mat2::new(1, (a as i64 - 1) / 3, b as i64 / 3, c as i64 / 3, (d as i64 - 1) / 3);
    traceless_coords(&x)
}

/// The congruence kernel as an F_3[SL(2, F_3)]-module under conjugation by
/// level-2 lifts, with actions for the generators `S`, `T`.
///
/// Checks on the way that the kernel has 27 elements, is elementary abelian,
/// and that `I + 3X -> X mod 3` is an isomorphism onto the traceless matrices.
pub fn frattini_quotient_gamma() -> Result<GModule, GroupError> {
    let gamma = gamma_one()?;
    let fail = |m: &str| Err(GroupError::Construction(m.to_string()));
    if gamma.len() != 27 {
        return fail("congruence kernel does not have 27 elements");
    }
    for g in &gamma {
        if !g.pow(3).is_identity() {
            return fail("congruence kernel is not of exponent 3");
        }
        for h in &gamma {
            if g.mul(h) != h.mul(g) {
                return fail("congruence kernel is not abelian");
            }
            let sum: Vec<u32> = log_coords(g)
                .iter()
                .zip(log_coords(h))
                .map(|(x, y)| (x + y) % 3)
                .collect();
            if log_coords(&g.mul(h)).to_vec() != sum {
                return fail("I + 3X -> X is not additive");
            }
        }
    }
    let mut images: Vec<[u32; 3]> = gamma.iter().map(log_coords).collect();
    images.sort();
    images.dedup();
    if images.len() != 27 {
        return fail("I + 3X -> X is not injective");
    }
    let basis: Vec<Mat2> = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        .iter()
        .map(|&v| {
            let x = traceless_from_coords(2, v);
            Mat2::identity(2).add_scaled(&x, 3)
        })
        .collect();
    let actions = sl2_generators(2)
        .iter()
        .map(|s| {
            debug_assert_eq!(s.det(), 1);
            let sinv = s.inverse().expect("unit determinant");
            let cols: Vec<Vec<u8>> = basis
                .iter()
                .map(|g| log_coords(&s.mul(g).mul(&sinv)).map(|x| x as u8).to_vec())
                .collect();
            FpMatrix::from_columns(3, 3, &cols)
        })
        .collect();
    GModule::new(3, actions).map_err(|e| GroupError::Construction(e.to_string()))
}
