//! Explicit matrix groups over Z/3^n: SL(2, F_3), SL(2, Z/9), the quotient
//! PSL(2, F_3) with its identification with A_4, and tame local data.

mod frattini;
mod mat2;
mod table;

pub use frattini::{frattini_quotient_gamma, gamma_one, traceless_coords, traceless_from_coords};
pub use mat2::{element_order, inv_mod_3n, three_pow, Mat2};
pub use table::GroupTable;

use std::fmt;

use thiserror::Error;

use crate::arith::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("level {0} is not supported (tables exist for levels 1 and 2)")]
    UnsupportedLevel(u32),
    #[error("{0}")]
    NotCentralTwist(String),
    #[error("{ell} is not congruent to 1 mod 3")]
    NotOneModThree { ell: u64 },
    #[error("{0} is not a prime different from 3")]
    BadPrime(u64),
    #[error("y = {0} is not divisible by 3")]
    YNotDivisibleByThree(i64),
    #[error("tame relation sigma tau sigma^-1 = tau^ell fails: {0}")]
    TameRelation(String),
    #[error("group construction failed: {0}")]
    Construction(String),
}

/// The standard generators `S = [[0,-1],[1,0]]` and `T = [[1,1],[0,1]]`.
pub fn sl2_generators(level: u32) -> [Mat2; 2] {
    [Mat2::new(level, 0, -1, 1, 0), Mat2::new(level, 1, 1, 0, 1)]
}

/// Full table of SL(2, Z/3^level), generated by `S` and `T`.
pub fn enumerate_sl2(level: u32) -> Result<GroupTable<Mat2>, GroupError> {
    if !(1..=2).contains(&level) {
        return Err(GroupError::UnsupportedLevel(level));
    }
    let gens = sl2_generators(level);
    let expected = 3usize.pow(3 * level) / 9 * 8;
    let table = GroupTable::generate(Mat2::identity(level), &gens, |a, b| a.mul(b), expected)
        .ok_or_else(|| GroupError::Construction("closure exceeded |SL(2)|".into()))?;
    if table.order() != expected {
        return Err(GroupError::Construction(format!(
            "generated {} elements, expected {expected}",
            table.order()
        )));
    }
    Ok(table)
}

/// Canonical representative of the coset `{x, -x}`.
pub fn projective_rep(x: &Mat2) -> Mat2 {
    let n = x.neg();
    if n < *x {
        n
    } else {
        *x
    }
}

/// PSL(2, F_3) as the table of canonical coset representatives, with the
/// images of `S` and `T` as generators.
pub fn projectivize(sl: &GroupTable<Mat2>) -> Result<GroupTable<Mat2>, GroupError> {
    let level = sl.element(0).level();
    if level != 1 || sl.order() != 24 {
        return Err(GroupError::Construction(
            "projectivize expects the table of SL(2, F_3)".into(),
        ));
    }
    let gens: Vec<Mat2> = sl
        .generators()
        .iter()
        .map(|&g| projective_rep(sl.element(g)))
        .collect();
    let table = GroupTable::generate(
        projective_rep(&Mat2::identity(1)),
        &gens,
        |a, b| projective_rep(&a.mul(b)),
        12,
    )
    .ok_or_else(|| GroupError::Construction("PSL closure too large".into()))?;
    Ok(table)
}

/// Permutation of {0, 1, 2, 3}, composed right to left: `(p * q)(i) = p(q(i))`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4(pub [u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);
    /// (12)(34) in one-based cycle notation.
    pub const G1: Perm4 = Perm4([1, 0, 3, 2]);
    /// (123) in one-based cycle notation.
    pub const G2: Perm4 = Perm4([1, 2, 0, 3]);

    pub fn compose(&self, q: &Perm4) -> Perm4 {
        Perm4(q.0.map(|i| self.0[i as usize]))
    }

    pub fn is_even(&self) -> bool {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        inversions % 2 == 0
    }

    /// 4x4 permutation matrix sending basis vector `e_i` to `e_{p(i)}`.
    pub fn matrix(&self) -> [[i64; 4]; 4] {
        let mut m = [[0; 4]; 4];
        for i in 0..4 {
            m[self.0[i] as usize][i] = 1;
        }
        m
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.0;
        write!(f, "Perm4{p:?}")
    }
}

/// A_4 generated by (12)(34) and (123).
pub fn a4_table() -> GroupTable<Perm4> {
    GroupTable::generate(Perm4::IDENTITY, &[Perm4::G1, Perm4::G2], |a, b| a.compose(b), 12)
        .expect("A4 closure")
}

/// The isomorphism PSL(2, F_3) -> A_4 determined by
/// class of `S` -> (12)(34) and class of `T` -> (123).
///
/// Returns the image of every PSL table element, after checking that the
/// map is a bijection onto the even permutations and respects the full
/// multiplication table.
pub fn a4_isomorphism(psl: &GroupTable<Mat2>) -> Result<Vec<Perm4>, GroupError> {
    if psl.order() != 12 || psl.generators().len() != 2 {
        return Err(GroupError::Construction("expected PSL(2, F_3) with two generators".into()));
    }
    let images = [Perm4::G1, Perm4::G2];
    let map: Vec<Perm4> = (0..psl.order())
        .map(|i| {
            psl.word(i)
                .into_iter()
                .fold(Perm4::IDENTITY, |acc, s| acc.compose(&images[s]))
        })
        .collect();
    let mut sorted = map.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != 12 || !sorted.iter().all(Perm4::is_even) {
        return Err(GroupError::Construction("map is not a bijection onto A4".into()));
    }
    for a in 0..12 {
        for b in 0..12 {
            if map[psl.mul(a, b)] != map[a].compose(&map[b]) {
                return Err(GroupError::Construction("map is not a homomorphism".into()));
            }
        }
    }
    Ok(map)
}

/// Signs `(e_sigma, e_tau)` with `e_sigma * sigma = I` and `e_tau * tau = [[1,1],[0,1]]`.
pub fn central_twist_normalize(sigma: &Mat2, tau: &Mat2) -> Result<(i8, i8), GroupError> {
    let sign = |x: &Mat2, target: Mat2, name: &str| {
        if x.level() != 1 {
            return Err(GroupError::NotCentralTwist(format!("{name} is not at level 1")));
        }
        if *x == target {
            Ok(1)
        } else if x.neg() == target {
            Ok(-1)
        } else {
            Err(GroupError::NotCentralTwist(format!(
                "{name} = {x} is not +-{target}"
            )))
        }
    };
    Ok((
        sign(sigma, Mat2::identity(1), "sigma")?,
        sign(tau, Mat2::new(1, 1, 1, 0, 1), "tau")?,
    ))
}

/// The square root of `ell` modulo 3^level in the branch congruent to 1 mod 3.
pub fn hensel_sqrt_ell(ell: u64, level: u32) -> Result<u32, GroupError> {
    if ell % 3 != 1 {
        return Err(GroupError::NotOneModThree { ell });
    }
    let mut x: u64 = 1;
    let mut m: u64 = 3;
    for _ in 1..level {
        let next = m * 3;
        x = (0..3)
            .map(|t| x + t * m)
            .find(|&c| (c * c) % next == ell % next)
            .expect("Hensel lift exists for units");
        m = next;
    }
    Ok(x as u32)
}

/// Images of Frobenius and a tame inertia generator at a prime `ell != 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TameLocalDatum {
    ell: u64,
    sigma: Mat2,
    tau: Mat2,
}

impl TameLocalDatum {
    /// Validates `sigma * tau * sigma^-1 = tau^ell`.
    pub fn new(ell: u64, sigma: Mat2, tau: Mat2) -> Result<Self, GroupError> {
        if ell == 3 || !is_prime(ell) {
            return Err(GroupError::BadPrime(ell));
        }
        if sigma.level() != tau.level() {
            return Err(GroupError::TameRelation("levels differ".into()));
        }
        let sinv = sigma
            .inverse()
            .ok_or_else(|| GroupError::TameRelation(format!("sigma = {sigma} is singular")))?;
        if tau.inverse().is_none() {
            return Err(GroupError::TameRelation(format!("tau = {tau} is singular")));
        }
        let lhs = sigma.mul(&tau).mul(&sinv);
        let rhs = tau.pow(ell);
        if lhs != rhs {
            return Err(GroupError::TameRelation(format!("{lhs} != {rhs}")));
        }
        Ok(TameLocalDatum { ell, sigma, tau })
    }

    /// `sigma = I`, `tau = [[1,1],[0,1]]` at level 1.
    pub fn residual(ell: u64) -> Result<Self, GroupError> {
        Self::new(ell, Mat2::identity(1), Mat2::new(1, 1, 1, 0, 1))
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn sigma(&self) -> Mat2 {
        self.sigma
    }

    pub fn tau(&self) -> Mat2 {
        self.tau
    }
}

/// The lift template `sigma = [[sqrt(ell), y], [0, sqrt(ell)^-1]]`, `tau = [[1,1],[0,1]]`.
pub fn c_ell_template(ell: u64, level: u32, y: i64) -> Result<TameLocalDatum, GroupError> {
    if y.rem_euclid(3) != 0 {
        return Err(GroupError::YNotDivisibleByThree(y));
    }
    let s = hensel_sqrt_ell(ell, level)?;
    let sinv = inv_mod_3n(s as u64, level).expect("unit") as i64;
    TameLocalDatum::new(
        ell,
        Mat2::new(level, s as i64, y, 0, sinv),
        Mat2::new(level, 1, 1, 0, 1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sl2_orders_match_direct_count() {
        for level in 1..=2 {
            let m = three_pow(level) as i64;
            let mut count = 0;
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            if Mat2::new(level, a, b, c, d).det() == 1 {
                                count += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(enumerate_sl2(level).unwrap().order(), count);
        }
        assert_eq!(enumerate_sl2(1).unwrap().order(), 24);
        assert_eq!(enumerate_sl2(2).unwrap().order(), 648);
        assert_eq!(enumerate_sl2(3).unwrap_err(), GroupError::UnsupportedLevel(3));
    }

    #[test]
    fn center_is_plus_minus_identity() {
        let sl = enumerate_sl2(1).unwrap();
        let z: Vec<Mat2> = sl.center().into_iter().map(|i| *sl.element(i)).collect();
        assert_eq!(z.len(), 2);
        assert!(z.contains(&Mat2::identity(1)));
        assert!(z.contains(&Mat2::identity(1).neg()));
    }

    #[test]
    fn element_orders_in_sl2_f3() {
        let sl = enumerate_sl2(1).unwrap();
        for i in 0..sl.order() {
            let x = sl.element(i);
            assert!(x.pow(24).is_identity());
            assert!([1, 2, 3, 4, 6].contains(&element_order(x)));
            assert_eq!(element_order(x) as usize, sl.element_order(i));
        }
    }

    #[test]
    fn det_of_m_minus_identity_is_two_minus_trace() {
        let check = |x: &Mat2| {
            let m = x.modulus() as i64;
            let [a, b, c, d] = x.entries().map(|v| v as i64);
            let lhs = ((a - 1) * (d - 1) - b * c).rem_euclid(m);
            assert_eq!(lhs, (2 - x.trace() as i64).rem_euclid(m));
        };
        let sl = enumerate_sl2(1).unwrap();
        sl.elements().iter().for_each(check);
        let sl9 = enumerate_sl2(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            check(sl9.element(rng.gen_range(0..648)));
        }
    }

    #[test]
    fn psl_is_a4() {
        let sl = enumerate_sl2(1).unwrap();
        let psl = projectivize(&sl).unwrap();
        assert_eq!(psl.order(), 12);
        assert_eq!(
            psl.index_of(&projective_rep(&Mat2::identity(1).neg())),
            Some(psl.identity())
        );
        assert!(psl.is_associative());
        // no subgroup of order 6: every subgroup of A4 is generated by two elements
        let subs = psl.two_generated_subgroups();
        let sizes: Vec<usize> = subs.iter().map(Vec::len).collect();
        assert!(!sizes.contains(&6));
        assert!(sizes.contains(&4) && sizes.contains(&12));
        // exactly one normal subgroup of order 4, and it is the commutator subgroup
        let normal4: Vec<&Vec<usize>> =
            subs.iter().filter(|s| s.len() == 4 && psl.is_normal(s)).collect();
        assert_eq!(normal4.len(), 1);
        let comm = psl.commutator_subgroup();
        assert_eq!(&comm, normal4[0]);
        assert!(comm.iter().all(|&v| psl.element_order(v) <= 2));
        let iso = a4_isomorphism(&psl).unwrap();
        assert_eq!(iso[psl.generators()[0]], Perm4::G1);
        assert_eq!(iso[psl.generators()[1]], Perm4::G2);
    }

    #[test]
    fn a4_presentation_relations() {
        let g1 = Perm4::G1;
        let g2 = Perm4::G2;
        assert_eq!(g1.compose(&g1), Perm4::IDENTITY);
        assert_eq!(g2.compose(&g2).compose(&g2), Perm4::IDENTITY);
        let p = g1.compose(&g2);
        assert_eq!(p.compose(&p).compose(&p), Perm4::IDENTITY);
        assert_eq!(a4_table().order(), 12);
    }

    #[test]
    fn central_twists() {
        let i = Mat2::identity(1);
        let t = Mat2::new(1, 1, 1, 0, 1);
        assert_eq!(central_twist_normalize(&i, &t), Ok((1, 1)));
        assert_eq!(central_twist_normalize(&i.neg(), &t), Ok((-1, 1)));
        assert_eq!(central_twist_normalize(&i.neg(), &t.neg()), Ok((-1, -1)));
        assert!(central_twist_normalize(&t, &t).is_err());
    }

    #[test]
    fn hensel_roots_match_brute_force() {
        for (ell, want) in [(7, 4), (13, 7), (163, 1)] {
            assert_eq!(hensel_sqrt_ell(ell, 2).unwrap(), want);
            let brute: Vec<u64> = (0..9).filter(|x| x % 3 == 1 && (x * x) % 9 == ell % 9).collect();
            assert_eq!(brute, vec![want as u64]);
        }
        for ell in [7u64, 13, 19, 31, 37, 43, 163, 277] {
            for level in 1..=6 {
                let x = hensel_sqrt_ell(ell, level).unwrap() as u64;
                let m = 3u64.pow(level);
                assert_eq!(x % 3, 1);
                assert_eq!(x * x % m, ell % m);
            }
        }
        assert!(hensel_sqrt_ell(5, 2).is_err());
    }

    #[test]
    fn tame_template() {
        let d = c_ell_template(7, 1, 0).unwrap();
        assert_eq!(d.sigma(), Mat2::identity(1));
        assert_eq!(d.tau(), Mat2::new(1, 1, 1, 0, 1));
        let d = c_ell_template(7, 2, 0).unwrap();
        assert_eq!(d.sigma(), Mat2::new(2, 4, 0, 0, 7));
        assert!(c_ell_template(163, 2, 3).is_ok());
        assert_eq!(c_ell_template(7, 2, 1).unwrap_err(), GroupError::YNotDivisibleByThree(1));
        for ell in [7u64, 13, 19, 31, 37, 43, 61, 67, 73, 79, 97, 163, 277, 349] {
            for level in 1..=5 {
                for y in [0i64, 3, 6, -3, 9, 27] {
                    assert!(c_ell_template(ell, level, y).is_ok(), "{ell} {level} {y}");
                }
            }
        }
        assert!(TameLocalDatum::new(7, Mat2::new(1, 0, -1, 1, 0), Mat2::new(1, 1, 1, 0, 1)).is_err());
    }
}
