//! Class groups of cyclic cubic fields of prime conductor.
//!
//! The factor base is every prime ideal of norm at most the Minkowski bound
//! `2 ell / 9`. Inert primes and the ramified prime are principal and are
//! divided out of each relation together with their logarithms. Relations
//! come from short vectors of LLL-reduced ideal lattices and are reduced into
//! a Hermite form carrying log tails, so relations that cancel completely
//! yield units. The result is certified with the index of the cyclotomic
//! units `C` (norms to `L` of the cyclotomic units of `Q(zeta)^+`): for
//! prime conductor `[E : C] = h`, so the relation lattice is
//! complete exactly when the units found have index `h'` over `C`, where
//! `h'` is the order of the candidate group.

use num_traits::ToPrimitive;
use tetra_core::arith::{is_prime, pow_mod, primes_up_to};
use tetra_core::linalg::IntMatrix;

use crate::field::{CubicField, Element, PeriodBasis};
use crate::lll::lll_reduce;
use crate::CubicError;

/// A degree-one prime above a split `p`, the kernel of
/// `phi_k: eta_i -> images[(i + k) mod 3]`.
#[derive(Clone, Debug)]
struct SplitPrime {
    p: u64,
    images: [u64; 3],
    /// `gamma[k]` lies in the primes `k+1`, `k+2` above `p` but not in `k`.
    gamma: [Element; 3],
}

impl SplitPrime {
    fn image(&self, a: &Element, k: usize) -> u64 {
        let p = self.p as i128;
        let mut s = 0i128;
        for i in 0..3 {
            s += a[i].rem_euclid(p) * self.images[(i + k) % 3] as i128;
        }
        s.rem_euclid(p) as u64
    }

    fn form(&self, k: usize) -> [i128; 3] {
        [0, 1, 2].map(|i| self.images[(i + k) % 3] as i128)
    }
}

fn respects_table(basis: &PeriodBasis, r: &[u64; 3], p: u64) -> bool {
    let t = basis.table();
    for i in 0..3 {
        for j in i..3 {
            let lhs = r[i] * r[j] % p;
            let rhs = (0..3)
                .map(|k| (t[i][j][k].rem_euclid(p as i64) as u64) * r[k] % p)
                .sum::<u64>()
                % p;
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

fn cross_mod(a: [i128; 3], b: [i128; 3], p: i128) -> Element {
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    c.map(|x| {
        let r = x.rem_euclid(p);
        if r > p / 2 {
            r - p
        } else {
            r
        }
    })
}

fn split_prime(field: &CubicField, p: u64) -> Result<SplitPrime, CubicError> {
    let basis = field.basis();
    for r0 in (0..p).filter(|&x| field.poly.eval_mod(x, p) == 0) {
        for r1 in 0..p {
            let r2 = (2 * p - 1 - r0 % p - r1) % p;
            let images = [r0, r1, r2];
            if !respects_table(basis, &images, p) {
                continue;
            }
            let mut sp = SplitPrime {
                p,
                images,
                gamma: [[0; 3]; 3],
            };
            let pi = p as i128;
            for k in 0..3 {
                let g = cross_mod(sp.form((k + 1) % 3), sp.form((k + 2) % 3), pi);
                sp.gamma[k] = g;
            }
            let distinct = (0..3).all(|k| sp.image(&sp.gamma[k], k) != 0);
            if !distinct {
                return Err(CubicError::Check(format!("{p} does not split into distinct primes")));
            }
            return Ok(sp);
        }
    }
    Err(CubicError::Check(format!("no residue homomorphism modulo split prime {p}")))
}

fn is_split(ell: u64, p: u64) -> bool {
    p != ell && pow_mod(p % ell, (ell - 1) / 3, ell) == 1
}

/// Options for the relation search.
#[derive(Clone, Debug)]
pub struct ClassGroupOptions {
    /// Factor base bound as a multiple of the Minkowski bound.
    pub bound_factor: f64,
    pub initial_radius: i64,
    /// The sweep radius doubles until it exceeds this.
    pub max_radius: i64,
}

impl Default for ClassGroupOptions {
    fn default() -> Self {
        ClassGroupOptions {
            bound_factor: 1.0,
            initial_radius: 1,
            max_radius: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroupCertificate {
    /// `floor(2 ell / 9)`.
    pub minkowski_bound: u64,
    pub factor_base_bound: u64,
    /// Number of prime ideals in the factor base.
    pub factor_base_size: usize,
    pub relation_count: usize,
    pub sweep_radius: i64,
    /// Units found that were independent of the earlier ones.
    pub unit_count: usize,
    /// `[E' : C]` for the unit group `E'` spanned by the units found.
    pub unit_index: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroupResult {
    pub h: u64,
    /// Invariant factors greater than one, each dividing the next.
    pub invariants: Vec<u64>,
    pub certificate: ClassGroupCertificate,
}

#[derive(Clone, Debug)]
struct Row {
    v: Vec<i64>,
    logs: [f64; 3],
}

impl Row {
    fn combine(&self, a: i64, other: &Row, b: i64) -> Option<Row> {
        let mut v = Vec::with_capacity(self.v.len());
        for (x, y) in self.v.iter().zip(&other.v) {
            v.push(x.checked_mul(a)?.checked_add(y.checked_mul(b)?)?);
        }
        let logs = [0, 1, 2].map(|k| a as f64 * self.logs[k] + b as f64 * other.logs[k]);
        Some(Row { v, logs })
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Upper triangular basis of the relation lattice with log tails.
struct RelationLattice {
    n: usize,
    pivots: Vec<Option<Row>>,
    rank: usize,
    units: Vec<[f64; 3]>,
}

impl RelationLattice {
    fn new(n: usize) -> Self {
        RelationLattice {
            n,
            pivots: vec![None; n],
            rank: 0,
            units: Vec::new(),
        }
    }

    fn full_rank(&self) -> bool {
        self.rank == self.n
    }

    /// Inserts a relation; returns false (and leaves the lattice unchanged)
    /// on arithmetic overflow. Columns are eliminated from the last (largest
    /// prime) down, where valuations are mostly 0 or 1 against unit pivots.
    fn insert(&mut self, mut row: Row) -> bool {
        let mut staged: Vec<(usize, Row)> = Vec::new();
        let mut gcd_step = false;
        let mut new_pivot = None;
        for c in (0..self.n).rev() {
            let x = row.v[c];
            if x == 0 {
                continue;
            }
            let Some(b) = &self.pivots[c] else {
                if x < 0 {
                    row = match row.combine(-1, &row, 0) {
                        Some(r) => r,
                        None => return false,
                    };
                }
                new_pivot = Some(c);
                staged.push((c, row.clone()));
                break;
            };
            let d = b.v[c];
            if x % d == 0 {
                row = match row.combine(1, b, -(x / d)) {
                    Some(r) => r,
                    None => return false,
                };
                continue;
            }
            let (g, s, t) = ext_gcd(d, x);
            let Some(nb) = b.combine(s, &row, t) else { return false };
            let Some(nr) = row.combine(d / g, b, -(x / g)) else { return false };
            staged.push((c, nb));
            row = nr;
            gcd_step = true;
        }
        if new_pivot.is_none() {
            let sum: f64 = row.logs.iter().sum();
            let size: f64 = row.logs.iter().map(|x| x.abs()).sum();
            // drop torsion and tails that lost precision
            if size > 1e-6 && sum.abs() < 1e-6 * size.max(1.0) {
                self.units.push(row.logs);
            }
        }
        for (c, r) in staged {
            self.pivots[c] = Some(r);
        }
        if new_pivot.is_some() {
            self.rank += 1;
        }
        if self.full_rank() && (gcd_step || new_pivot.is_some()) {
            self.reduce();
        }
        true
    }

    /// Reduces the off-pivot entries of each pivot column into `[0, pivot)`.
    /// Stops early (with a still valid basis) on overflow.
    fn reduce(&mut self) {
        for c in (0..self.n).rev() {
            let pc = self.pivots[c].clone().expect("full rank");
            let d = pc.v[c];
            for r in c + 1..self.n {
                let row = self.pivots[r].as_ref().expect("full rank");
                let q = row.v[c].div_euclid(d);
                if q != 0 {
                    match row.combine(1, &pc, -q) {
                        Some(nr) => self.pivots[r] = Some(nr),
                        None => return,
                    }
                }
            }
        }
    }

    fn determinant(&self) -> u64 {
        self.pivots
            .iter()
            .enumerate()
            .map(|(c, r)| r.as_ref().map_or(0, |r| r.v[c]))
            .product::<i64>() as u64
    }

    fn matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<i64>> = self.pivots.iter().map(|r| r.as_ref().expect("full").v.clone()).collect();
        IntMatrix::from_rows(&rows).expect("square")
    }
}

/// Index `[E' : C]` of the group generated by the cyclotomic units and the
/// units with the given logs, assuming every unit has C-coordinates in
/// `(1/scale) Z`. `None` when a unit does not fit that lattice.
fn unit_index(theta: &[f64; 3], units: &[[f64; 3]], scale: u64) -> (u64, usize) {
    // sigma^i(theta)/theta is the square of the norm of a cyclotomic unit of
    // Q(zeta)^+, so the basis of C has half its logs; first two embeddings
    let c1 = [(theta[1] - theta[0]) / 2.0, (theta[2] - theta[1]) / 2.0];
    let c2 = [(theta[2] - theta[0]) / 2.0, (theta[0] - theta[1]) / 2.0];
    let det = c1[0] * c2[1] - c2[0] * c1[1];
    let d = scale as i64;
    let mut rows: Vec<Vec<i64>> = vec![vec![d, 0], vec![0, d]];
    for u in units {
        let q1 = (u[0] * c2[1] - c2[0] * u[1]) / det;
        let q2 = (c1[0] * u[1] - u[0] * c1[1]) / det;
        let (x, y) = (q1 * scale as f64, q2 * scale as f64);
        if (x - x.round()).abs() > 1e-4 || (y - y.round()).abs() > 1e-4 {
            continue;
        }
        let (xi, yi) = (x.round() as i64, y.round() as i64);
        rows.push(vec![xi.rem_euclid(d), yi.rem_euclid(d)]);
    }
    rows.sort();
    rows.dedup();
    let used = rows.len() - 2;
    let snf = IntMatrix::from_rows(&rows).expect("rectangular").smith_normal_form();
    let covol: u64 = snf.invariants.iter().take(2).map(|x| x.to_u64().expect("small")).product();
    ((scale * scale) / covol, used)
}

struct Engine<'a> {
    field: &'a CubicField,
    primes: Vec<u64>,
    split: Vec<SplitPrime>,
    theta: [f64; 3],
    lattice: RelationLattice,
    relations: usize,
}

impl<'a> Engine<'a> {
    /// Relation for `a`: valuations at the factor base and log tail after
    /// dividing out the principal ramified and inert primes.
    fn relation(&self, a: &Element) -> Option<Row> {
        let basis = self.field.basis();
        let ell = self.field.ell;
        let mut norm = basis.norm(a).unsigned_abs();
        if norm == 0 {
            return None;
        }
        let mut logs = [0, 1, 2].map(|k| basis.embed(a, k).abs().ln());
        let mut v = vec![0i64; 3 * self.split.len()];
        let mut e_ell = 0;
        while norm % ell as u128 == 0 {
            norm /= ell as u128;
            e_ell += 1;
        }
        for k in 0..3 {
            logs[k] -= e_ell as f64 * self.theta[k];
        }
        let mut si = 0;
        for &q in &self.primes {
            let q128 = q as u128;
            let mut e = 0u32;
            while norm % q128 == 0 {
                norm /= q128;
                e += 1;
            }
            let split_here = si < self.split.len() && self.split[si].p == q;
            if e > 0 {
                if split_here {
                    let sp = &self.split[si];
                    let mut total = 0;
                    for k in 0..3 {
                        if sp.image(a, k) == 0 {
                            let vk = valuation(basis, sp, a, k);
                            v[3 * si + k] = vk as i64;
                            total += vk;
                        }
                    }
                    if total != e {
                        return None;
                    }
                } else {
                    if e % 3 != 0 {
                        return None;
                    }
                    for l in logs.iter_mut() {
                        *l -= (e / 3) as f64 * (q as f64).ln();
                    }
                }
            }
            if split_here {
                si += 1;
            }
        }
        if norm > 1 {
            // must be a cube of inert primes beyond the bound
            let r = icbrt(norm)?;
            for (q, e) in crate::primes::factor(r as u64) {
                if q == ell || is_split(ell, q) {
                    return None;
                }
                for l in logs.iter_mut() {
                    *l -= e as f64 * (q as f64).ln();
                }
            }
        }
        Some(Row { v, logs })
    }

    fn add(&mut self, a: &Element) {
        let Some(row) = self.relation(a) else { return };
        let n = self.split.len();
        let mut cur = row;
        for _ in 0..3 {
            let rotated = Row {
                v: (0..3 * n).map(|c| cur.v[3 * (c / 3) + (c % 3 + 1) % 3]).collect(),
                logs: [cur.logs[1], cur.logs[2], cur.logs[0]],
            };
            if self.lattice.insert(cur) {
                self.relations += 1;
            }
            cur = rotated;
        }
    }
}

fn icbrt(n: u128) -> Option<u128> {
    let mut r = (n as f64).cbrt().round() as u128;
    while r * r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r * r == n && r < u64::MAX as u128).then_some(r)
}

/// `v_P(a)` for the `k`-th prime above `sp.p`, by repeated multiplication with
/// `gamma_k / p`, which is a unit away from the primes above p and has
/// valuation -1 at `P`.
fn valuation(basis: &PeriodBasis, sp: &SplitPrime, a: &Element, k: usize) -> u32 {
    let p = sp.p as i128;
    let mut x = *a;
    let mut v = 0;
    loop {
        let y = basis.mul(&x, &sp.gamma[k]);
        if y.iter().any(|c| c % p != 0) {
            return v;
        }
        x = y.map(|c| c / p);
        v += 1;
    }
}

/// Class group of `L` with the default search options.
pub fn class_group(field: &CubicField) -> Result<ClassGroupResult, CubicError> {
    class_group_with(field, &ClassGroupOptions::default())
}

pub fn class_group_with(
    field: &CubicField,
    opts: &ClassGroupOptions,
) -> Result<ClassGroupResult, CubicError> {
    let ell = field.ell;
    let minkowski = 2 * ell / 9;
    let bound = ((minkowski as f64) * opts.bound_factor).floor() as u64;
    let primes: Vec<u64> = primes_up_to(bound).into_iter().filter(|&p| p != ell).collect();
    let split: Vec<SplitPrime> = primes
        .iter()
        .filter(|&&p| is_split(ell, p))
        .map(|&p| split_prime(field, p))
        .collect::<Result<_, _>>()?;
    let basis = field.basis();
    let mut engine = Engine {
        field,
        primes,
        theta: basis.theta_logs(),
        lattice: RelationLattice::new(3 * split.len()),
        split,
        relations: 0,
    };
    let gram = basis.trace_form();
    let mut lattices: Vec<[Element; 3]> = vec![[[1, 0, 0], [0, 1, 0], [0, 0, 1]]];
    for sp in &engine.split {
        lattices.push(lll_reduce(ideal_basis(sp), &gram));
    }
    let mut done = 0i64;
    let mut radius = opts.initial_radius.max(1);
    loop {
        for r in done + 1..=radius {
            for b in &lattices {
                for c in shell(r) {
                    let a: Element = [0, 1, 2].map(|i| c[0] * b[0][i] + c[1] * b[1][i] + c[2] * b[2][i]);
                    engine.add(&a);
                }
            }
        }
        done = radius;
        let mut status = (None, None);
        if engine.lattice.full_rank() {
            let h = engine.lattice.determinant();
            let (index, used) = unit_index(&engine.theta, &engine.lattice.units, h);
            status = (Some(h), Some(index));
            if index == h {
                let snf = engine.lattice.matrix().smith_normal_form();
                let mut invariants: Vec<u64> = snf
                    .invariants
                    .iter()
                    .map(|x| x.to_u64().expect("small invariants"))
                    .filter(|&x| x > 1)
                    .collect();
                invariants.sort_unstable();
                if invariants.iter().product::<u64>() != h {
                    return Err(CubicError::Check("invariant factors do not multiply to h".into()));
                }
                return Ok(ClassGroupResult {
                    h,
                    invariants,
                    certificate: ClassGroupCertificate {
                        minkowski_bound: minkowski,
                        factor_base_bound: bound,
                        factor_base_size: engine.lattice.n,
                        relation_count: engine.relations,
                        sweep_radius: radius,
                        unit_count: used,
                        unit_index: index,
                    },
                });
            }
        }
        if radius >= opts.max_radius {
            return Err(CubicError::Budget {
                radius,
                rank: engine.lattice.rank,
                columns: engine.lattice.n,
                candidate_h: status.0,
                unit_index: status.1,
            });
        }
        radius = (radius * 2).min(opts.max_radius);
    }
}

fn ideal_basis(sp: &SplitPrime) -> [Element; 3] {
    let p = sp.p as i128;
    let f = sp.form(0);
    let j = (0..3).find(|&j| f[j] % p != 0).expect("nonzero form");
    let inv = pow_mod(f[j] as u64, sp.p - 2, sp.p) as i128;
    let mut out = [[0i128; 3]; 3];
    for (i, b) in out.iter_mut().enumerate() {
        if i == j {
            b[j] = p;
        } else {
            b[i] = 1;
            b[j] = (-f[i] * inv).rem_euclid(p);
        }
    }
    out
}

/// Coefficient vectors with max norm exactly `r`, up to sign.
fn shell(r: i64) -> impl Iterator<Item = [i128; 3]> {
    let range = move || -r..=r;
    range().flat_map(move |x| {
        range().flat_map(move |y| {
            range().filter_map(move |z| {
                let c = [x, y, z];
                let top = c.iter().map(|v| v.abs()).max().unwrap();
                let first = c.iter().copied().find(|&v| v != 0).unwrap_or(0);
                (top == r && first > 0).then_some(c.map(i128::from))
            })
        })
    })
}

/// Parity test `2 | h_L`; also checks that an even class number is
/// divisible by 4, as the 2-rank of a cyclic cubic field is even.
pub fn condition2(field: &CubicField) -> Result<(bool, ClassGroupResult), CubicError> {
    let cg = class_group(field)?;
    let even = cg.h % 2 == 0;
    if even && cg.h % 4 != 0 {
        return Err(CubicError::Check(format!(
            "h = {} is even but not divisible by 4",
            cg.h
        )));
    }
    Ok((even, cg))
}

pub fn is_split_prime(ell: u64, p: u64) -> bool {
    is_prime(p) && is_split(ell, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::period_polynomial;

    #[test]
    fn small_conductors_have_trivial_class_group() {
        for ell in [7u64, 13, 19, 31, 37] {
            let cg = class_group(&period_polynomial(ell).unwrap()).unwrap();
            assert_eq!(cg.h, 1, "ell = {ell}");
            assert!(cg.invariants.is_empty());
        }
    }

    #[test]
    fn class_number_163() {
        let f = period_polynomial(163).unwrap();
        let cg = class_group(&f).unwrap();
        assert_eq!(cg.h % 4, 0);
        assert_eq!(cg.invariants, vec![2, 2]);
        assert_eq!(cg.certificate.unit_index, cg.h);
        let (c2, _) = condition2(&f).unwrap();
        assert!(c2);
        assert!(!condition2(&period_polynomial(7).unwrap()).unwrap().0);
    }

    #[test]
    fn split_primes_have_three_distinct_residue_maps() {
        let f = period_polynomial(163).unwrap();
        for p in primes_up_to(36).into_iter().filter(|&p| is_split(163, p)) {
            let sp = split_prime(&f, p).unwrap();
            // norm of gamma_k is divisible by p^2 at least
            for k in 0..3 {
                let n = f.basis().norm(&sp.gamma[k]);
                assert_eq!(n % (p as i128 * p as i128), 0);
                assert_ne!(sp.image(&sp.gamma[k], k), 0);
                assert_eq!(sp.image(&sp.gamma[k], (k + 1) % 3), 0);
            }
        }
    }

    #[test]
    fn valuations_sum_to_norm_valuation() {
        let f = period_polynomial(277).unwrap();
        let b = f.basis();
        let sp = split_prime(&f, 2).or_else(|_| split_prime(&f, 3));
        if let Ok(sp) = sp {
            let pi = b.mul(&sp.gamma[0], &sp.gamma[1]);
            let cube = b.mul(&b.mul(&pi, &pi), &pi);
            let n = b.norm(&cube).unsigned_abs();
            let mut e = 0;
            let mut m = n;
            while m % sp.p as u128 == 0 {
                m /= sp.p as u128;
                e += 1;
            }
            let total: u32 = (0..3).map(|k| valuation(b, &sp, &cube, k)).sum();
            assert_eq!(total, e);
        }
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(12i64, 18i64), (-4, 6), (7, -3), (5, 0)] {
            let (g, s, t) = ext_gcd(a, b);
            assert_eq!(s * a + t * b, g);
            assert!(g >= 0);
        }
    }
}
