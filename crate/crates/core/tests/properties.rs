use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tetra_core::arith::is_prime;
use tetra_core::cohomology::{tame_cyclotomic, tame_module_cohomology};
use tetra_core::group::Perm4;
use tetra_core::linalg::FpMatrix;
use tetra_core::rep::{ad0_a4, decompose, GModule};

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> FpMatrix {
    let mut m = FpMatrix::zeros(3, n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, rng.gen_range(0..3));
        }
    }
    m
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> FpMatrix {
    loop {
        let m = random_matrix(rng, n);
        if m.is_invertible() {
            return m;
        }
    }
}

fn random_combination(rng: &mut ChaCha8Rng, basis: &[Vec<u8>], len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for b in basis {
        let c = rng.gen_range(0..3u8);
        for (o, x) in out.iter_mut().zip(b) {
            *o = (*o + c * x) % 3;
        }
    }
    out
}

/// A random module for `<sigma, tau | sigma tau sigma^-1 = tau^ell>`: tau is
/// random invertible, sigma a random invertible solution of
/// `sigma tau = tau^ell sigma`.
fn random_tame_module(rng: &mut ChaCha8Rng, ell: u64, dim: usize) -> GModule {
    loop {
        let tau = random_invertible(rng, dim);
        let tau_ell = tau.pow(ell);
        // unknown sigma[r][c] at index r * dim + c
        let mut eqs = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                let mut row = vec![0u8; dim * dim];
                for k in 0..dim {
                    // (sigma tau)[r][c] = sum_k sigma[r][k] tau[k][c]
                    row[r * dim + k] = (row[r * dim + k] + tau.get(k, c)) % 3;
                    // - (tau^ell sigma)[r][c] = - sum_k tau_ell[r][k] sigma[k][c]
                    row[k * dim + c] = (row[k * dim + c] + 3 - tau_ell.get(r, k)) % 3;
                }
                eqs.push(row);
            }
        }
        let sols = FpMatrix::from_row_vectors(3, dim * dim, &eqs).kernel_basis();
        for _ in 0..20 {
            let v = random_combination(rng, &sols, dim * dim);
            let sigma = FpMatrix::from_row_vectors(
                3,
                dim,
                &v.chunks(dim).map(<[u8]>::to_vec).collect::<Vec<_>>(),
            );
            if sigma.is_invertible() {
                return GModule::new(dim, vec![sigma, tau]).unwrap();
            }
        }
    }
}

#[test]
fn tame_duality_and_euler_on_random_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a3e);
    let primes: Vec<u64> = (2..400).filter(|&p| p != 3 && is_prime(p)).collect();
    for _ in 0..100 {
        let ell = primes[rng.gen_range(0..primes.len())];
        let dim = rng.gen_range(1..=4);
        let m = random_tame_module(&mut rng, ell, dim);
        let r = tame_module_cohomology(ell, &m).expect("tame relation holds by construction");
        let h2 = r.h2.unwrap();
        assert_eq!(r.h1, r.h0 + h2, "Euler characteristic, ell = {ell}");
        let dual = m.dual_twist(&tame_cyclotomic(ell)).unwrap();
        assert_eq!(h2, dual.invariants().len(), "h2 against dual invariants");
        let rd = tame_module_cohomology(ell, &dual).unwrap();
        assert_eq!(rd.h0, h2, "duality, degree 0 <-> 2");
        assert_eq!(rd.h2.unwrap(), r.h0, "duality, degree 2 <-> 0");
        assert_eq!(rd.h1, r.h1, "duality in degree 1");
        assert_eq!(r.h1_cocycles.len(), r.h1);
    }
}

fn f3(rows: &[Vec<i64>]) -> FpMatrix {
    FpMatrix::from_rows(3, rows).unwrap()
}

fn perm_module() -> GModule {
    let mat = |p: Perm4| f3(&p.matrix().iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    GModule::new(4, vec![mat(Perm4([1, 0, 3, 2])), mat(Perm4([1, 2, 0, 3]))]).unwrap()
}

fn unipotent_module() -> GModule {
    GModule::new(
        2,
        vec![FpMatrix::identity(3, 2), f3(&[vec![1, 1], vec![0, 1]])],
    )
    .unwrap()
}

fn assert_reassembles(v: &GModule, expected_m: usize) {
    let d = decompose(v).unwrap();
    assert_eq!(d.m, expected_m);
    assert_eq!(d.n, v.dim() - 3 * expected_m);
    let ad = ad0_a4();
    for (i, a) in v.actions().iter().enumerate() {
        let mut block = FpMatrix::zeros(3, 0, 0);
        for _ in 0..d.m {
            block = block.direct_sum(ad.action(i));
        }
        let block = block.direct_sum(d.complement.action(i));
        assert_eq!(a.mul(&d.isomorphism), d.isomorphism.mul(&block));
    }
    for f in &d.projections {
        for (a, b) in v.actions().iter().zip(ad.actions()) {
            assert_eq!(f.mul(a), b.mul(f));
        }
    }
}

#[test]
fn decompose_and_reassemble_random_a4_modules() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa4);
    for _ in 0..100 {
        let mut v = GModule::trivial(0, 2);
        let mut m = 0;
        loop {
            let (block, adj) = match rng.gen_range(0..4) {
                0 => (GModule::trivial(1, 2), 0),
                1 => (ad0_a4(), 1),
                2 => (unipotent_module(), 0),
                _ => (perm_module(), 1),
            };
            if v.dim() + block.dim() > 9 {
                break;
            }
            v = v.direct_sum(&block).unwrap();
            m += adj;
            if rng.gen_bool(0.25) {
                break;
            }
        }
        let basis = random_invertible(&mut rng, v.dim());
        let scrambled = v.change_basis(&basis).unwrap();
        assert_reassembles(&scrambled, m);
    }
}

/// Action `[[Ad(g), c_g], [0, I_k]]`; returns the solution space of the A_4
/// relations for one column of `c`, as vectors `(c_1, c_2)` in F_3^6.
fn extension_cocycles() -> Vec<Vec<u8>> {
    let ad = ad0_a4();
    let (a1, a2) = (ad.action(0), ad.action(1));
    let id = FpMatrix::identity(3, 3);
    let z = FpMatrix::zeros(3, 3, 3);
    let a12 = a1.mul(a2);
    let tri = |x: &FpMatrix| x.mul(x).add(x).add(&id);
    // g1^2 = 1: (A1 + 1) c1 = 0
    let r1 = a1.add(&id).hstack(&z);
    // g2^3 = 1: (A2^2 + A2 + 1) c2 = 0
    let r2 = z.hstack(&tri(a2));
    // (g1 g2)^3 = 1 with translation part A1 c2 + c1
    let r3 = tri(&a12).hstack(&tri(&a12).mul(a1));
    r1.vstack(&r2).vstack(&r3).kernel_basis()
}

#[test]
fn adjoint_extensions_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe7);
    let cocycles = extension_cocycles();
    assert!(!cocycles.is_empty());
    let ad = ad0_a4();
    for trial in 0..40 {
        let k = rng.gen_range(1..=4);
        let mut actions = Vec::new();
        let cols: Vec<Vec<u8>> = (0..k).map(|_| random_combination(&mut rng, &cocycles, 6)).collect();
        for g in 0..2 {
            let mut a = FpMatrix::identity(3, 3 + k);
            for r in 0..3 {
                for c in 0..3 {
                    a.set(r, c, ad.action(g).get(r, c) as i64);
                }
                for (j, col) in cols.iter().enumerate() {
                    a.set(r, 3 + j, col[3 * g + r] as i64);
                }
            }
            actions.push(a);
        }
        let ext = GModule::new(3 + k, actions).unwrap();
        ext.check_a4_relations().unwrap();
        // Ad0 as a submodule, and (by duality) as a quotient.
        let ext = if trial % 2 == 0 { ext } else { ext.dual_twist(&[1, 1]).unwrap() };
        let d = decompose(&ext).unwrap();
        assert_eq!((d.m, d.n), (1, k));
        assert!(d.complement_trivial_action);
        assert_reassembles(&ext, 1);
    }
}
