//! Acceptance suite: one PASS/FAIL line per criterion, each with its own time
//! limit. Runs offline against the shipped fixtures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tetra_bridge::{record_fixture, RayClassFixture};
use tetra_core::arith::is_prime;
use tetra_core::cohomology::{tame_cyclotomic, tame_module_cohomology, BarComplex, TameComplex};
use tetra_core::group::{element_order, enumerate_sl2, sl2_generators, Perm4};
use tetra_core::linalg::FpMatrix;
use tetra_core::rep::{ad0_a4, build_ad0, decompose, GModule};
use tetra_cubic::{
    class_group, condition2, factorization_profile, period_polynomial, sieve_candidates, Cubic,
};
use tetrasieve::verify::cohomology_rows;
use tetrasieve::{
    all_pass, classify_inertia, emit_rows, group_rows, run_sieve, Branch, Mode, SieveOptions, Summary,
};

const LAMBDA_2000: [u64; 11] = [163, 277, 349, 547, 607, 937, 1399, 1699, 1777, 1879, 1951];

const LIMIT_SIEVE: Duration = Duration::from_secs(600);
const LIMIT_SMALLEST: Duration = Duration::from_secs(600);
const LIMIT_VERIFY: Duration = Duration::from_secs(60);
const LIMIT_GROUPS: Duration = Duration::from_secs(5);
const LIMIT_CUBIC: Duration = Duration::from_secs(600);
const LIMIT_INERTIA: Duration = Duration::from_secs(1);
const LIMIT_PROPERTIES: Duration = Duration::from_secs(120);

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixtures() -> PathBuf {
    root().join("fixtures")
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn lambda(max: u64) -> Result<Vec<u64>, String> {
    let reports = run_sieve(&SieveOptions {
        max,
        mode: Mode::Fixtures(fixtures()),
        jobs: jobs(),
        cross_check: None,
    })
    .map_err(|e| e.to_string())?;
    let s = Summary::of(&reports);
    ensure(s.pending.is_empty() && s.errors.is_empty(), || {
        format!("pending {:?}, errors {:?}", s.pending, s.errors)
    })?;
    Ok(s.lambda)
}

fn criterion_1() -> Check {
    let got = lambda(2000)?;
    ensure(got == LAMBDA_2000, || format!("got {got:?}"))?;
    Ok(format!("{got:?}"))
}

fn criterion_2() -> Check {
    let got = lambda(400)?;
    ensure(got.len() >= 3 && got[..3] == [163, 277, 349], || format!("got {got:?}"))?;
    Ok(format!("first three {:?}", &got[..3]))
}

fn criterion_3() -> Check {
    let rows = cohomology_rows(163);
    ensure(all_pass(&rows) && rows.len() == 9, || emit_rows(&rows))?;
    Ok(format!("{} rows", rows.len()))
}

fn criterion_4() -> Check {
    let rows = group_rows();
    ensure(all_pass(&rows) && rows.len() == 6, || emit_rows(&rows))?;
    Ok(format!("{} rows", rows.len()))
}

struct OracleRow {
    ell: u64,
    h: u64,
    poly: String,
}

fn class_number_oracle() -> Vec<OracleRow> {
    include_str!("../../cubic/tests/data/class_groups_pari.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('|').map(str::trim).collect();
            OracleRow {
                ell: f[0].parse().unwrap(),
                h: f[1].parse().unwrap(),
                poly: f[3].to_string(),
            }
        })
        .collect()
}

// characteristic polynomial of the Gaussian periods, rounded from floating point
fn numeric_period_polynomial(ell: u64) -> Cubic {
    let g = (2..ell)
        .find(|&g| (1..ell - 1).all(|k| tetra_core::arith::pow_mod(g, k, ell) != 1))
        .unwrap();
    let mut eta = [0f64; 3];
    let mut x = 1u64;
    for k in 0..ell - 1 {
        eta[(k % 3) as usize] += (2.0 * std::f64::consts::PI * x as f64 / ell as f64).cos();
        x = x * g % ell;
    }
    let e1 = eta[0] + eta[1] + eta[2];
    let e2 = eta[0] * eta[1] + eta[1] * eta[2] + eta[0] * eta[2];
    let e3 = eta[0] * eta[1] * eta[2];
    Cubic([(-e1).round() as i128, e2.round() as i128, (-e3).round() as i128])
}

fn criterion_5() -> Check {
    let oracle = class_number_oracle();
    let lookup = |ell: u64| oracle.iter().find(|r| r.ell == ell).ok_or(format!("{ell} not in oracle"));
    let mut hs = Vec::new();
    for ell in [7u64, 13, 163] {
        let f = period_polynomial(ell).map_err(|e| format!("{ell}: {e}"))?;
        let row = lookup(ell)?;
        ensure(f.poly.to_string() == row.poly, || format!("{ell}: {} vs {}", f.poly, row.poly))?;
        let sq = (ell as i128) * (ell as i128);
        ensure(f.disc_field == sq as u128, || format!("{ell}: field discriminant {}", f.disc_field))?;
        let idx = f.index as i128;
        ensure(f.poly.discriminant() == idx * idx * sq, || {
            format!("{ell}: disc {} != index^2 ell^2", f.poly.discriminant())
        })?;
        let efg = factorization_profile(&f).map_err(|e| e.to_string())?;
        ensure(efg == (3, 1, 1), || format!("{ell}: (e,f,g) = {efg:?}"))?;
        let cg = class_group(&f).map_err(|e| format!("{ell}: {e}"))?;
        ensure(cg.h == row.h, || format!("{ell}: h = {} vs oracle {}", cg.h, row.h))?;
        hs.push(cg.h);
    }
    for ell in [7u64, 13] {
        let num = numeric_period_polynomial(ell);
        let f = period_polynomial(ell).unwrap();
        ensure(f.poly == num, || format!("{ell}: {} vs numeric {num}", f.poly))?;
    }
    ensure(numeric_period_polynomial(7) == Cubic([1, -2, -1]), || "7: x^3 + x^2 - 2x - 1".into())?;
    ensure(numeric_period_polynomial(13) == Cubic([1, -4, 1]), || "13: x^3 + x^2 - 4x + 1".into())?;
    // 163 defines the same field as the simplest cubic with a = 11
    let simplest = Cubic([-11, -14, -1]);
    ensure(simplest.discriminant() == 163 * 163, || "simplest cubic discriminant".into())?;
    let f163 = period_polynomial(163).unwrap();
    ensure(f163.root_of(&simplest).is_some(), || "163: no root of the simplest cubic in L".into())?;
    ensure(hs[0] == 1 && hs[1] == 1 && hs[2] % 4 == 0, || format!("h = {hs:?}"))?;

    let mut checked = 0;
    for ell in sieve_candidates(2000) {
        let f = period_polynomial(ell).map_err(|e| format!("{ell}: {e}"))?;
        let (c2, cg) = condition2(&f).map_err(|e| format!("{ell}: {e}"))?;
        let row = lookup(ell)?;
        ensure(cg.h == row.h, || format!("{ell}: h = {} vs oracle {}", cg.h, row.h))?;
        if c2 {
            ensure(cg.h % 4 == 0, || format!("{ell}: h = {} not divisible by 4", cg.h))?;
            checked += 1;
        }
    }
    Ok(format!("h(7,13,163) = {hs:?}, {checked} condition-2 primes with 4 | h"))
}

fn criterion_6() -> Check {
    for level in [1u32, 2] {
        for ell in [7u64, 13, 163, 277] {
            let u = classify_inertia(2, level, ell).map_err(|e| e.to_string())?;
            let b = classify_inertia(-1, level, ell).map_err(|e| e.to_string())?;
            ensure(u.branch == Branch::UniversalLift && b.branch == Branch::BanalLift, || {
                format!("level {level}, ell {ell}: {:?} {:?}", u.branch, b.branch)
            })?;
        }
        let table = enumerate_sl2(level).map_err(|e| e.to_string())?;
        let mut rejected = 0;
        for g in table.elements() {
            let order = element_order(g);
            let mut o = order;
            while o % 3 == 0 {
                o /= 3;
            }
            if o != 1 {
                ensure(classify_inertia(g.trace() as i64, level, 163).is_err(), || {
                    format!("level {level}: {g} of order {order} accepted")
                })?;
                rejected += 1;
            }
        }
        ensure(rejected > 0, || format!("level {level}: no non-pro-3 elements"))?;
    }
    Ok("levels 1 and 2".into())
}

fn random_matrix(rng: &mut ChaCha8Rng, p: u8, rows: usize, cols: usize) -> FpMatrix {
    let mut m = FpMatrix::zeros(p, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rng.gen_range(0..p as i64));
        }
    }
    m
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> FpMatrix {
    loop {
        let m = random_matrix(rng, 3, n, n);
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

// sigma solves sigma tau = tau^ell sigma for a random invertible tau
fn random_tame_module(rng: &mut ChaCha8Rng, ell: u64, dim: usize) -> GModule {
    loop {
        let tau = random_invertible(rng, dim);
        let tau_ell = tau.pow(ell);
        let mut eqs = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                let mut row = vec![0u8; dim * dim];
                for k in 0..dim {
                    row[r * dim + k] = (row[r * dim + k] + tau.get(k, c)) % 3;
                    row[k * dim + c] = (row[k * dim + c] + 3 - tau_ell.get(r, k)) % 3;
                }
                eqs.push(row);
            }
        }
        let sols = FpMatrix::from_row_vectors(3, dim * dim, &eqs).kernel_basis();
        for _ in 0..20 {
            let v = random_combination(rng, &sols, dim * dim);
            let rows: Vec<Vec<u8>> = v.chunks(dim).map(<[u8]>::to_vec).collect();
            let sigma = FpMatrix::from_row_vectors(3, dim, &rows);
            if sigma.is_invertible() {
                return GModule::new(dim, vec![sigma, tau]).unwrap();
            }
        }
    }
}

fn rank_nullity(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..200 {
        let p = [2u8, 3, 5, 7][rng.gen_range(0..4)];
        let (r, c) = (rng.gen_range(0..7), rng.gen_range(0..7));
        let m = random_matrix(rng, p, r, c);
        let ker = m.kernel_basis();
        ensure(m.rank() + ker.len() == c, || format!("rank-nullity fails for {r}x{c} over F_{p}"))?;
        for v in &ker {
            ensure(m.apply(v).iter().all(|&x| x == 0), || "kernel vector not in kernel".into())?;
        }
        ensure(FpMatrix::from_row_vectors(p, c, &ker).rank() == ker.len(), || {
            "kernel basis is dependent".into()
        })?;
    }
    Ok(())
}

fn tame_suite(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let primes: Vec<u64> = (2..400).filter(|&p| p != 3 && is_prime(p)).collect();
    for _ in 0..100 {
        let ell = primes[rng.gen_range(0..primes.len())];
        let dim = rng.gen_range(1..=4);
        let m = random_tame_module(rng, ell, dim);
        let cx = TameComplex::new(ell, &m).map_err(|e| e.to_string())?;
        ensure(cx.d1.mul(&cx.d0).is_zero(), || format!("d^2 != 0 on tame data, ell = {ell}"))?;
        let r = tame_module_cohomology(ell, &m).map_err(|e| e.to_string())?;
        let h2 = r.h2.unwrap();
        ensure(r.h1 == r.h0 + h2, || format!("Euler identity, ell = {ell}"))?;
        let dual = m.dual_twist(&tame_cyclotomic(ell)).map_err(|e| e.to_string())?;
        ensure(h2 == dual.invariants().len(), || format!("h2 != h0(dual), ell = {ell}"))?;
    }
    Ok(())
}

fn bar_d_squared(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let sl = enumerate_sl2(1).map_err(|e| e.to_string())?;
    let ad = build_ad0(&sl2_generators(1)).map_err(|e| e.to_string())?;
    let bar = BarComplex::new(&sl, &ad).map_err(|e| e.to_string())?;
    for k in 0..2u32 {
        for _ in 0..5 {
            let c: Vec<u8> = (0..bar.cochain_dim(k)).map(|_| rng.gen_range(0..3)).collect();
            let dd = bar.apply(k + 1, &bar.apply(k, &c));
            ensure(dd.iter().all(|&x| x == 0), || format!("d^2 != 0 on bar cochains of degree {k}"))?;
        }
    }
    Ok(())
}

fn f3(rows: &[Vec<i64>]) -> FpMatrix {
    FpMatrix::from_rows(3, rows).unwrap()
}

fn perm_module() -> GModule {
    let mat = |p: Perm4| f3(&p.matrix().iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    GModule::new(4, vec![mat(Perm4([1, 0, 3, 2])), mat(Perm4([1, 2, 0, 3]))]).unwrap()
}

fn unipotent_module() -> GModule {
    GModule::new(2, vec![FpMatrix::identity(3, 2), f3(&[vec![1, 1], vec![0, 1]])]).unwrap()
}

fn reassembles(v: &GModule, expected_m: usize) -> Result<(), String> {
    let d = decompose(v).map_err(|e| e.to_string())?;
    ensure(d.m == expected_m && d.n == v.dim() - 3 * expected_m, || {
        format!("multiplicity {} vs {expected_m} in dim {}", d.m, v.dim())
    })?;
    let ad = ad0_a4();
    for (i, a) in v.actions().iter().enumerate() {
        let mut block = FpMatrix::zeros(3, 0, 0);
        for _ in 0..d.m {
            block = block.direct_sum(ad.action(i));
        }
        let block = block.direct_sum(d.complement.action(i));
        ensure(a.mul(&d.isomorphism) == d.isomorphism.mul(&block), || "isomorphism does not intertwine".into())?;
    }
    for f in &d.projections {
        for (a, b) in v.actions().iter().zip(ad.actions()) {
            ensure(f.mul(a) == b.mul(f), || "projection is not equivariant".into())?;
        }
    }
    Ok(())
}

fn decomposition_suite(rng: &mut ChaCha8Rng) -> Result<(), String> {
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
        let basis = random_invertible(rng, v.dim());
        reassembles(&v.change_basis(&basis).map_err(|e| e.to_string())?, m)?;
    }
    Ok(())
}

// solutions (c1, c2) of the A4 relations for one column of [[Ad(g), c_g], [0, 1]]
fn extension_cocycles() -> Vec<Vec<u8>> {
    let ad = ad0_a4();
    let (a1, a2) = (ad.action(0), ad.action(1));
    let id = FpMatrix::identity(3, 3);
    let z = FpMatrix::zeros(3, 3, 3);
    let a12 = a1.mul(a2);
    let tri = |x: &FpMatrix| x.mul(x).add(x).add(&id);
    let r1 = a1.add(&id).hstack(&z);
    let r2 = z.hstack(&tri(a2));
    let r3 = tri(&a12).hstack(&tri(&a12).mul(a1));
    r1.vstack(&r2).vstack(&r3).kernel_basis()
}

fn extension_suite(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let cocycles = extension_cocycles();
    ensure(!cocycles.is_empty(), || "no extension cocycles".into())?;
    let ad = ad0_a4();
    for trial in 0..40 {
        let k = rng.gen_range(1..=4);
        let cols: Vec<Vec<u8>> = (0..k).map(|_| random_combination(rng, &cocycles, 6)).collect();
        let mut actions = Vec::new();
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
        let ext = GModule::new(3 + k, actions).map_err(|e| e.to_string())?;
        ext.check_a4_relations().map_err(|e| e.to_string())?;
        let ext = if trial % 2 == 0 { ext } else { ext.dual_twist(&[1, 1]).map_err(|e| e.to_string())? };
        let d = decompose(&ext).map_err(|e| e.to_string())?;
        ensure((d.m, d.n) == (1, k) && d.complement_trivial_action, || {
            format!("extension of rank {k} did not split off Ad0")
        })?;
        reassembles(&ext, 1)?;
    }
    Ok(())
}

fn fixture_round_trip() -> Result<usize, String> {
    let store = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut count = 0;
    for entry in std::fs::read_dir(fixtures()).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_none_or(|e| e != "txt") {
            continue;
        }
        let bytes = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let f = RayClassFixture::parse(&bytes).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(f.serialize() == bytes, || format!("{}: re-serialization differs", path.display()))?;
        let written = record_fixture(&f, store.path()).map_err(|e| e.to_string())?;
        ensure(written.file_name() == path.file_name(), || format!("{}: file name differs", path.display()))?;
        let again = std::fs::read_to_string(&written).map_err(|e| e.to_string())?;
        ensure(again == bytes, || format!("{}: stored copy differs", path.display()))?;
        count += 1;
    }
    ensure(count == 16, || format!("{count} fixtures shipped"))?;
    Ok(count)
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_a4);
    rank_nullity(&mut rng)?;
    bar_d_squared(&mut rng)?;
    tame_suite(&mut rng)?;
    decomposition_suite(&mut rng)?;
    extension_suite(&mut rng)?;
    let n = fixture_round_trip()?;
    Ok(format!("100 tame data, 100 A4-modules, 40 extensions, {n} fixtures"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Check); 7] = [
        ("Lambda for ell <= 2000 from shipped fixtures", LIMIT_SIEVE, criterion_1),
        ("smallest members 163, 277, 349", LIMIT_SMALLEST, criterion_2),
        ("local and global dimension suite", LIMIT_VERIFY, criterion_3),
        ("group facts", LIMIT_GROUPS, criterion_4),
        ("cubic fields against the class-number oracle", LIMIT_CUBIC, criterion_5),
        ("inertia trace trichotomy", LIMIT_INERTIA, criterion_6),
        ("property suites", LIMIT_PROPERTIES, criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= *limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {limit:?} limit")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name} ({:.2}s, limit {}s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
