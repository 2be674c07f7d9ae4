//! Ray class fixtures: validation, canonical basis, checksummed text form and
//! the on-disk store.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tetra_core::linalg::{Echelon, FpMatrix};
use tetra_core::rep::GModule;

use crate::backend::parse_ints;
use crate::BridgeError;

/// The F_3[A_4]-module `Gal(K_T^(3)/K)` of one prime, with inertia images
/// at the primes of `K` above `ell`. Matrices act on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayClassFixture {
    pub ell: u64,
    /// Coefficients of the degree-12 polynomial of `K`, leading first.
    pub poly_k: Vec<i64>,
    pub dim: usize,
    /// Action of (12)(34).
    pub g1: FpMatrix,
    /// Action of (123).
    pub g2: FpMatrix,
    pub inertia: Vec<Vec<u8>>,
    pub meta: BTreeMap<String, String>,
}

const KEYS: [&str; 8] = ["ell", "polyK", "dim", "g1", "g2", "inertia", "meta", "sha256"];

fn field(key: &str, value: &str) -> String {
    if value.is_empty() {
        format!("{key}:\n")
    } else {
        format!("{key}: {value}\n")
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

impl RayClassFixture {
    pub fn module(&self) -> GModule {
        GModule::new(self.dim, vec![self.g1.clone(), self.g2.clone()])
            .expect("validated fixtures carry invertible actions")
    }

    /// Checks every structural invariant; fixtures are only handed out after this.
    pub fn validate(&self) -> Result<(), BridgeError> {
        let bad = |s: String| Err(BridgeError::Invariant { ell: self.ell, detail: s });
        if self.poly_k.len() != 13 || self.poly_k[0] != 1 {
            return bad(format!("polyK must be monic of degree 12, got {} coefficients", self.poly_k.len()));
        }
        for (name, g) in [("g1", &self.g1), ("g2", &self.g2)] {
            if g.p() != 3 || g.rows() != self.dim || g.cols() != self.dim {
                return bad(format!("{name} is {}x{} but dim is {}", g.rows(), g.cols(), self.dim));
            }
        }
        if self.inertia.is_empty() {
            return bad("inertia list is empty".into());
        }
        if let Some(v) = self.inertia.iter().find(|v| v.len() != self.dim || v.iter().any(|&x| x > 2)) {
            return bad(format!("inertia vector {v:?} is not a residue vector of length {}", self.dim));
        }
        for (k, v) in &self.meta {
            let key_ok = !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !key_ok || v.contains([';', '\n', '=']) || v.trim() != v {
                return bad(format!("meta entry {k}={v:?} cannot be serialized"));
            }
        }
        let module = GModule::new(self.dim, vec![self.g1.clone(), self.g2.clone()])
            .map_err(|e| BridgeError::Invariant { ell: self.ell, detail: e.to_string() })?;
        module
            .check_a4_relations()
            .map_err(|e| BridgeError::Invariant { ell: self.ell, detail: e.to_string() })?;
        let order = generated_order(&self.g1, &self.g2);
        if order.map_or(true, |n| 12 % n != 0) {
            return bad(format!("action generates a group of order {order:?}, not dividing 12"));
        }
        // inertia at g(P) is g applied to inertia at P: the list is one A_4-orbit
        let set: HashSet<&Vec<u8>> = self.inertia.iter().collect();
        for v in &self.inertia {
            for g in [&self.g1, &self.g2] {
                let w = g.apply(v);
                if !set.contains(&w) {
                    return bad(format!("inertia vectors are not closed under the action: {v:?} -> {w:?}"));
                }
            }
        }
        Ok(())
    }

    /// Rewrites the fixture in a basis determined by the module data alone.
    ///
    /// For each inertia vector as seed, the inertia submodule is spun up
    /// breadth first (each basis vector hit by g1, then g2). It is then
    /// completed greedily: among all vectors outside the current submodule,
    /// the one whose spin is largest and carries the least action matrices
    /// is added. The candidate with the lexicographically least
    /// (g1, g2, sorted inertia) wins. Only exact ties in the greedy step are
    /// broken by the input coordinates.
    pub fn normalize(&self) -> Result<Self, BridgeError> {
        self.validate()?;
        let mut seeds: Vec<&Vec<u8>> = self.inertia.iter().filter(|v| v.iter().any(|&x| x != 0)).collect();
        seeds.sort();
        seeds.dedup();
        let mut best: Option<(Vec<u8>, Vec<u8>, Vec<Vec<u8>>)> = None;
        let candidates: Vec<Option<&Vec<u8>>> = if seeds.is_empty() {
            vec![None]
        } else {
            seeds.into_iter().map(Some).collect()
        };
        for seed in candidates {
            let basis = self.seeded_basis(seed);
            let p = FpMatrix::from_columns(3, self.dim, &basis);
            let pinv = p.inverse().expect("basis spans the module");
            let g1 = pinv.mul(&self.g1).mul(&p);
            let g2 = pinv.mul(&self.g2).mul(&p);
            let mut inertia: Vec<Vec<u8>> = self.inertia.iter().map(|v| pinv.apply(v)).collect();
            inertia.sort();
            let key = (g1.entries().to_vec(), g2.entries().to_vec(), inertia);
            if best.as_ref().map_or(true, |b| key < *b) {
                best = Some(key);
            }
        }
        let (g1, g2, inertia) = best.expect("at least one candidate");
        let out = RayClassFixture {
            g1: FpMatrix::from_row_vectors(3, self.dim, &rows(&g1, self.dim)),
            g2: FpMatrix::from_row_vectors(3, self.dim, &rows(&g2, self.dim)),
            inertia,
            ..self.clone()
        };
        out.validate()?;
        Ok(out)
    }

    fn seeded_basis(&self, seed: Option<&Vec<u8>>) -> Vec<Vec<u8>> {
        let mut span = Echelon::new(3, self.dim);
        let mut basis: Vec<Vec<u8>> = Vec::new();
        if let Some(s) = seed {
            self.spin_into(&mut span, &mut basis, s);
        }
        // complete by the vector whose cyclic extension has the largest
        // dimension and then the least action matrices on it
        while basis.len() < self.dim {
            let mut best: Option<((std::cmp::Reverse<usize>, Vec<u8>, Vec<u8>), Vec<Vec<u8>>)> = None;
            for idx in 0..3usize.pow(self.dim as u32) {
                let v = digits(idx, self.dim);
                if span.contains(&v) {
                    continue;
                }
                let (mut sp, mut b) = (span.clone(), basis.clone());
                self.spin_into(&mut sp, &mut b, &v);
                let (a1, a2) = self.restricted(&b);
                let key = (std::cmp::Reverse(b.len()), a1, a2);
                if best.as_ref().map_or(true, |(k, _)| key < *k) {
                    best = Some((key, b));
                }
            }
            let (_, b) = best.expect("a vector outside a proper subspace exists");
            for v in &b[basis.len()..] {
                span.insert(v);
            }
            basis = b;
        }
        basis
    }

    /// Appends the breadth-first spin of `v` (each vector hit by g1, then g2).
    fn spin_into(&self, span: &mut Echelon, basis: &mut Vec<Vec<u8>>, v: &[u8]) {
        let mut i = basis.len();
        if !span.insert(v) {
            return;
        }
        basis.push(v.to_vec());
        while i < basis.len() {
            for g in [&self.g1, &self.g2] {
                let w = g.apply(&basis[i]);
                if span.insert(&w) {
                    basis.push(w);
                }
            }
            i += 1;
        }
    }

    /// Entries of the two actions on the submodule spanned by `basis`, in that basis.
    fn restricted(&self, basis: &[Vec<u8>]) -> (Vec<u8>, Vec<u8>) {
        let k = basis.len();
        let mut cols = basis.to_vec();
        let mut span = Echelon::new(3, self.dim);
        for v in basis {
            span.insert(v);
        }
        for j in 0..self.dim {
            let mut e = vec![0u8; self.dim];
            e[j] = 1;
            if span.insert(&e) {
                cols.push(e);
            }
        }
        let p = FpMatrix::from_columns(3, self.dim, &cols);
        let pinv = p.inverse().expect("completed basis");
        let block = |g: &FpMatrix| {
            let c = pinv.mul(g).mul(&p);
            let mut out = Vec::with_capacity(k * k);
            for r in 0..k {
                out.extend_from_slice(&c.row(r)[..k]);
            }
            out
        };
        (block(&self.g1), block(&self.g2))
    }

    fn body(&self) -> String {
        let inertia: Vec<String> = self.inertia.iter().map(|v| join(v)).collect();
        let meta: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut s = String::new();
        s.push_str(&field("ell", &self.ell.to_string()));
        s.push_str(&field("polyK", &join(&self.poly_k)));
        s.push_str(&field("dim", &self.dim.to_string()));
        s.push_str(&field("g1", &join(self.g1.entries())));
        s.push_str(&field("g2", &join(self.g2.entries())));
        s.push_str(&field("inertia", &inertia.join(" ; ")));
        s.push_str(&field("meta", &meta.join("; ")));
        s
    }

    /// Hex SHA-256 of the serialized fields preceding the checksum line.
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.body().as_bytes()))
    }

    pub fn serialize(&self) -> String {
        let body = self.body();
        let sum = hex::encode(Sha256::digest(body.as_bytes()));
        format!("{body}{}", field("sha256", &sum))
    }

    /// Parses and validates a fixture. The text must be byte-identical to what
    /// [`serialize`](Self::serialize) would produce.
    pub fn parse(text: &str) -> Result<Self, BridgeError> {
        let perr = |s: String| BridgeError::Parse(s);
        let lines: Vec<&str> = text.split_inclusive('\n').collect();
        if lines.len() != KEYS.len() {
            return Err(perr(format!("expected {} lines, found {}", KEYS.len(), lines.len())));
        }
        let mut values = Vec::with_capacity(KEYS.len());
        for (line, key) in lines.iter().zip(KEYS) {
            let rest = line
                .strip_suffix('\n')
                .and_then(|l| l.strip_prefix(key))
                .and_then(|l| l.strip_prefix(':'))
                .ok_or_else(|| perr(format!("expected a {key} line, found {:?}", line.trim_end())))?;
            values.push(rest.strip_prefix(' ').unwrap_or(rest));
        }
        let body_len: usize = lines[..KEYS.len() - 1].iter().map(|l| l.len()).sum();
        let found = hex::encode(Sha256::digest(&text.as_bytes()[..body_len]));
        if found != values[7] {
            return Err(BridgeError::Checksum {
                expected: values[7].to_string(),
                found,
            });
        }
        let one = |s: &str, what: &str| -> Result<u64, BridgeError> {
            s.parse().map_err(|_| perr(format!("{what} is not an integer: {s:?}")))
        };
        let ell = one(values[0], "ell")?;
        let poly_k = parse_ints::<i64>(values[1])?;
        let dim = one(values[2], "dim")? as usize;
        let matrix = |s: &str, name: &str| -> Result<FpMatrix, BridgeError> {
            let xs = parse_ints::<u8>(s)?;
            if xs.len() != dim * dim || xs.iter().any(|&x| x > 2) {
                return Err(perr(format!("{name} needs {} residues mod 3", dim * dim)));
            }
            Ok(FpMatrix::from_row_vectors(3, dim, &rows(&xs, dim)))
        };
        let g1 = matrix(values[3], "g1")?;
        let g2 = matrix(values[4], "g2")?;
        let inertia = if values[5].is_empty() {
            Vec::new()
        } else {
            values[5].split(" ; ").map(parse_ints::<u8>).collect::<Result<Vec<_>, _>>()?
        };
        let mut meta = BTreeMap::new();
        if !values[6].is_empty() {
            for item in values[6].split("; ") {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| perr(format!("meta item {item:?} lacks '='")))?;
                meta.insert(k.to_string(), v.to_string());
            }
        }
        let f = RayClassFixture { ell, poly_k, dim, g1, g2, inertia, meta };
        if f.serialize() != text {
            return Err(perr("fixture text is not in canonical form".into()));
        }
        f.validate()?;
        Ok(f)
    }

    /// `rayclass-<ell>-<first 16 hex digits of the checksum>.txt`
    pub fn file_name(&self) -> String {
        format!("rayclass-{}-{}.txt", self.ell, &self.sha256()[..16])
    }
}

fn digits(mut idx: usize, dim: usize) -> Vec<u8> {
    let mut v = vec![0u8; dim];
    for x in v.iter_mut().rev() {
        *x = (idx % 3) as u8;
        idx /= 3;
    }
    v
}

fn rows(entries: &[u8], dim: usize) -> Vec<Vec<u8>> {
    if dim == 0 {
        return Vec::new();
    }
    entries.chunks(dim).map(<[u8]>::to_vec).collect()
}

/// Order of the matrix group generated by `a` and `b`, or `None` past 12.
fn generated_order(a: &FpMatrix, b: &FpMatrix) -> Option<usize> {
    let id = FpMatrix::identity(3, a.rows());
    let mut seen: HashSet<Vec<u8>> = HashSet::from([id.entries().to_vec()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in [a, b] {
            let y = x.mul(g);
            if seen.insert(y.entries().to_vec()) {
                if seen.len() > 12 {
                    return None;
                }
                frontier.push(y);
            }
        }
    }
    Some(seen.len())
}

/// Writes `f` under its content-derived name with an atomic rename. Writing
/// the same fixture twice returns the same path and leaves the file alone.
pub fn record_fixture(f: &RayClassFixture, store: &Path) -> Result<PathBuf, BridgeError> {
    f.validate()?;
    fs::create_dir_all(store)?;
    let path = store.join(f.file_name());
    let text = f.serialize();
    if let Ok(existing) = fs::read_to_string(&path) {
        if existing == text {
            return Ok(path);
        }
    }
    let tmp = store.join(format!(".{}.{}.tmp", f.file_name(), std::process::id()));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(text.as_bytes())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Loads the single fixture stored for `ell`.
pub fn load_fixture(ell: u64, store: &Path) -> Result<RayClassFixture, BridgeError> {
    let prefix = format!("rayclass-{ell}-");
    let mut hits: Vec<PathBuf> = match fs::read_dir(store) {
        Ok(entries) => entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with(&prefix) && n.ends_with(".txt"))
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    hits.sort();
    let path = match hits.as_slice() {
        [] => return Err(BridgeError::MissingFixture(store.join(format!("{prefix}<sha256>.txt")))),
        [p] => p.clone(),
        _ => return Err(BridgeError::AmbiguousFixture { ell, paths: hits }),
    };
    let text = fs::read_to_string(&path)?;
    let f = RayClassFixture::parse(&text).map_err(|e| BridgeError::InFile {
        path: path.clone(),
        source: Box::new(e),
    })?;
    if f.ell != ell {
        return Err(BridgeError::Invariant {
            ell,
            detail: format!("{} holds data for ell = {}", path.display(), f.ell),
        });
    }
    Ok(f)
}
