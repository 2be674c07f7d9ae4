//! Data for the ray class conditions: the A_4 field `K`, the 3-elementary ray
//! class module of `K` with modulus supported on {3, ell} and its inertia
//! images, obtained from a computer-algebra backend or a fixture store.

use std::collections::BTreeMap;
use std::path::PathBuf;

use tetra_core::linalg::FpMatrix;
use tetra_core::rep::{ad0_multiplicity_of_quotient, decompose, RepError};
use thiserror::Error;

pub mod backend;
pub mod fixture;

pub use backend::{class_number, BackendConfig, BackendRequest, Block, Task};
pub use fixture::{load_fixture, record_fixture, RayClassFixture};

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("backend timed out after {secs} s for ell = {ell}")]
    Timeout { ell: u64, secs: u64 },
    #[error("backend failed for ell = {ell} ({status}): {detail}")]
    BackendFailed { ell: u64, status: String, detail: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violated for ell = {ell}: {detail}")]
    Invariant { ell: u64, detail: String },
    #[error("checksum mismatch: file says {expected}, contents hash to {found}")]
    Checksum { expected: String, found: String },
    #[error("missing fixture: {}", .0.display())]
    MissingFixture(PathBuf),
    #[error("several fixtures for ell = {ell}: {paths:?}")]
    AmbiguousFixture { ell: u64, paths: Vec<PathBuf> },
    #[error("{}: {source}", path.display())]
    InFile { path: PathBuf, source: Box<BridgeError> },
    #[error("ray class data for ell = {ell} is not stable under raising the modulus: {detail}")]
    Unstable { ell: u64, detail: String },
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BridgeError {
    /// The innermost error, past file-location wrappers.
    pub fn root(&self) -> &BridgeError {
        match self {
            BridgeError::InFile { source, .. } => source.root(),
            e => e,
        }
    }
}

#[derive(Clone, Debug)]
pub enum FetchMode {
    Live(BackendConfig),
    Fixture(PathBuf),
}

/// Ray class data for `ell`, validated and in canonical basis.
pub fn fetch_rayclass(ell: u64, mode: &FetchMode) -> Result<RayClassFixture, BridgeError> {
    match mode {
        FetchMode::Fixture(dir) => load_fixture(ell, dir),
        FetchMode::Live(config) => fetch_live(ell, config),
    }
}

fn fetch_live(ell: u64, config: &BackendConfig) -> Result<RayClassFixture, BridgeError> {
    let req = BackendRequest { ell, task: Task::RayClass };
    let block = backend::run(config, &req)?;
    let poly_k = backend::parse_ints::<i64>(block.get("polyK")?)?;
    let backend_id = block.get("backend")?.to_string();
    let mut modules = Vec::new();
    for child in block.children.iter().filter(|c| c.name == "module") {
        let e: u32 = child
            .get("modulus_exponent")?
            .parse()
            .map_err(|_| BridgeError::Parse("bad modulus_exponent".into()))?;
        let dim: usize = child
            .get("dim")?
            .parse()
            .map_err(|_| BridgeError::Parse("bad dim".into()))?;
        let matrix = |key: &str| -> Result<FpMatrix, BridgeError> {
            let xs = backend::parse_ints::<i64>(child.get(key)?)?;
            if xs.len() != dim * dim {
                return Err(BridgeError::Parse(format!("{key} has {} entries, dim is {dim}", xs.len())));
            }
            let rows: Vec<&[i64]> = if dim == 0 { Vec::new() } else { xs.chunks(dim).collect() };
            Ok(FpMatrix::from_rows(3, &rows).unwrap_or_else(|_| FpMatrix::zeros(3, 0, 0)))
        };
        let inertia = child
            .get("inertia")?
            .split(';')
            .map(|v| {
                backend::parse_ints::<i64>(v)
                    .map(|xs| xs.into_iter().map(|x| x.rem_euclid(3) as u8).collect::<Vec<u8>>())
            })
            .collect::<Result<Vec<_>, _>>()?;
        let meta = BTreeMap::from([
            ("backend".to_string(), backend_id.clone()),
            ("modulus".to_string(), format!("3^{e}*rad({ell})")),
            ("script_sha256".to_string(), req.script_hash()),
        ]);
        let f = RayClassFixture {
            ell,
            poly_k: poly_k.clone(),
            dim,
            g1: matrix("g1")?,
            g2: matrix("g2")?,
            inertia,
            meta,
        };
        modules.push((e, f.normalize()?));
    }
    modules.sort_by_key(|(e, _)| *e);
    let exps: Vec<u32> = modules.iter().map(|(e, _)| *e).collect();
    if exps != backend::MODULUS_EXPONENTS {
        return Err(BridgeError::Parse(format!(
            "expected modules for exponents {:?}, got {exps:?}",
            backend::MODULUS_EXPONENTS
        )));
    }
    let (_, mut low) = modules.remove(0);
    let (e_high, high) = modules.remove(0);
    let a = (low.dim, condition3_and_4(&low)?);
    let b = (high.dim, condition3_and_4(&high)?);
    if a != b {
        return Err(BridgeError::Unstable {
            ell,
            detail: format!("(dim, (m, n, ram_ok)) = {a:?} at the recorded modulus, {b:?} at 3^{e_high}*rad"),
        });
    }
    low.meta
        .insert("stable_at".to_string(), format!("3^{e_high}*rad({ell})"));
    low.validate()?;
    Ok(low)
}

/// `(m, n, ram_ok)`: the Ad^0-multiplicity of the ray class module `V`, the
/// dimension of its complement, and whether `V / W` has no Ad^0 quotient,
/// `W` being the submodule generated by the inertia vectors.
pub fn condition3_and_4(f: &RayClassFixture) -> Result<(usize, usize, bool), BridgeError> {
    f.validate()?;
    let v = f.module();
    let d = decompose(&v)?;
    let w = v.spin(&f.inertia);
    let ram_ok = ad0_multiplicity_of_quotient(&v, &w)? == 0;
    Ok((d.m, d.n, ram_ok))
}

/// Whether the Ad^0-free complement of the ray class module carries the
/// trivial action. It always has trivial composition factors only, but need
/// not be a direct sum of trivial modules.
pub fn complement_has_trivial_action(f: &RayClassFixture) -> Result<bool, BridgeError> {
    Ok(decompose(&f.module())?.complement_trivial_action)
}
