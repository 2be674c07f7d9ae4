//! Per-place Selmer dimension records and the Wiles difference
//! `dim Sel - dim Sel* = h0 - h0* + sum_v (dim N_v - dim H^0(G_v, M))`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cohomology::{
    archimedean_cohomology, local_at_3_report, tame_ad0, tame_local_cohomology, unramified_h1,
    CohomologyError,
};
use crate::group::{Mat2, TameLocalDatum};
use crate::linalg::FpMatrix;
use crate::rep::{ad0_a4, is_irreducible, GModule, Irreducibility};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerError {
    #[error("local condition at {place} has dimension {dim_n} > dim H^1 = {dim_h1}")]
    ConditionTooLarge { place: Place, dim_n: usize, dim_h1: usize },
    #[error("ledger places must be exactly ell, 3 and infinity: {0}")]
    Places(String),
    #[error("global H^0 terms need irreducibility certificates: {0}")]
    Guard(String),
    #[error("ledger is not balanced (difference {0})")]
    Unbalanced(i64),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("cannot parse ledger record: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Ell(u64),
    Three,
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Ell(l) => write!(f, "{l}"),
            Place::Three => write!(f, "3"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Place {
    type Err = LedgerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "3" => Ok(Place::Three),
            "inf" => Ok(Place::Infinity),
            _ => s
                .parse()
                .map(Place::Ell)
                .map_err(|_| LedgerError::Parse(format!("bad place {s:?}"))),
        }
    }
}

/// Dimensions attached to one place of S.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceRecord {
    pub place: Place,
    pub dim_n: usize,
    pub dim_h0: usize,
    pub dim_h0_dual: usize,
    pub dim_h1: Option<usize>,
    /// Which computation produced the numbers.
    pub provenance: String,
}

impl PlaceRecord {
    pub fn new(
        place: Place,
        dim_n: usize,
        dim_h0: usize,
        dim_h0_dual: usize,
        dim_h1: Option<usize>,
        provenance: impl Into<String>,
    ) -> Result<Self, LedgerError> {
        if let Some(h1) = dim_h1 {
            if dim_n > h1 {
                return Err(LedgerError::ConditionTooLarge {
                    place,
                    dim_n,
                    dim_h1: h1,
                });
            }
        }
        Ok(PlaceRecord {
            place,
            dim_n,
            dim_h0,
            dim_h0_dual,
            dim_h1,
            provenance: provenance.into(),
        })
    }

    pub fn local_term(&self) -> i64 {
        self.dim_n as i64 - self.dim_h0 as i64
    }
}

/// The records for S = {ell, 3, infinity} and the global H^0 terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalSetting {
    records: Vec<PlaceRecord>,
    h0_global: usize,
    h0_global_dual: usize,
}

fn check_places(records: &[PlaceRecord]) -> Result<(), LedgerError> {
    let ells = records.iter().filter(|r| matches!(r.place, Place::Ell(_))).count();
    let threes = records.iter().filter(|r| r.place == Place::Three).count();
    let infs = records.iter().filter(|r| r.place == Place::Infinity).count();
    if (ells, threes, infs) != (1, 1, 1) || records.len() != 3 {
        let names: Vec<String> = records.iter().map(|r| r.place.to_string()).collect();
        return Err(LedgerError::Places(names.join(", ")));
    }
    Ok(())
}

impl GlobalSetting {
    pub fn new(
        records: Vec<PlaceRecord>,
        h0_global: usize,
        h0_global_dual: usize,
    ) -> Result<Self, LedgerError> {
        check_places(&records)?;
        let mut records = records;
        records.sort_by_key(|r| r.place);
        Ok(GlobalSetting {
            records,
            h0_global,
            h0_global_dual,
        })
    }

    /// Global H^0 terms set to zero, which requires both the module and its
    /// dual twist to be irreducible of dimension > 1.
    pub fn with_irreducible_globals(
        records: Vec<PlaceRecord>,
        module: &Irreducibility,
        dual: &Irreducibility,
    ) -> Result<Self, LedgerError> {
        for (name, cert) in [("module", module), ("dual twist", dual)] {
            match cert {
                Irreducibility::Irreducible(c) if c.dim > 1 => {}
                Irreducibility::Irreducible(_) => {
                    return Err(LedgerError::Guard(format!("{name} is one-dimensional")))
                }
                Irreducibility::Reducible(_) => {
                    return Err(LedgerError::Guard(format!("{name} is reducible")))
                }
            }
        }
        Self::new(records, 0, 0)
    }

    pub fn records(&self) -> &[PlaceRecord] {
        &self.records
    }

    pub fn record(&self, place: Place) -> Option<&PlaceRecord> {
        self.records.iter().find(|r| r.place == place)
    }

    pub fn ell(&self) -> u64 {
        self.records
            .iter()
            .find_map(|r| match r.place {
                Place::Ell(l) => Some(l),
                _ => None,
            })
            .expect("validated")
    }

    pub fn h0_global(&self) -> usize {
        self.h0_global
    }

    pub fn h0_global_dual(&self) -> usize {
        self.h0_global_dual
    }

    /// Same setting with the record at `place` replaced.
    pub fn replace(&self, record: PlaceRecord) -> Result<Self, LedgerError> {
        let mut records: Vec<PlaceRecord> =
            self.records.iter().filter(|r| r.place != record.place).cloned().collect();
        records.push(record);
        Self::new(records, self.h0_global, self.h0_global_dual)
    }
}

/// `sum_v (dim N_v - dim H^0(G_v, M))` over any set of records.
pub fn local_terms(records: &[PlaceRecord]) -> i64 {
    records.iter().map(PlaceRecord::local_term).sum()
}

pub fn wiles_difference(g: &GlobalSetting) -> i64 {
    g.h0_global as i64 - g.h0_global_dual as i64 + local_terms(&g.records)
}

pub fn check_balanced(g: &GlobalSetting) -> bool {
    wiles_difference(g) == 0
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankZero {
    RankZero { inference: String },
    NotRankZero(String),
}

/// Rank-zero verdict from a balanced ledger and the ramification test on the
/// adjoint summands of the ray class module. `ram_ok = None` stands for a
/// test that was not applicable.
pub fn rank_zero_certificate(
    g: &GlobalSetting,
    m: usize,
    ram_ok: Option<bool>,
) -> Result<RankZero, LedgerError> {
    let diff = wiles_difference(g);
    if diff != 0 {
        return Err(LedgerError::Unbalanced(diff));
    }
    Ok(match (m, ram_ok) {
        (0, _) => RankZero::NotRankZero("condition (3) fails".into()),
        (_, Some(true)) => RankZero::RankZero {
            inference: format!(
                "balanced with Selmer group 0 at ell = {}: every adjoint class is ramified at ell, \
                 so the deformation ring with these local conditions is Z_3",
                g.ell()
            ),
        },
        (_, Some(false)) => RankZero::NotRankZero("unramified adjoint extension exists".into()),
        (_, None) => RankZero::NotRankZero("ramification test not run".into()),
    })
}

/// Frobenius image at 3 used for the canonical ledger (order 4).
pub fn default_frobenius_at_3() -> Mat2 {
    Mat2::new(1, 0, -1, 1, 0)
}

/// Ad^0 on (g1, g2, complex conjugation) with conjugation acting trivially,
/// and its dual twist by the cyclotomic character (trivial on g1, g2 and -1
/// on conjugation). Used to certify the global H^0 terms.
pub fn global_modules() -> (GModule, GModule) {
    let ad = ad0_a4();
    let mut actions = ad.actions().to_vec();
    actions.push(FpMatrix::identity(3, 3));
    let m = GModule::new(3, actions).expect("invertible");
    let dual = m.dual_twist(&[1, 1, 2]).expect("units");
    (m, dual)
}

/// The ledger assembled from the local cohomology computations: unramified
/// condition at ell, full H^1 at 3, zero condition at infinity.
pub fn canonical_ledger(ell: u64) -> Result<GlobalSetting, LedgerError> {
    let datum = TameLocalDatum::residual(ell).map_err(|e| {
        LedgerError::Cohomology(CohomologyError::TameRelation(e.to_string()))
    })?;
    let m = tame_ad0(&datum);
    let tame = tame_local_cohomology(&datum, &m)?;
    let unr = unramified_h1(&datum, &m)?;
    let ell_rec = PlaceRecord::new(
        Place::Ell(ell),
        unr.dim,
        tame.h0,
        tame.h2.expect("tame degree 2"),
        Some(tame.h1),
        "tame complex; condition = unramified classes M^tau/(sigma-1)M^tau",
    )?;
    let frob = default_frobenius_at_3();
    let at3 = local_at_3_report(&frob)?;
    let three_rec = PlaceRecord::new(
        Place::Three,
        at3.dim_n,
        at3.h0,
        at3.h0_dual,
        Some(at3.h1),
        format!("unramified at 3, Frobenius {frob}; h2 = 0 by duality, h1 - h0 = 3 by Euler characteristic"),
    )?;
    let arch = archimedean_cohomology(&FpMatrix::identity(3, 3))?;
    let inf_rec = PlaceRecord::new(
        Place::Infinity,
        0,
        arch.h0,
        arch.h0,
        Some(arch.h1),
        "Z/2 cohomology, complex conjugation acting trivially (even)",
    )?;
    let (gm, gdual) = global_modules();
    GlobalSetting::with_irreducible_globals(
        vec![ell_rec, three_rec, inf_rec],
        &is_irreducible(&gm),
        &is_irreducible(&gdual),
    )
}

/// The canonical ledger with the condition at ell enlarged to all of H^1.
pub fn full_h1_at_ell_ledger(ell: u64) -> Result<GlobalSetting, LedgerError> {
    let g = canonical_ledger(ell)?;
    let rec = g.record(Place::Ell(ell)).expect("ell record").clone();
    let h1 = rec.dim_h1.expect("computed");
    g.replace(PlaceRecord {
        dim_n: h1,
        provenance: "tame complex; condition = all of H^1".into(),
        ..rec
    })
}

/// Fixed-width table, one row per place.
pub fn emit_table(g: &GlobalSetting) -> String {
    let mut out = format!(
        "{:<6} {:>5} {:>5} {:>8} {:>5}  provenance\n",
        "place", "N", "h0", "h0_dual", "h1"
    );
    for r in &g.records {
        out.push_str(&format!(
            "{:<6} {:>5} {:>5} {:>8} {:>5}  {}\n",
            r.place.to_string(),
            r.dim_n,
            r.dim_h0,
            r.dim_h0_dual,
            r.dim_h1.map_or("-".to_string(), |h| h.to_string()),
            r.provenance
        ));
    }
    out.push_str(&format!(
        "global h0 = {}, h0_dual = {}, difference = {}\n",
        g.h0_global,
        g.h0_global_dual,
        wiles_difference(g)
    ));
    out
}

/// One `key=value` line per place plus a line for the global terms.
pub fn emit_structured(g: &GlobalSetting) -> String {
    let mut out = String::new();
    for r in &g.records {
        out.push_str(&format!(
            "place={} dim_n={} dim_h0={} dim_h0_dual={} dim_h1={} provenance={:?}\n",
            r.place,
            r.dim_n,
            r.dim_h0,
            r.dim_h0_dual,
            r.dim_h1.map_or("-".to_string(), |h| h.to_string()),
            r.provenance
        ));
    }
    out.push_str(&format!(
        "global h0={} h0_dual={}\n",
        g.h0_global, g.h0_global_dual
    ));
    out
}

/// Inverse of `emit_structured`.
pub fn parse_structured(text: &str) -> Result<GlobalSetting, LedgerError> {
    let bad = |m: &str| LedgerError::Parse(m.to_string());
    let mut records = Vec::new();
    let mut globals = None;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        if let Some(rest) = line.strip_prefix("global ") {
            let mut it = rest.split_whitespace();
            let h0 = it.next().and_then(|s| s.strip_prefix("h0=")).ok_or_else(|| bad(line))?;
            let hd = it.next().and_then(|s| s.strip_prefix("h0_dual=")).ok_or_else(|| bad(line))?;
            globals = Some((
                h0.parse().map_err(|_| bad(line))?,
                hd.parse().map_err(|_| bad(line))?,
            ));
            continue;
        }
        let (head, prov) = line.split_once(" provenance=").ok_or_else(|| bad(line))?;
        let provenance = unquote(prov).ok_or_else(|| bad(line))?;
        let mut fields = std::collections::HashMap::new();
        for kv in head.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(line))?;
            fields.insert(k, v);
        }
        let num = |k: &str| -> Result<usize, LedgerError> {
            fields.get(k).ok_or_else(|| bad(line))?.parse().map_err(|_| bad(line))
        };
        let dim_h1 = match *fields.get("dim_h1").ok_or_else(|| bad(line))? {
            "-" => None,
            s => Some(s.parse().map_err(|_| bad(line))?),
        };
        records.push(PlaceRecord::new(
            fields.get("place").ok_or_else(|| bad(line))?.parse()?,
            num("dim_n")?,
            num("dim_h0")?,
            num("dim_h0_dual")?,
            dim_h1,
            provenance,
        )?);
    }
    let (h0, hd) = globals.ok_or_else(|| bad("missing global line"))?;
    GlobalSetting::new(records, h0, hd)
}

/// Reverses Rust's `{:?}` quoting of a string.
pub fn unquote(s: &str) -> Option<String> {
    let inner = s.strip_prefix('"')?.strip_suffix('"')?;
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next()? {
                'n' => out.push('\n'),
                't' => out.push('\t'),
                'r' => out.push('\r'),
                '\\' => out.push('\\'),
                '"' => out.push('"'),
                '\'' => out.push('\''),
                '0' => out.push('\0'),
                'u' => {
                    if chars.next()? != '{' {
                        return None;
                    }
                    let hex: String = chars.by_ref().take_while(|&c| c != '}').collect();
                    out.push(char::from_u32(u32::from_str_radix(&hex, 16).ok()?)?);
                }
                _ => return None,
            }
        } else {
            out.push(c);
        }
    }
    Some(out)
}
