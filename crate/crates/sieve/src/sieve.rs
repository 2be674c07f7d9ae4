//! The four conditions, evaluated prime by prime.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use tetra_bridge::{
    class_number, complement_has_trivial_action, condition3_and_4, fetch_rayclass, record_fixture, BackendConfig, BridgeError, FetchMode,
};
use tetra_core::arith::primes_up_to;
use tetra_core::selmer::{canonical_ledger, rank_zero_certificate, wiles_difference, RankZero};
use tetra_cubic::{condition2, period_polynomial, shanks_classify, Shanks};
use thiserror::Error;

/// Where the evaluation of a prime stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// Failed condition `k` (1 to 4).
    Failed(u8),
    Passed,
    /// Passed conditions 1 and 2, but no ray class data is available.
    PendingBackend,
    Error,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Failed(k) => write!(f, "failed-{k}"),
            Stage::Passed => f.write_str("passed"),
            Stage::PendingBackend => f.write_str("pending-backend"),
            Stage::Error => f.write_str("error"),
        }
    }
}

impl FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "passed" => Ok(Stage::Passed),
            "pending-backend" => Ok(Stage::PendingBackend),
            "error" => Ok(Stage::Error),
            _ => match s.strip_prefix("failed-").and_then(|k| k.parse::<u8>().ok()) {
                Some(k @ 1..=4) => Ok(Stage::Failed(k)),
                _ => Err(format!("unknown stage {s:?}")),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveReport {
    pub ell: u64,
    /// Outcome of conditions 1 to 4; `None` when not evaluated.
    pub passed: [Option<bool>; 4],
    pub h_l: Option<u64>,
    /// Invariant factors of the class group of the cubic field.
    pub class_group: Vec<u64>,
    /// `None` unless `ell = 1 mod 3`.
    pub shanks: Option<Shanks>,
    /// F_3-dimension of the ray class module.
    pub ray_dim: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub ram_ok: Option<bool>,
    /// Wiles difference of the canonical ledger; 0 means balanced.
    pub balance: Option<i64>,
    pub certificate: Option<RankZero>,
    pub verdict: bool,
    pub stage: Stage,
    /// Error or pending message.
    pub note: Option<String>,
}

impl SieveReport {
    fn new(ell: u64) -> Self {
        SieveReport {
            ell,
            passed: [None; 4],
            h_l: None,
            class_group: Vec::new(),
            shanks: None,
            ray_dim: None,
            m: None,
            n: None,
            ram_ok: None,
            balance: None,
            certificate: None,
            verdict: false,
            stage: Stage::Error,
            note: None,
        }
    }

    fn error(mut self, msg: impl Into<String>) -> Self {
        self.stage = Stage::Error;
        self.verdict = false;
        self.note = Some(msg.into());
        self
    }

    /// Passed conditions 1 and 2.
    pub fn in_lambda_bar(&self) -> bool {
        self.passed[0] == Some(true) && self.passed[1] == Some(true)
    }
}

#[derive(Clone, Debug)]
pub enum Mode {
    Fixtures(PathBuf),
    /// Query the backend; optionally record what it returns.
    Live { backend: BackendConfig, record: Option<PathBuf> },
}

#[derive(Clone, Debug)]
pub struct SieveOptions {
    pub max: u64,
    pub mode: Mode,
    pub jobs: usize,
    /// Compare every class group with the backend's.
    pub cross_check: Option<BackendConfig>,
}

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Reports for every prime `<= max`, ascending.
pub fn run_sieve(opts: &SieveOptions) -> Result<Vec<SieveReport>, SieveError> {
    let primes = primes_up_to(opts.max);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| SieveError::Pool(e.to_string()))?;
    Ok(pool.install(|| primes.par_iter().map(|&ell| evaluate_prime(ell, opts)).collect()))
}

/// Runs conditions 1 to 4 on one prime, stopping at the first failure.
/// Errors stay inside the report.
pub fn evaluate_prime(ell: u64, opts: &SieveOptions) -> SieveReport {
    let mut r = SieveReport::new(ell);
    let c1 = ell % 3 == 1;
    r.passed[0] = Some(c1);
    if !c1 {
        r.stage = Stage::Failed(1);
        return r;
    }
    r.shanks = Some(shanks_classify(ell));
    let field = match period_polynomial(ell) {
        Ok(f) => f,
        Err(e) => return r.error(format!("cubic field: {e}")),
    };
    let (even, cg) = match condition2(&field) {
        Ok(x) => x,
        Err(e) => return r.error(format!("class group: {e}")),
    };
    r.h_l = Some(cg.h);
    r.class_group = cg.invariants.clone();
    if let Some(backend) = &opts.cross_check {
        match class_number(backend, ell) {
            Ok((h, cyc)) => {
                let mut ours: Vec<u64> = cg.invariants.iter().copied().filter(|&d| d > 1).collect();
                let mut theirs: Vec<u64> = cyc.into_iter().filter(|&d| d > 1).collect();
                ours.sort_unstable();
                theirs.sort_unstable();
                if h != cg.h || ours != theirs {
                    return r.error(format!(
                        "class group mismatch: computed h = {} {:?}, backend h = {h} {theirs:?}",
                        cg.h, ours
                    ));
                }
            }
            Err(e) => return r.error(format!("cross-check: {e}")),
        }
    }
    r.passed[1] = Some(even);
    if !even {
        r.stage = Stage::Failed(2);
        return r;
    }
    let fetched = match &opts.mode {
        Mode::Fixtures(dir) => fetch_rayclass(ell, &FetchMode::Fixture(dir.clone())),
        Mode::Live { backend, record } => fetch_rayclass(ell, &FetchMode::Live(backend.clone())).and_then(|f| {
            if let Some(dir) = record {
                record_fixture(&f, dir)?;
            }
            Ok(f)
        }),
    };
    let fixture = match fetched {
        Ok(f) => f,
        Err(e @ BridgeError::MissingFixture(_)) => {
            r.stage = Stage::PendingBackend;
            r.note = Some(e.to_string());
            return r;
        }
        Err(e) => return r.error(format!("ray class data: {e}")),
    };
    let (m, n, ram_ok) = match condition3_and_4(&fixture) {
        Ok(x) => x,
        Err(e) => return r.error(format!("ray class module: {e}")),
    };
    match complement_has_trivial_action(&fixture) {
        Ok(true) => {}
        Ok(false) => r.note = Some(format!("complement of dimension {n} has nontrivial action")),
        Err(e) => return r.error(format!("ray class module: {e}")),
    }
    r.ray_dim = Some(fixture.dim);
    r.m = Some(m);
    r.n = Some(n);
    r.ram_ok = Some(ram_ok);
    let ledger = match canonical_ledger(ell) {
        Ok(g) => g,
        Err(e) => return r.error(format!("ledger: {e}")),
    };
    r.balance = Some(wiles_difference(&ledger));
    match rank_zero_certificate(&ledger, m, (m > 0).then_some(ram_ok)) {
        Ok(c) => r.certificate = Some(c),
        Err(e) => return r.error(format!("rank-zero certificate: {e}")),
    }
    r.passed[2] = Some(m >= 1);
    if m == 0 {
        r.stage = Stage::Failed(3);
        return r;
    }
    r.passed[3] = Some(ram_ok);
    if !ram_ok {
        r.stage = Stage::Failed(4);
        return r;
    }
    r.stage = Stage::Passed;
    r.verdict = true;
    let certified = r.balance == Some(0) && matches!(r.certificate, Some(RankZero::RankZero { .. }));
    if !certified {
        return r.error("member of the list without a balanced rank-zero certificate");
    }
    r
}

/// Counts and lists drawn from a set of reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub primes: usize,
    /// Primes passing condition 1.
    pub candidates: usize,
    pub lambda_bar: Vec<u64>,
    pub lambda: Vec<u64>,
    pub pending: Vec<u64>,
    pub errors: Vec<u64>,
}

impl Summary {
    pub fn of(reports: &[SieveReport]) -> Self {
        let pick = |f: &dyn Fn(&SieveReport) -> bool| -> Vec<u64> {
            reports.iter().filter(|r| f(r)).map(|r| r.ell).collect()
        };
        Summary {
            primes: reports.len(),
            candidates: reports.iter().filter(|r| r.passed[0] == Some(true)).count(),
            lambda_bar: pick(&|r| r.in_lambda_bar()),
            lambda: pick(&|r| r.verdict),
            pending: pick(&|r| r.stage == Stage::PendingBackend),
            errors: pick(&|r| r.stage == Stage::Error),
        }
    }

    /// Observed proportion of members among the candidates. Only a count;
    /// nothing is claimed about limiting densities.
    pub fn density_line(&self) -> String {
        let frac = if self.candidates == 0 {
            0.0
        } else {
            self.lambda.len() as f64 / self.candidates as f64
        };
        format!(
            "{} of {} primes = 1 mod 3 ({:.4}; observed only, no asymptotic claim)",
            self.lambda.len(),
            self.candidates,
            frac
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(max: u64, dir: PathBuf) -> SieveOptions {
        SieveOptions {
            max,
            mode: Mode::Fixtures(dir),
            jobs: 2,
            cross_check: None,
        }
    }

    fn shipped() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
    }

    #[test]
    fn small_range_is_empty() {
        let reports = run_sieve(&opts(100, shipped())).unwrap();
        let s = Summary::of(&reports);
        assert!(s.lambda.is_empty());
        assert_eq!(reports.len(), primes_up_to(100).len());
        assert!(reports.windows(2).all(|w| w[0].ell < w[1].ell));
        assert_eq!(reports[0].stage, Stage::Failed(1));
        let r7 = reports.iter().find(|r| r.ell == 7).unwrap();
        assert_eq!((r7.stage, r7.h_l), (Stage::Failed(2), Some(1)));
    }

    #[test]
    fn third_member_is_349() {
        let reports = run_sieve(&opts(350, shipped())).unwrap();
        let s = Summary::of(&reports);
        assert_eq!(s.lambda, vec![163, 277, 349]);
        for r in reports.iter().filter(|r| r.verdict) {
            assert_eq!(r.balance, Some(0));
            assert!(matches!(r.certificate, Some(RankZero::RankZero { .. })));
        }
        let shanks = |ell: u64| reports.iter().find(|r| r.ell == ell).unwrap().shanks;
        assert_eq!(shanks(163), Some(Shanks::Shanks(11)));
        assert_eq!(shanks(277), Some(Shanks::NotShanks));
        assert_eq!(shanks(349), Some(Shanks::Shanks(17)));
    }

    #[test]
    fn missing_fixtures_are_pending() {
        let dir = tempfile::tempdir().unwrap();
        let reports = run_sieve(&opts(300, dir.path().to_path_buf())).unwrap();
        let s = Summary::of(&reports);
        assert_eq!(s.pending, vec![163, 277]);
        assert!(s.lambda.is_empty());
        assert_eq!(s.lambda_bar, vec![163, 277]);
        let r = reports.iter().find(|r| r.ell == 163).unwrap();
        assert!(r.note.as_deref().unwrap().contains("rayclass-163-"));
    }

    #[test]
    fn broken_fixture_is_localized() {
        let dir = tempfile::tempdir().unwrap();
        for entry in std::fs::read_dir(shipped()).unwrap() {
            let p = entry.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&p).unwrap();
            let text = if name.starts_with("rayclass-163-") { text.replacen("dim: 6", "dim: 7", 1) } else { text };
            std::fs::write(dir.path().join(name), text).unwrap();
        }
        let reports = run_sieve(&opts(300, dir.path().to_path_buf())).unwrap();
        let s = Summary::of(&reports);
        assert_eq!(s.errors, vec![163]);
        assert_eq!(s.lambda, vec![277]);
        assert!(reports.iter().find(|r| r.ell == 163).unwrap().note.as_deref().unwrap().contains("checksum"));
    }

    #[test]
    fn stage_names_round_trip() {
        for s in [Stage::Failed(1), Stage::Failed(4), Stage::Passed, Stage::PendingBackend, Stage::Error] {
            assert_eq!(s.to_string().parse::<Stage>().unwrap(), s);
        }
        assert!("failed-5".parse::<Stage>().is_err());
    }

    #[test]
    fn density_line_makes_no_claim() {
        let s = Summary {
            primes: 10,
            candidates: 4,
            lambda_bar: vec![],
            lambda: vec![163],
            pending: vec![],
            errors: vec![],
        };
        assert!(s.density_line().starts_with("1 of 4 primes"));
        assert!(s.density_line().contains("0.2500"));
    }
}
