//! Table, CSV and structured-text forms of a sieve run.
//!
//! Structured text is line based:
//!
//! ```text
//! tetrasieve-report 1
//! max=350
//! meta key="value"
//! prime ell=163 c=yyyy h_L=4 class_group=2,2 shanks=11 ray_dim=6 m=1 n=3 ram_ok=y balance=0 verdict=in stage=passed certificate=rank-zero:"..." note=-
//! ```
//!
//! `c` lists conditions 1 to 4 as `y`, `n` or `-` (not evaluated). Missing
//! values are written `-`; strings are quoted as Rust string literals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use tetra_core::selmer::{unquote, RankZero};
use tetra_cubic::Shanks;
use thiserror::Error;

use crate::sieve::{SieveReport, Stage, Summary};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveRun {
    pub max: u64,
    /// Settings and where each came from.
    pub meta: BTreeMap<String, String>,
    pub reports: Vec<SieveReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    StructuredText,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("unknown format {0:?} (expected table, csv or structured-text)")]
    UnknownFormat(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl FromStr for Format {
    type Err = ReportError;
    fn from_str(s: &str) -> Result<Self, ReportError> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "structured-text" => Ok(Format::StructuredText),
            _ => Err(ReportError::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Table => "table",
            Format::Csv => "csv",
            Format::StructuredText => "structured-text",
        })
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or("-".to_string(), T::to_string)
}

fn yn(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "y",
        Some(false) => "n",
        None => "-",
    }
}

fn shanks_str(s: &Option<Shanks>) -> String {
    match s {
        Some(Shanks::Shanks(a)) => a.to_string(),
        Some(Shanks::NotShanks) => "none".into(),
        None => "-".into(),
    }
}

fn certificate_str(c: &Option<RankZero>) -> String {
    match c {
        Some(RankZero::RankZero { inference }) => format!("rank-zero:{inference:?}"),
        Some(RankZero::NotRankZero(reason)) => format!("not-rank-zero:{reason:?}"),
        None => "-".into(),
    }
}

fn certificate_short(c: &Option<RankZero>) -> String {
    match c {
        Some(RankZero::RankZero { .. }) => "rank-zero".into(),
        Some(RankZero::NotRankZero(reason)) => format!("not rank zero: {reason}"),
        None => "-".into(),
    }
}

fn join(xs: &[u64], sep: &str) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(sep)
}

const COLUMNS: [&str; 16] = [
    "ell", "c1", "c2", "c3", "c4", "h_L", "class_group", "shanks", "ray_dim", "m", "n", "ram_ok", "balance",
    "verdict", "stage", "certificate",
];

fn columns(r: &SieveReport) -> Vec<String> {
    vec![
        r.ell.to_string(),
        yn(r.passed[0]).into(),
        yn(r.passed[1]).into(),
        yn(r.passed[2]).into(),
        yn(r.passed[3]).into(),
        opt(&r.h_l),
        if r.class_group.is_empty() { "-".into() } else { join(&r.class_group, " ") },
        shanks_str(&r.shanks),
        opt(&r.ray_dim),
        opt(&r.m),
        opt(&r.n),
        yn(r.ram_ok).into(),
        opt(&r.balance),
        if r.verdict { "in" } else { "out" }.into(),
        r.stage.to_string(),
        certificate_short(&r.certificate),
    ]
}

pub fn emit_report(run: &SieveRun, format: Format) -> String {
    match format {
        Format::Table => emit_table(run),
        Format::Csv => emit_csv(&run.reports),
        Format::StructuredText => emit_structured(run),
    }
}

fn emit_table(run: &SieveRun) -> String {
    let rows: Vec<Vec<String>> = run.reports.iter().map(columns).collect();
    let widths: Vec<usize> = (0..COLUMNS.len())
        .map(|i| rows.iter().map(|r| r[i].len()).chain([COLUMNS[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[&str]| -> String {
        let mut s: String = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(&COLUMNS);
    for r in &rows {
        out.push_str(&line(&r.iter().map(String::as_str).collect::<Vec<_>>()));
    }
    for r in run.reports.iter().filter(|r| r.note.is_some()) {
        out.push_str(&format!("note {}: {}\n", r.ell, r.note.as_deref().unwrap_or("")));
    }
    let s = Summary::of(&run.reports);
    out.push_str(&format!("Lambda (conditions 1-4, ell <= {}): {}\n", run.max, join(&s.lambda, " ")));
    out.push_str(&format!("Lambda-bar (conditions 1-2): {}\n", join(&s.lambda_bar, " ")));
    if !s.pending.is_empty() {
        out.push_str(&format!("pending backend: {}\n", join(&s.pending, " ")));
    }
    if !s.errors.is_empty() {
        out.push_str(&format!("errors: {}\n", join(&s.errors, " ")));
    }
    out.push_str(&format!("observed proportion: {}\n", s.density_line()));
    for (k, v) in &run.meta {
        out.push_str(&format!("meta {k}: {v}\n"));
    }
    out
}

fn emit_csv(reports: &[SieveReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = COLUMNS.to_vec();
    header.push("note");
    w.write_record(&header).expect("writing to memory");
    for r in reports {
        let mut row = columns(r);
        row.push(r.note.clone().unwrap_or_default());
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
}

fn emit_structured(run: &SieveRun) -> String {
    let mut out = String::from("tetrasieve-report 1\n");
    out.push_str(&format!("max={}\n", run.max));
    for (k, v) in &run.meta {
        out.push_str(&format!("meta {k}={v:?}\n"));
    }
    for r in &run.reports {
        let c: String = r.passed.iter().map(|&b| yn(b)).collect();
        out.push_str(&format!(
            "prime ell={} c={c} h_L={} class_group={} shanks={} ray_dim={} m={} n={} ram_ok={} balance={} \
             verdict={} stage={} certificate={} note={}\n",
            r.ell,
            opt(&r.h_l),
            if r.class_group.is_empty() { "-".into() } else { join(&r.class_group, ",") },
            shanks_str(&r.shanks),
            opt(&r.ray_dim),
            opt(&r.m),
            opt(&r.n),
            yn(r.ram_ok),
            opt(&r.balance),
            if r.verdict { "in" } else { "out" },
            r.stage,
            certificate_str(&r.certificate),
            r.note.as_ref().map_or("-".to_string(), |n| format!("{n:?}")),
        ));
    }
    out
}

/// Splits `k=v k=v ...` where a value may be a quoted string with spaces.
fn tokens(s: &str) -> Option<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut rest = s.trim_start();
    while !rest.is_empty() {
        let eq = rest.find('=')?;
        let key = rest[..eq].to_string();
        rest = &rest[eq + 1..];
        // the value ends at the first space outside quotes
        let mut in_str = false;
        let mut escaped = false;
        let mut end = rest.len();
        for (i, ch) in rest.char_indices() {
            if in_str {
                if escaped {
                    escaped = false;
                } else if ch == '\\' {
                    escaped = true;
                } else if ch == '"' {
                    in_str = false;
                }
            } else if ch == '"' {
                in_str = true;
            } else if ch == ' ' {
                end = i;
                break;
            }
        }
        if in_str {
            return None;
        }
        out.push((key, rest[..end].to_string()));
        rest = rest[end..].trim_start();
    }
    Some(out)
}

/// Inverse of the structured-text form of [`emit_report`].
pub fn parse_structured(text: &str) -> Result<SieveRun, ReportError> {
    let mut lines = text.lines().enumerate();
    let err = |line: usize, msg: String| ReportError::Parse { line: line + 1, msg };
    match lines.next() {
        Some((_, "tetrasieve-report 1")) => {}
        _ => return Err(err(0, "missing header".into())),
    }
    let (no, max_line) = lines.next().ok_or_else(|| err(1, "missing max".into()))?;
    let max = max_line
        .strip_prefix("max=")
        .and_then(|m| m.parse().ok())
        .ok_or_else(|| err(no, "expected max=N".into()))?;
    let mut meta = BTreeMap::new();
    let mut reports = Vec::new();
    for (no, line) in lines {
        if let Some(rest) = line.strip_prefix("meta ") {
            let (k, v) = rest.split_once('=').ok_or_else(|| err(no, "meta without '='".into()))?;
            let v = unquote(v).ok_or_else(|| err(no, format!("bad quoted value {v}")))?;
            meta.insert(k.to_string(), v);
        } else if let Some(rest) = line.strip_prefix("prime ") {
            reports.push(parse_prime(rest).map_err(|m| err(no, m))?);
        } else if !line.trim().is_empty() {
            return Err(err(no, format!("unexpected line {line:?}")));
        }
    }
    Ok(SieveRun { max, meta, reports })
}

fn parse_prime(rest: &str) -> Result<SieveReport, String> {
    let toks = tokens(rest).ok_or("unbalanced quotes")?;
    let expected = [
        "ell", "c", "h_L", "class_group", "shanks", "ray_dim", "m", "n", "ram_ok", "balance", "verdict", "stage",
        "certificate", "note",
    ];
    let keys: Vec<&str> = toks.iter().map(|(k, _)| k.as_str()).collect();
    if keys != expected {
        return Err(format!("fields {keys:?}, expected {expected:?}"));
    }
    let v: Vec<&str> = toks.iter().map(|(_, v)| v.as_str()).collect();
    fn num<T: FromStr>(s: &str) -> Result<Option<T>, String> {
        if s == "-" {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| format!("not a number: {s:?}"))
        }
    }
    fn flag(c: char) -> Result<Option<bool>, String> {
        match c {
            'y' => Ok(Some(true)),
            'n' => Ok(Some(false)),
            '-' => Ok(None),
            _ => Err(format!("bad flag {c:?}")),
        }
    }
    let ell = num::<u64>(v[0])?.ok_or("ell missing")?;
    let cs: Vec<char> = v[1].chars().collect();
    if cs.len() != 4 {
        return Err("c needs four flags".into());
    }
    let passed = [flag(cs[0])?, flag(cs[1])?, flag(cs[2])?, flag(cs[3])?];
    let class_group = if v[3] == "-" {
        Vec::new()
    } else {
        v[3].split(',')
            .map(|x| x.parse().map_err(|_| format!("bad invariant {x:?}")))
            .collect::<Result<_, _>>()?
    };
    let shanks = match v[4] {
        "-" => None,
        "none" => Some(Shanks::NotShanks),
        a => Some(Shanks::Shanks(a.parse().map_err(|_| format!("bad shanks {a:?}"))?)),
    };
    let ram_ok = match v[8] {
        "-" => None,
        s if s.len() == 1 => flag(s.chars().next().unwrap())?,
        s => return Err(format!("bad ram_ok {s:?}")),
    };
    let verdict = match v[10] {
        "in" => true,
        "out" => false,
        s => return Err(format!("bad verdict {s:?}")),
    };
    let certificate = if v[12] == "-" {
        None
    } else if let Some(q) = v[12].strip_prefix("rank-zero:") {
        Some(RankZero::RankZero {
            inference: unquote(q).ok_or("bad certificate quoting")?,
        })
    } else if let Some(q) = v[12].strip_prefix("not-rank-zero:") {
        Some(RankZero::NotRankZero(unquote(q).ok_or("bad certificate quoting")?))
    } else {
        return Err(format!("bad certificate {:?}", v[12]));
    };
    let note = if v[13] == "-" {
        None
    } else {
        Some(unquote(v[13]).ok_or("bad note quoting")?)
    };
    Ok(SieveReport {
        ell,
        passed,
        h_l: num(v[2])?,
        class_group,
        shanks,
        ray_dim: num(v[5])?,
        m: num(v[6])?,
        n: num(v[7])?,
        ram_ok,
        balance: num(v[9])?,
        certificate,
        verdict,
        stage: v[11].parse::<Stage>()?,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SieveRun {
        let base = SieveReport {
            ell: 163,
            passed: [Some(true); 4],
            h_l: Some(4),
            class_group: vec![2, 2],
            shanks: Some(Shanks::Shanks(11)),
            ray_dim: Some(6),
            m: Some(1),
            n: Some(3),
            ram_ok: Some(true),
            balance: Some(0),
            certificate: Some(RankZero::RankZero {
                inference: "balanced, \"quoted\" = Z_3".into(),
            }),
            verdict: true,
            stage: Stage::Passed,
            note: None,
        };
        let other = SieveReport {
            ell: 5,
            passed: [Some(false), None, None, None],
            h_l: None,
            class_group: vec![],
            shanks: None,
            ray_dim: None,
            m: None,
            n: None,
            ram_ok: None,
            balance: None,
            certificate: None,
            verdict: false,
            stage: Stage::Error,
            note: Some("line one\nline two, with comma and x=y".into()),
        };
        let pending = SieveReport {
            ell: 397,
            passed: [Some(true), Some(true), None, None],
            shanks: Some(Shanks::NotShanks),
            certificate: Some(RankZero::NotRankZero("condition (3) fails".into())),
            verdict: false,
            stage: Stage::PendingBackend,
            ..base.clone()
        };
        SieveRun {
            max: 400,
            meta: BTreeMap::from([
                ("fixtures".to_string(), "/tmp/a b".to_string()),
                ("jobs_source".to_string(), "flag".to_string()),
            ]),
            reports: vec![other, base, pending],
        }
    }

    #[test]
    fn structured_round_trip() {
        let run = sample();
        let text = emit_report(&run, Format::StructuredText);
        let back = parse_structured(&text).unwrap();
        assert_eq!(back, run);
        assert_eq!(emit_report(&back, Format::StructuredText), text);
        let empty = SieveRun { max: 1, meta: BTreeMap::new(), reports: vec![] };
        assert_eq!(parse_structured(&emit_report(&empty, Format::StructuredText)).unwrap(), empty);
    }

    #[test]
    fn structured_rejects_damage() {
        let text = emit_report(&sample(), Format::StructuredText);
        assert!(parse_structured(&text.replacen("verdict=in", "verdict=maybe", 1)).is_err());
        assert!(parse_structured(&text.replacen("tetrasieve-report 1", "report", 1)).is_err());
        assert!(parse_structured(&text.replacen(" n=3", "", 1)).is_err());
        assert!(parse_structured(&format!("{text}garbage\n")).is_err());
    }

    #[test]
    fn empty_csv_is_the_header() {
        let run = SieveRun { max: 10, meta: BTreeMap::new(), reports: vec![] };
        let csv = emit_report(&run, Format::Csv);
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("ell,c1,c2,c3,c4,h_L"));
    }

    #[test]
    fn csv_quotes_awkward_notes() {
        let csv = emit_report(&sample(), Format::Csv);
        let mut rd = csv::Reader::from_reader(csv.as_bytes());
        let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(&rows[0][16], "line one\nline two, with comma and x=y");
        assert_eq!(&rows[1][13], "in");
    }

    #[test]
    fn table_lists_members() {
        let t = emit_report(&sample(), Format::Table);
        assert!(t.contains("Lambda (conditions 1-4, ell <= 400): 163\n"));
        assert!(t.contains("pending backend: 397"));
        assert!(t.contains("no asymptotic claim"));
        assert!(t.lines().all(|l| l == l.trim_end()));
    }

    #[test]
    fn formats_parse() {
        for f in [Format::Table, Format::Csv, Format::StructuredText] {
            assert_eq!(f.to_string().parse::<Format>().unwrap(), f);
        }
        assert_eq!("xml".parse::<Format>(), Err(ReportError::UnknownFormat("xml".into())));
    }
}
