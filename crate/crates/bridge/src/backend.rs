//! One-shot subprocess protocol: a generated GP script on stdin, delimited
//! `key: value` blocks on stdout.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::Duration;

use sha2::{Digest, Sha256};
use wait_timeout::ChildExt;

use crate::BridgeError;

const COMMON: &str = include_str!("templates/common.gp");
const RAYCLASS: &str = include_str!("templates/rayclass.gp");
const CLASSNUMBER: &str = include_str!("templates/classnumber.gp");

/// Environment variable holding the backend command line.
pub const BACKEND_ENV: &str = "TETRASIEVE_BACKEND";
/// Environment variable overriding the timeout, in seconds.
pub const TIMEOUT_ENV: &str = "TETRASIEVE_BACKEND_TIMEOUT";
pub const DEFAULT_TIMEOUT_SECS: u64 = 600;

/// Exponents `e` of the moduli `3^e * rad(ell)` requested in rayclass mode.
/// The first one is recorded; the second must give the same answer.
pub const MODULUS_EXPONENTS: [u32; 2] = [2, 3];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendConfig {
    pub program: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl BackendConfig {
    /// Parses a whitespace-separated command line such as `gp -q`.
    pub fn from_command_line(line: &str, timeout: Duration) -> Result<Self, BridgeError> {
        let mut words = line.split_whitespace().map(str::to_string);
        let program = words
            .next()
            .ok_or_else(|| BridgeError::BackendUnavailable("empty backend command".into()))?;
        Ok(BackendConfig {
            program,
            args: words.collect(),
            timeout,
        })
    }

    /// Reads the backend from the environment; `None` when it is unset.
    pub fn from_env() -> Result<Option<Self>, BridgeError> {
        let Ok(line) = std::env::var(BACKEND_ENV) else {
            return Ok(None);
        };
        let timeout = match std::env::var(TIMEOUT_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| BridgeError::BackendUnavailable(format!("bad {TIMEOUT_ENV}: {s:?}")))?,
            Err(_) => DEFAULT_TIMEOUT_SECS,
        };
        Self::from_command_line(&line, Duration::from_secs(timeout)).map(Some)
    }

    /// `program args...` as one line.
    pub fn command_line(&self) -> String {
        std::iter::once(self.program.as_str())
            .chain(self.args.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    BuildK,
    RayClass,
    ClassNumber,
}

impl Task {
    pub fn tag(self) -> &'static str {
        match self {
            Task::BuildK => "build-K",
            Task::RayClass => "rayclass",
            Task::ClassNumber => "classnumber",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendRequest {
    pub ell: u64,
    pub task: Task,
}

impl BackendRequest {
    fn template(&self) -> &'static str {
        match self.task {
            Task::BuildK | Task::RayClass => RAYCLASS,
            Task::ClassNumber => CLASSNUMBER,
        }
    }

    /// Hash of the template text, independent of `ell`.
    pub fn script_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(COMMON.as_bytes());
        h.update(self.template().as_bytes());
        hex::encode(h.finalize())
    }

    /// Nonce the backend must echo: derived from task, prime and template.
    pub fn nonce(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}:{}:", self.task.tag(), self.ell).as_bytes());
        h.update(self.script_hash().as_bytes());
        hex::encode(h.finalize())[..16].to_string()
    }

    pub fn script(&self) -> String {
        let exponents = match self.task {
            Task::BuildK => "[]".to_string(),
            _ => format!("{MODULUS_EXPONENTS:?}").replace(' ', ""),
        };
        let body = self
            .template()
            .replace("{{ELL}}", &self.ell.to_string())
            .replace("{{NONCE}}", &self.nonce())
            .replace("{{TASK}}", self.task.tag())
            .replace("{{EXPONENTS}}", &exponents);
        format!("{COMMON}{body}")
    }
}

/// A `BEGIN name` ... `END name` block of `key: value` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub fields: Vec<(String, String)>,
    pub children: Vec<Block>,
}

impl Block {
    pub fn get(&self, key: &str) -> Result<&str, BridgeError> {
        let mut hits = self.fields.iter().filter(|(k, _)| k == key);
        match (hits.next(), hits.next()) {
            (Some((_, v)), None) => Ok(v),
            (None, _) => Err(BridgeError::Parse(format!("block {} lacks {key:?}", self.name))),
            _ => Err(BridgeError::Parse(format!("block {} repeats {key:?}", self.name))),
        }
    }
}

/// Parses the single top-level block named `name` out of backend output.
/// Lines outside blocks are ignored.
pub fn parse_response(text: &str, name: &str) -> Result<Block, BridgeError> {
    let mut stack: Vec<Block> = Vec::new();
    let mut found: Vec<Block> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if let Some(n) = line.strip_prefix("BEGIN ") {
            stack.push(Block {
                name: n.trim().to_string(),
                fields: Vec::new(),
                children: Vec::new(),
            });
        } else if let Some(n) = line.strip_prefix("END ") {
            let b = stack
                .pop()
                .ok_or_else(|| BridgeError::Parse(format!("line {}: END without BEGIN", no + 1)))?;
            if b.name != n.trim() {
                return Err(BridgeError::Parse(format!(
                    "line {}: END {} closes BEGIN {}",
                    no + 1,
                    n.trim(),
                    b.name
                )));
            }
            match stack.last_mut() {
                Some(parent) => parent.children.push(b),
                None => found.push(b),
            }
        } else if let Some(top) = stack.last_mut() {
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| BridgeError::Parse(format!("line {}: expected key: value", no + 1)))?;
            top.fields.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    if let Some(b) = stack.pop() {
        return Err(BridgeError::Parse(format!("unterminated block {}", b.name)));
    }
    let mut hits = found.into_iter().filter(|b| b.name == name);
    match (hits.next(), hits.next()) {
        (Some(b), None) => Ok(b),
        (None, _) => Err(BridgeError::Parse(format!("no {name} block in backend output"))),
        _ => Err(BridgeError::Parse(format!("several {name} blocks in backend output"))),
    }
}

/// Runs the script for `req` and returns its checked response block.
pub fn run(config: &BackendConfig, req: &BackendRequest) -> Result<Block, BridgeError> {
    let mut child = Command::new(&config.program)
        .args(&config.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| BridgeError::BackendUnavailable(format!("{}: {e}", config.command_line())))?;
    let script = req.script();
    let mut stdin = child.stdin.take().expect("stdin is piped");
    let writer = std::thread::spawn(move || stdin.write_all(script.as_bytes()));
    let mut out_pipe = child.stdout.take().expect("stdout is piped");
    let mut err_pipe = child.stderr.take().expect("stderr is piped");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        out_pipe.read_to_string(&mut s).map(|_| s)
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = err_pipe.read_to_string(&mut s);
        s
    });
    let status = match child.wait_timeout(config.timeout)? {
        Some(s) => s,
        None => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(BridgeError::Timeout {
                ell: req.ell,
                secs: config.timeout.as_secs(),
            });
        }
    };
    // a backend that exits early may close stdin first; its status tells the story
    let _ = writer.join();
    let stdout = reader.join().expect("reader thread")?;
    let stderr = err_reader.join().expect("stderr thread");
    if !status.success() {
        let detail = stdout
            .lines()
            .chain(stderr.lines())
            .filter(|l| !l.trim().is_empty())
            .last()
            .unwrap_or("")
            .to_string();
        return Err(BridgeError::BackendFailed {
            ell: req.ell,
            status: status.to_string(),
            detail,
        });
    }
    let block = parse_response(&stdout, req.task.tag())?;
    let echoed = block.get("nonce")?;
    if echoed != req.nonce() {
        return Err(BridgeError::Parse(format!(
            "backend echoed nonce {echoed}, expected {}",
            req.nonce()
        )));
    }
    if block.get("ell")? != req.ell.to_string() {
        return Err(BridgeError::Parse(format!("backend answered for ell {}", block.get("ell")?)));
    }
    Ok(block)
}

/// Class group invariants of the cubic field, from the backend.
pub fn class_number(config: &BackendConfig, ell: u64) -> Result<(u64, Vec<u64>), BridgeError> {
    let block = run(config, &BackendRequest { ell, task: Task::ClassNumber })?;
    let h = parse_ints::<u64>(block.get("h")?)?;
    let cyc = parse_ints::<u64>(block.get("cyc")?)?;
    match h.as_slice() {
        [h] => Ok((*h, cyc)),
        _ => Err(BridgeError::Parse("h is not a single integer".into())),
    }
}

pub(crate) fn parse_ints<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, BridgeError> {
    s.split_whitespace()
        .map(|w| w.parse().map_err(|_| BridgeError::Parse(format!("not an integer: {w:?}"))))
        .collect()
}
