//! Append-only interaction history.
//!
//! Every lifetime produces one `History`: a sequence of steps
//! `(t, observation, action, reward_ext, reward_int)` with `t` starting at 1
//! and increasing by exactly one per append. Nothing is ever forgotten or
//! rewritten here; compressors that want a bounded view take a window, the
//! storage itself keeps everything.
//!
//! Readers work on [`HistorySlice`] values, which are owned snapshots of a
//! contiguous range. Taking a snapshot under a lock and releasing the lock
//! before doing any real work is what keeps the single-writer/multi-reader
//! orchestration simple: a slice never changes under its holder.
//!
//! The on-disk form is line-oriented text: one header line
//! `curio-history v<N> alphabet=<K>` followed by one
//! `t,observation,action,reward_ext,reward_int` line per step. Rewards are
//! written with the shortest decimal form that parses back to the same f64,
//! so save followed by load reproduces the history exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Action, Symbol, Timestep};

/// Version written into the header line. Bump on any change to the line
/// format; `load` refuses files written by a different version.
pub const HISTORY_FORMAT_VERSION: u32 = 1;

const HISTORY_MAGIC: &str = "curio-history";

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("alphabet size must be at least 1, got {0}")]
    EmptyAlphabet(usize),
    #[error("observation {symbol} out of range for alphabet of size {alphabet_size}")]
    SymbolOutOfRange { symbol: Symbol, alphabet_size: usize },
    #[error("invalid slice bounds [{start}, {end}] for history of length {len}")]
    BadSliceBounds { start: Timestep, end: Timestep, len: u64 },
    #[error("history file version {found} is not supported (this build reads v{supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One recorded interaction step. `reward_ext` and `reward_int` are kept
/// separately; the combined reward the controller actually learned from is
/// reconstructible and not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub t: Timestep,
    pub observation: Symbol,
    pub action: Action,
    pub reward_ext: f64,
    pub reward_int: f64,
}

/// The growing record of one agent lifetime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    alphabet_size: usize,
    steps: Vec<Step>,
}

/// Owned snapshot of the contiguous step range `[start, end]` (1-based,
/// inclusive). `start == end + 1` encodes the empty slice.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySlice {
    start: Timestep,
    end: Timestep,
    steps: Vec<Step>,
}

impl History {
    pub fn new(alphabet_size: usize) -> Result<Self, HistoryError> {
        if alphabet_size == 0 {
            return Err(HistoryError::EmptyAlphabet(alphabet_size));
        }
        Ok(History { alphabet_size, steps: Vec::new() })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> u64 {
        self.steps.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Records one step and returns its timestep. The first append returns 1.
    pub fn append(
        &mut self,
        observation: Symbol,
        action: Action,
        reward_ext: f64,
        reward_int: f64,
    ) -> Result<Timestep, HistoryError> {
        if (observation as usize) >= self.alphabet_size {
            return Err(HistoryError::SymbolOutOfRange {
                symbol: observation,
                alphabet_size: self.alphabet_size,
            });
        }
        let t = self.steps.len() as Timestep + 1;
        self.steps.push(Step { t, observation, action, reward_ext, reward_int });
        Ok(t)
    }

    /// Snapshot of steps `start..=end` (1-based). `start == end + 1` yields
    /// the empty slice, which is valid whenever `end <= len`.
    pub fn slice(&self, start: Timestep, end: Timestep) -> Result<HistorySlice, HistoryError> {
        let len = self.len();
        let bounds_ok = start >= 1 && end <= len && (start <= end || start == end + 1);
        if !bounds_ok {
            return Err(HistoryError::BadSliceBounds { start, end, len });
        }
        let steps = if start > end {
            Vec::new()
        } else {
            self.steps[(start - 1) as usize..end as usize].to_vec()
        };
        Ok(HistorySlice { start, end, steps })
    }

    /// Snapshot of the whole history. Empty history gives the empty slice.
    pub fn full(&self) -> HistorySlice {
        self.slice(1, self.len()).expect("full range is always valid")
    }

    /// Snapshot of the last `window` steps, or everything if the history is
    /// still shorter than that.
    pub fn last(&self, window: u64) -> HistorySlice {
        let len = self.len();
        let start = len.saturating_sub(window) + 1;
        self.slice(start, len).expect("tail range is always valid")
    }

    pub fn observations(&self) -> Vec<Symbol> {
        self.steps.iter().map(|s| s.observation).collect()
    }

    pub fn save(&self, path: &Path) -> Result<(), HistoryError> {
        let mut out = String::new();
        writeln!(
            out,
            "{HISTORY_MAGIC} v{HISTORY_FORMAT_VERSION} alphabet={}",
            self.alphabet_size
        )
        .expect("writing to a String cannot fail");
        for s in &self.steps {
            writeln!(out, "{},{},{},{},{}", s.t, s.observation, s.action, s.reward_ext, s.reward_int)
                .expect("writing to a String cannot fail");
        }
        let mut file = fs::File::create(path)?;
        file.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, HistoryError> {
        Self::from_reader(fs::File::open(path)?)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, HistoryError> {
        let reader = BufReader::new(reader);
        let mut lines = reader.lines();

        let header = match lines.next() {
            Some(line) => line?,
            None => return Err(parse_err(1, "missing header line")),
        };
        let mut history = Self::parse_header(&header)?;

        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let step = parse_step(&line, line_no)?;
            let expected_t = history.len() + 1;
            if step.t != expected_t {
                return Err(parse_err(
                    line_no,
                    format!("timestep {} out of order, expected {expected_t}", step.t),
                ));
            }
            history
                .append(step.observation, step.action, step.reward_ext, step.reward_int)
                .map_err(|e| parse_err(line_no, e.to_string()))?;
        }
        Ok(history)
    }

    fn parse_header(header: &str) -> Result<Self, HistoryError> {
        let mut parts = header.split_whitespace();
        if parts.next() != Some(HISTORY_MAGIC) {
            return Err(parse_err(1, format!("expected `{HISTORY_MAGIC}` header")));
        }
        let version = parts
            .next()
            .and_then(|v| v.strip_prefix('v'))
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| parse_err(1, "malformed version field"))?;
        if version != HISTORY_FORMAT_VERSION {
            return Err(HistoryError::UnsupportedVersion {
                found: version,
                supported: HISTORY_FORMAT_VERSION,
            });
        }
        let alphabet_size = parts
            .next()
            .and_then(|v| v.strip_prefix("alphabet="))
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| parse_err(1, "malformed alphabet field"))?;
        if parts.next().is_some() {
            return Err(parse_err(1, "trailing fields in header"));
        }
        History::new(alphabet_size).map_err(|e| parse_err(1, e.to_string()))
    }
}

impl HistorySlice {
    pub fn start(&self) -> Timestep {
        self.start
    }

    pub fn end(&self) -> Timestep {
        self.end
    }

    pub fn len(&self) -> u64 {
        self.steps.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn observations(&self) -> Vec<Symbol> {
        self.steps.iter().map(|s| s.observation).collect()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> HistoryError {
    HistoryError::Parse { line, message: message.into() }
}

fn parse_step(line: &str, line_no: usize) -> Result<Step, HistoryError> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 5 {
        return Err(parse_err(line_no, format!("expected 5 fields, got {}", fields.len())));
    }
    let t = fields[0]
        .parse::<Timestep>()
        .map_err(|e| parse_err(line_no, format!("bad timestep `{}`: {e}", fields[0])))?;
    let observation = fields[1]
        .parse::<Symbol>()
        .map_err(|e| parse_err(line_no, format!("bad observation `{}`: {e}", fields[1])))?;
    let action = fields[2]
        .parse::<Action>()
        .map_err(|e| parse_err(line_no, format!("bad action `{}`: {e}", fields[2])))?;
    let reward_ext = fields[3]
        .parse::<f64>()
        .map_err(|e| parse_err(line_no, format!("bad external reward `{}`: {e}", fields[3])))?;
    let reward_int = fields[4]
        .parse::<f64>()
        .map_err(|e| parse_err(line_no, format!("bad intrinsic reward `{}`: {e}", fields[4])))?;
    Ok(Step { t, observation, action, reward_ext, reward_int })
}
