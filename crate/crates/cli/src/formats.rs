//! On-disk formats: matrix JSON, event-batch JSONL with a sidecar header,
//! and the CSV tables.
//!
//! Floats pass through `serde_json`, whose shortest-round-trip encoding
//! reproduces every double bit-exactly on reload.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bosim_core::{MatrixLabel, Mode, ModeUnitary, OccupationEvent, SampleBatch};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result, VERSION};

/// Provenance block embedded in every persisted output.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FileMeta {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

impl FileMeta {
    pub fn new(seed: u64, config_hash: String) -> Self {
        FileMeta { version: VERSION.to_string(), seed, config_hash }
    }
}

/// Matrix file: `{"m", "re", "im", "label"}`, row-major.
#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub m: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<FileMeta>,
}

impl MatrixFile {
    pub fn from_unitary(u: &ModeUnitary, meta: Option<FileMeta>) -> Self {
        let m = u.dim();
        let mut re = vec![vec![0.0; m]; m];
        let mut im = vec![vec![0.0; m]; m];
        for r in 0..m {
            for c in 0..m {
                let z = u.entries()[r * m + c];
                re[r][c] = z.re;
                im[r][c] = z.im;
            }
        }
        MatrixFile { m, re, im, label: u.label().as_str().to_string(), meta }
    }

    pub fn into_unitary(self) -> Result<ModeUnitary> {
        let m = self.m;
        if self.re.len() != m
            || self.im.len() != m
            || self.re.iter().any(|row| row.len() != m)
            || self.im.iter().any(|row| row.len() != m)
        {
            return Err(CliError::Config(format!(
                "matrix file claims m={m} but row shapes disagree"
            )));
        }
        let mut entries = Vec::with_capacity(m * m);
        for r in 0..m {
            for c in 0..m {
                entries.push(Complex64::new(self.re[r][c], self.im[r][c]));
            }
        }
        let label = MatrixLabel::from_str(&self.label)?;
        Ok(ModeUnitary::from_entries(m, entries, label)?)
    }
}

pub fn save_matrix(path: &Path, u: &ModeUnitary, meta: Option<FileMeta>) -> Result<()> {
    let file = MatrixFile::from_unitary(u, meta);
    let json = serde_json::to_string_pretty(&file).expect("matrix serialization");
    fs::write(path, json + "\n").map_err(CliError::io(path))
}

pub fn load_matrix(path: &Path) -> Result<ModeUnitary> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let file: MatrixFile = serde_json::from_str(&text).map_err(|e| CliError::MalformedLine {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    file.into_unitary()
}

/// Sidecar header describing a batch file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchHeader {
    pub model: String,
    pub n: usize,
    pub m: Mode,
    pub seed: u64,
    pub shots: u64,
    /// Matrix reference: a label for built matrices, a path for loaded ones.
    pub matrix: String,
    pub config_hash: String,
    pub version: String,
}

/// `batch.jsonl` → `batch.header.json`.
pub fn header_path(batch_path: &Path) -> PathBuf {
    batch_path.with_extension("header.json")
}

#[derive(Serialize, Deserialize)]
struct EventLine {
    k: Vec<Mode>,
}

/// Writes the JSONL event stream plus its sidecar header.
pub fn write_batch(path: &Path, batch: &SampleBatch, matrix_ref: &str, config_hash: &str) -> Result<()> {
    let mut out = Vec::new();
    for event in &batch.events {
        let line = serde_json::to_string(&EventLine { k: event.modes().to_vec() })
            .expect("event serialization");
        out.extend_from_slice(line.as_bytes());
        out.push(b'\n');
    }
    fs::write(path, out).map_err(CliError::io(path))?;
    let header = BatchHeader {
        model: batch.model.as_str().to_string(),
        n: batch.meta.particles,
        m: batch.meta.modes,
        seed: batch.seed,
        shots: batch.meta.shots,
        matrix: matrix_ref.to_string(),
        config_hash: config_hash.to_string(),
        version: VERSION.to_string(),
    };
    let json = serde_json::to_string_pretty(&header).expect("header serialization");
    fs::write(header_path(path), json + "\n").map_err(CliError::io(header_path(path)))
}

/// Reads a JSONL event stream; errors name the offending line.
pub fn read_events(path: &Path, mode_count: Mode) -> Result<Vec<OccupationEvent>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut events = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: EventLine = serde_json::from_str(line).map_err(|e| CliError::MalformedLine {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        let event = OccupationEvent::new(parsed.k, mode_count).map_err(|e| {
            CliError::MalformedLine {
                path: path.to_path_buf(),
                line: idx + 1,
                message: e.to_string(),
            }
        })?;
        events.push(event);
    }
    if events.is_empty() {
        return Err(CliError::Core(bosim_core::Error::EmptyBatch));
    }
    Ok(events)
}

pub fn read_header(batch_path: &Path) -> Result<Option<BatchHeader>> {
    let path = header_path(batch_path);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
    let header = serde_json::from_str(&text).map_err(|e| CliError::MalformedLine {
        path,
        line: e.line(),
        message: e.to_string(),
    })?;
    Ok(Some(header))
}

/// Raw maximum mode index of a JSONL stream, for headerless batches.
pub fn max_mode(path: &Path) -> Result<Mode> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut max = 0;
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: EventLine = serde_json::from_str(line).map_err(|e| CliError::MalformedLine {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        max = max.max(parsed.k.iter().copied().max().unwrap_or(0));
    }
    Ok(max)
}

/// A CSV table with the provenance comment line and a fixed header.
pub struct CsvTable {
    buffer: String,
}

impl CsvTable {
    pub fn new(meta: &FileMeta, header: &str) -> Self {
        Self::with_config(meta, None, header)
    }

    /// Like [`CsvTable::new`] but also echoes the effective config as a
    /// second comment line.
    pub fn with_config(meta: &FileMeta, config_json: Option<&str>, header: &str) -> Self {
        let mut buffer = String::new();
        buffer.push_str(&format!(
            "# bosim v{} seed={} config={}\n",
            meta.version, meta.seed, meta.config_hash
        ));
        if let Some(json) = config_json {
            buffer.push_str(&format!("# config {json}\n"));
        }
        buffer.push_str(header);
        buffer.push('\n');
        CsvTable { buffer }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buffer.push_str(&fields.join(","));
        self.buffer.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buffer
    }

    pub fn write(self, path: &Path) -> Result<()> {
        fs::write(path, self.buffer).map_err(CliError::io(path))
    }
}

/// Writes any serializable report as pretty JSON (stdout when no path).
pub fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let json = serde_json::to_string_pretty(value).expect("report serialization");
    match path {
        Some(p) => fs::write(p, json + "\n").map_err(CliError::io(p)),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{json}").map_err(CliError::io("<stdout>"))
        }
    }
}
