//! `bosim certify` — suppression-law violation report for a stored batch.

use std::str::FromStr;

use bosim_core::certify::violation;
use bosim_core::samplers::{BatchMeta, Model};
use bosim_core::SampleBatch;
use serde::Serialize;

use crate::config::{config_hash, CertifyConfig};
use crate::formats::{emit_json, max_mode, read_events, read_header};
use crate::{CliError, Result, VERSION};

#[derive(Debug, Serialize)]
pub struct ViolationJson {
    pub version: String,
    pub config_hash: String,
    pub model: String,
    pub n: usize,
    pub m: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub runs: u64,
    pub forbidden: u64,
    pub violation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub false_accept_prob: Option<f64>,
}

/// Builds the report; pure in the config plus the referenced files.
pub fn report(cfg: &CertifyConfig) -> Result<ViolationJson> {
    let header = read_header(&cfg.batch_path)?;
    let n = cfg
        .n
        .or(header.as_ref().map(|h| h.n))
        .ok_or_else(|| CliError::Config("need --n or a batch sidecar header".into()))?;
    let m = match &header {
        Some(h) => h.m,
        None => max_mode(&cfg.batch_path)?,
    };
    let events = read_events(&cfg.batch_path, m)?;
    if let Some(bad) = events.iter().find(|e| e.particle_count() != n) {
        return Err(CliError::Core(bosim_core::Error::ParticleCountMismatch {
            input: n,
            event: bad.particle_count(),
        }));
    }
    let model = header
        .as_ref()
        .map(|h| h.model.clone())
        .unwrap_or_else(|| "unknown".to_string());
    let shots = events.len() as u64;
    let batch = SampleBatch {
        model: Model::from_str(&model).unwrap_or(Model::Uniform),
        seed: header.as_ref().map(|h| h.seed).unwrap_or(0),
        meta: BatchMeta {
            particles: n,
            modes: m,
            matrix_label: None,
            shots,
        },
        events,
    };
    let rep = violation(&batch)?;
    Ok(ViolationJson {
        version: VERSION.to_string(),
        config_hash: config_hash(cfg),
        model,
        n,
        m,
        seed: header.map(|h| h.seed),
        runs: rep.runs,
        forbidden: rep.forbidden,
        violation: rep.violation,
        false_accept_prob: rep.false_accept_prob,
    })
}

pub fn run(cfg: CertifyConfig) -> Result<()> {
    let json = report(&cfg)?;
    emit_json(&json, cfg.out.as_deref())
}
