//! `bosim witness` — coarse-grained observables (coincidence probability,
//! clouding, mean occupations) of a stored batch or an exact model.

use std::str::FromStr;

use bosim_core::certify::{
    is_forbidden, meanfield_witnesses_mc, witnesses_empirical, witnesses_exact, WitnessSummary,
};
use bosim_core::events::enumerate_events;
use bosim_core::permanent::{boson_probability, classical_probability, misaligned_probability};
use bosim_core::rng::derive_seed;
use bosim_core::samplers::{BatchMeta, Model};
use bosim_core::{InputConfig, ModeUnitary, SampleBatch};
use serde::Serialize;

use super::{build_input, build_matrix, SEED_TAG_PHASES};
use crate::config::{config_hash, WitnessConfig};
use crate::formats::{emit_json, max_mode, read_events, read_header, CsvTable, FileMeta};
use crate::{CliError, Result, VERSION};

#[derive(Debug, Serialize)]
pub struct WitnessJson {
    pub version: String,
    pub config_hash: String,
    pub mode: String,
    pub model: String,
    pub n: usize,
    pub m: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub p1: f64,
    pub p1_stderr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clouding: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clouding_stderr: Option<f64>,
    pub mean_occupations: Vec<f64>,
    pub occupation_stderr: Vec<f64>,
}

fn exact_probability<'a>(
    model: &str,
    u: &'a ModeUnitary,
    input: &'a InputConfig,
    bad: usize,
) -> impl FnMut(&bosim_core::OccupationEvent) -> bosim_core::Result<f64> + 'a {
    let model = model.to_string();
    move |e| match model.as_str() {
        "boson" => boson_probability(u, input, e),
        "classical" => classical_probability(u, input, e),
        "misaligned" => misaligned_probability(u, input, bad, e),
        _ => unreachable!("validated at resolve time"),
    }
}

pub fn run(cfg: WitnessConfig) -> Result<()> {
    let hash = config_hash(&cfg);
    let (summary, model, n, m, seed) = if cfg.mode == "batch" {
        let path = cfg.batch_path.as_ref().expect("batch mode has a path");
        let header = read_header(path)?;
        let m = match &header {
            Some(h) => h.m,
            None => max_mode(path)?,
        };
        let events = read_events(path, m)?;
        let n = header.as_ref().map(|h| h.n).unwrap_or(events[0].particle_count());
        let model = header
            .as_ref()
            .map(|h| h.model.clone())
            .unwrap_or_else(|| "unknown".to_string());
        let batch = SampleBatch {
            model: Model::from_str(&model).unwrap_or(Model::Uniform),
            seed: header.as_ref().map(|h| h.seed).unwrap_or(0),
            meta: BatchMeta { particles: n, modes: m, matrix_label: None, shots: events.len() as u64 },
            events,
        };
        let summary = witnesses_empirical(&batch)?;
        (summary, model, n, m, header.map(|h| h.seed))
    } else {
        let model = cfg.model.clone().expect("exact mode has a model");
        let source = cfg.source.as_ref().expect("exact mode has a source");
        let (u, _) = build_matrix(&source.matrix, cfg.seed)?;
        let m = u.dim() as u64;
        let input = build_input(&source.input, m)?;
        let n = input.particle_count();
        let summary: WitnessSummary = if model == "meanfield" {
            meanfield_witnesses_mc(&u, &input, cfg.draws, derive_seed(cfg.seed, SEED_TAG_PHASES))?
        } else {
            witnesses_exact(exact_probability(&model, &u, &input, cfg.bad), n, m, cfg.cap)?
        };
        if let Some(table_path) = &cfg.table {
            if model == "meanfield" {
                return Err(CliError::Config(
                    "per-event tables need an exactly evaluable model".into(),
                ));
            }
            let mut prob = exact_probability(&model, &u, &input, cfg.bad);
            let mut table = CsvTable::new(
                &FileMeta::new(cfg.seed, hash.clone()),
                "event,probability,forbidden",
            );
            for event in enumerate_events(n, m, cfg.cap)? {
                let p = prob(&event)?;
                let modes: Vec<String> =
                    event.modes().iter().map(|k| k.to_string()).collect();
                table.row(&[
                    modes.join(" "),
                    p.to_string(),
                    is_forbidden(&event, n as u64).to_string(),
                ]);
            }
            table.write(table_path)?;
        }
        (summary, model, n, m, Some(cfg.seed))
    };

    if let Some(csv_path) = &cfg.csv {
        let mut csv = CsvTable::new(
            &FileMeta::new(seed.unwrap_or(0), hash.clone()),
            "model,n,m,quantity,value,stderr",
        );
        csv.row(&[
            model.clone(),
            n.to_string(),
            m.to_string(),
            "p1".into(),
            summary.p1.to_string(),
            summary.p1_stderr.to_string(),
        ]);
        if let (Some(c), Some(se)) = (summary.clouding, summary.clouding_stderr) {
            csv.row(&[
                model.clone(),
                n.to_string(),
                m.to_string(),
                "clouding".into(),
                c.to_string(),
                se.to_string(),
            ]);
        }
        for (k, (&occ, &se)) in summary
            .mean_occupations
            .iter()
            .zip(&summary.occupation_stderr)
            .enumerate()
        {
            csv.row(&[
                model.clone(),
                n.to_string(),
                m.to_string(),
                format!("mean_occupation_{}", k + 1),
                occ.to_string(),
                se.to_string(),
            ]);
        }
        csv.write(csv_path)?;
    }

    let json = WitnessJson {
        version: VERSION.to_string(),
        config_hash: hash,
        mode: cfg.mode.clone(),
        model,
        n,
        m,
        seed,
        p1: summary.p1,
        p1_stderr: summary.p1_stderr,
        clouding: summary.clouding,
        clouding_stderr: summary.clouding_stderr,
        mean_occupations: summary.mean_occupations,
        occupation_stderr: summary.occupation_stderr,
    };
    emit_json(&json, cfg.out.as_deref())
}
