//! `bosim sample` — run a sampler and persist the batch as JSONL plus a
//! sidecar header.

use bosim_core::samplers::{
    sample_boson, sample_classical, sample_meanfield, sample_meanfield_frozen,
    sample_misaligned, sample_uniform,
};
use bosim_core::SampleBatch;

use super::{build_input, build_matrix};
use crate::config::{config_hash, MatrixSource, SampleConfig};
use crate::formats::write_batch;
use crate::Result;

/// Runs the configured sampler; pure in the config.
pub fn generate(cfg: &SampleConfig) -> Result<(SampleBatch, String)> {
    let n = cfg.source.n;
    if cfg.model == "uniform" {
        let m = match cfg.source.matrix {
            MatrixSource::File { .. } => {
                let (u, _) = build_matrix(&cfg.source.matrix, cfg.seed)?;
                u.dim() as u64
            }
            MatrixSource::Fourier { m }
            | MatrixSource::Haar { m }
            | MatrixSource::Walk { m, .. } => m,
        };
        return Ok((sample_uniform(n, m, cfg.shots, cfg.seed)?, "none".to_string()));
    }
    let (u, matrix_ref) = build_matrix(&cfg.source.matrix, cfg.seed)?;
    let input = build_input(&cfg.source.input, u.dim() as u64)?;
    let batch = match cfg.model.as_str() {
        "classical" => sample_classical(&u, &input, cfg.shots, cfg.seed)?,
        "meanfield" => {
            if cfg.freeze_phases {
                sample_meanfield_frozen(&u, &input, cfg.shots, cfg.seed)?
            } else {
                sample_meanfield(&u, &input, cfg.shots, cfg.seed)?
            }
        }
        "boson" => sample_boson(&u, &input, cfg.shots, cfg.seed, cfg.cap)?,
        "misaligned" => sample_misaligned(&u, &input, cfg.bad, cfg.shots, cfg.seed, cfg.cap)?,
        other => {
            return Err(crate::CliError::Config(format!("unknown model `{other}`")));
        }
    };
    Ok((batch, matrix_ref))
}

pub fn run(cfg: SampleConfig) -> Result<()> {
    let hash = config_hash(&cfg);
    let (batch, matrix_ref) = generate(&cfg)?;
    write_batch(&cfg.out, &batch, &matrix_ref, &hash)?;
    let forbidden = batch
        .events
        .iter()
        .filter(|e| bosim_core::certify::is_forbidden(e, batch.meta.particles as u64))
        .count();
    println!(
        "wrote {} {} events (n={}, m={}, seed={}, {} forbidden) to {}",
        batch.events.len(),
        batch.model.as_str(),
        batch.meta.particles,
        batch.meta.modes,
        batch.seed,
        forbidden,
        cfg.out.display()
    );
    Ok(())
}
