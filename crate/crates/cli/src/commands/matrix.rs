//! `bosim matrix` — build and save Fourier, Haar, walk or perturbed
//! matrices.

use std::path::Path;

use bosim_core::linalg::{make_fourier, make_haar_random, make_walk_matrix, perturb};
use bosim_core::rng::derive_seed;

use super::{SEED_TAG_MATRIX, SEED_TAG_PERTURB};
use crate::config::{config_hash, MatrixConfig};
use crate::formats::{load_matrix, save_matrix, FileMeta};
use crate::{CliError, Result};

pub fn run(cfg: MatrixConfig) -> Result<()> {
    let hash = config_hash(&cfg);
    let dim = |m: Option<u64>| -> Result<usize> {
        let m = m.ok_or_else(|| CliError::Config("missing required option --m".into()))?;
        usize::try_from(m).map_err(|_| CliError::Config(format!("mode count {m} too large")))
    };
    let u = match cfg.kind.as_str() {
        "fourier" => make_fourier(dim(cfg.m)?)?,
        "haar" => make_haar_random(dim(cfg.m)?, derive_seed(cfg.seed, SEED_TAG_MATRIX))?,
        "walk" => make_walk_matrix(dim(cfg.m)?, cfg.steps)?,
        "perturbed" => {
            let base = match &cfg.base {
                Some(path) => load_matrix(Path::new(path))?,
                None => make_fourier(dim(cfg.m)?)?,
            };
            let (w, _) = perturb(&base, cfg.avg_dev, derive_seed(cfg.seed, SEED_TAG_PERTURB))?;
            w
        }
        other => return Err(CliError::Config(format!("unknown matrix kind `{other}`"))),
    };
    save_matrix(&cfg.out, &u, Some(FileMeta::new(cfg.seed, hash)))?;
    println!(
        "wrote {} matrix of dimension {} (unitarity defect {:.2e}) to {}",
        u.label().as_str(),
        u.dim(),
        u.unitarity_defect(),
        cfg.out.display()
    );
    Ok(())
}
