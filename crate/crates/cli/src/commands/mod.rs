//! Command implementations. Each command is a function over its resolved
//! config, so tests can call them without a process boundary.

use std::path::Path;

use bosim_core::linalg::{make_cyclic_input, make_fourier, make_haar_random, make_walk_matrix};
use bosim_core::rng::derive_seed;
use bosim_core::{InputConfig, Mode, ModeUnitary};

use crate::config::{InputChoice, MatrixSource};
use crate::formats::load_matrix;
use crate::{CliError, Result};

pub mod certify;
pub mod estimate;
pub mod figure;
pub mod matrix;
pub mod sample;
pub mod witness;

// Seeds for distinct purposes derive from the user seed with fixed stream
// tags, so e.g. Haar generation never shares a stream with shot 0.
pub(crate) const SEED_TAG_MATRIX: u64 = 0x6d61_7472_6978_0001;
pub(crate) const SEED_TAG_PERTURB: u64 = 0x6d61_7472_6978_0002;
pub(crate) const SEED_TAG_PHASES: u64 = 0x6d61_7472_6978_0003;

/// Builds the matrix named by a resolved source. Returns it with the
/// reference string recorded in headers.
pub(crate) fn build_matrix(source: &MatrixSource, seed: u64) -> Result<(ModeUnitary, String)> {
    match source {
        MatrixSource::File { path } => {
            let u = load_matrix(Path::new(path))?;
            Ok((u, path.clone()))
        }
        MatrixSource::Fourier { m } => {
            let u = make_fourier(usize::try_from(*m).map_err(|_| too_big(*m))?)?;
            Ok((u, "fourier".to_string()))
        }
        MatrixSource::Haar { m } => {
            let u = make_haar_random(
                usize::try_from(*m).map_err(|_| too_big(*m))?,
                derive_seed(seed, SEED_TAG_MATRIX),
            )?;
            Ok((u, "haar".to_string()))
        }
        MatrixSource::Walk { m, steps } => {
            let u = make_walk_matrix(usize::try_from(*m).map_err(|_| too_big(*m))?, *steps)?;
            Ok((u, "walk".to_string()))
        }
    }
}

fn too_big(m: Mode) -> CliError {
    CliError::Config(format!("mode count {m} exceeds the addressable matrix size"))
}

/// Builds the input configuration against a matrix of `m` modes.
pub(crate) fn build_input(choice: &InputChoice, m: Mode) -> Result<InputConfig> {
    match choice {
        InputChoice::Cyclic { n, p } => {
            let (input, implied) = make_cyclic_input(*n, *p)?;
            if implied != m {
                return Err(CliError::Config(format!(
                    "cyclic input for n={n}, p={p} implies m={implied}, but the matrix has {m}"
                )));
            }
            Ok(input)
        }
        InputChoice::Modes { modes } => {
            for &j in modes {
                if j < 1 || j > m {
                    return Err(CliError::Core(bosim_core::Error::ModeOutOfRange {
                        mode: j,
                        modes: m,
                    }));
                }
            }
            Ok(InputConfig::indistinguishable(modes.clone())?)
        }
    }
}
