//! Command options with the precedence chain flags > config file > defaults.
//!
//! Every command has a *spec* (all-optional fields, fed by both clap and a
//! JSON config file) and a resolved *config* (concrete values). The resolved
//! config is serialized verbatim into output headers and hashed, so a rerun
//! with an equal hash is guaranteed to regenerate identical bytes.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// 16-hex-digit hash of a resolved config's canonical JSON.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let json = serde_json::to_string(cfg).expect("config serialization");
    format!("{:016x}", fnv1a64(json.as_bytes()))
}

/// Fresh seed when none was given; recorded in all outputs.
pub fn entropy_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    bosim_core::rng::philox2x64(nanos, std::process::id() as u64, 0x0b5e_ed5e_ed5e_ed00)[0]
}

pub fn load_spec<T: Default + for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!(
        "config file {}: {e}",
        path.display()
    )))
}

pub fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|tok| tok.trim())
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| CliError::Config(format!("cannot parse `{tok}` in {what}")))
        })
        .collect()
}

fn missing(flag: &str) -> CliError {
    CliError::Config(format!("missing required option --{flag}"))
}

const DEFAULT_CAP: u64 = 1_000_000;

/// `m` from an explicit value or `n^p`.
fn resolve_mode_count(m: Option<u64>, n: Option<usize>, p: Option<u32>) -> Result<Option<u64>> {
    match (m, n, p) {
        (Some(m), _, None) => Ok(Some(m)),
        (None, Some(n), Some(p)) => {
            let mut acc: u64 = 1;
            for _ in 0..p {
                acc = acc.checked_mul(n as u64).ok_or_else(|| {
                    CliError::Config(format!("n^p overflows for n={n}, p={p}"))
                })?;
            }
            Ok(Some(acc))
        }
        (Some(m), Some(n), Some(p)) => {
            let from_p = resolve_mode_count(None, Some(n), Some(p))?.unwrap();
            if from_p != m {
                return Err(CliError::Config(format!(
                    "--m {m} disagrees with n^p = {from_p}"
                )));
            }
            Ok(Some(m))
        }
        _ => Ok(None),
    }
}

// ---------------------------------------------------------------- matrix --

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct MatrixSpec {
    /// Matrix family: fourier | haar | walk | perturbed.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// With --n: build for m = n^p.
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Walk layers (walk kind only).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Average deviation magnitude (perturbed kind only).
    #[arg(long = "avg-dev")]
    pub avg_dev: Option<f64>,
    /// Base matrix file for the perturbed kind (defaults to a Fourier matrix).
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixConfig {
    pub kind: String,
    pub m: Option<u64>,
    pub seed: u64,
    pub steps: usize,
    pub avg_dev: f64,
    pub base: Option<String>,
    #[serde(skip)]
    pub out: PathBuf,
}

impl MatrixSpec {
    pub fn merge(self, file: MatrixSpec) -> MatrixSpec {
        MatrixSpec {
            kind: self.kind.or(file.kind),
            m: self.m.or(file.m),
            n: self.n.or(file.n),
            p: self.p.or(file.p),
            seed: self.seed.or(file.seed),
            steps: self.steps.or(file.steps),
            avg_dev: self.avg_dev.or(file.avg_dev),
            base: self.base.or(file.base),
            out: self.out.or(file.out),
            config: None,
        }
    }

    pub fn resolve(self) -> Result<MatrixConfig> {
        let kind = self.kind.ok_or_else(|| missing("kind"))?;
        if !["fourier", "haar", "walk", "perturbed"].contains(&kind.as_str()) {
            return Err(CliError::Config(format!("unknown matrix kind `{kind}`")));
        }
        let m = resolve_mode_count(self.m, self.n, self.p)?;
        if m.is_none() && self.base.is_none() {
            return Err(missing("m"));
        }
        Ok(MatrixConfig {
            kind,
            m,
            seed: self.seed.unwrap_or_else(entropy_seed),
            steps: self.steps.unwrap_or(8),
            avg_dev: self.avg_dev.unwrap_or(0.0),
            base: self.base.map(|p| p.display().to_string()),
            out: self.out.ok_or_else(|| missing("out"))?,
        })
    }
}

// ------------------------------------------------------- matrix sources --

/// Shared matrix/input selection for sampling-style commands.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct SourceSpec {
    /// Load the transformation from a matrix JSON file.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Use the Fourier matrix (default when nothing else is chosen).
    #[arg(long, action = clap::ArgAction::SetTrue)]
    pub fourier: Option<bool>,
    /// Use a Haar-random matrix (seeded from --seed).
    #[arg(long, action = clap::ArgAction::SetTrue)]
    pub haar: Option<bool>,
    /// Use the beam-splitter walk mesh.
    #[arg(long, action = clap::ArgAction::SetTrue)]
    pub walk: Option<bool>,
    /// Walk layers (walk source only).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub m: Option<u64>,
    /// With --n and no --m: use m = n^p and the cyclic input.
    #[arg(long)]
    pub p: Option<u32>,
    /// Explicit input modes, e.g. `1,4,7`.
    #[arg(long)]
    pub input: Option<String>,
    /// Use the cyclically symmetric input for m = n^p.
    #[arg(long, action = clap::ArgAction::SetTrue)]
    pub cyclic: Option<bool>,
}

impl SourceSpec {
    pub fn merge(self, file: SourceSpec) -> SourceSpec {
        SourceSpec {
            matrix: self.matrix.or(file.matrix),
            fourier: self.fourier.or(file.fourier),
            haar: self.haar.or(file.haar),
            walk: self.walk.or(file.walk),
            steps: self.steps.or(file.steps),
            m: self.m.or(file.m),
            p: self.p.or(file.p),
            input: self.input.or(file.input),
            cyclic: self.cyclic.or(file.cyclic),
        }
    }
}

/// Resolved matrix source, serialized into headers.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "source")]
pub enum MatrixSource {
    File { path: String },
    Fourier { m: u64 },
    Haar { m: u64 },
    Walk { m: u64, steps: usize },
}

/// Resolved input selection.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "input")]
pub enum InputChoice {
    /// The cyclically symmetric input for m = n^p.
    Cyclic { n: usize, p: u32 },
    /// Explicit 1-based input modes.
    Modes { modes: Vec<u64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedSource {
    #[serde(flatten)]
    pub matrix: MatrixSource,
    #[serde(flatten)]
    pub input: InputChoice,
    pub n: usize,
}

impl SourceSpec {
    /// Resolves matrix and input choices. `n` may come from --n or the
    /// explicit input list.
    pub fn resolve(&self, n: Option<usize>) -> Result<ResolvedSource> {
        let input_modes: Option<Vec<u64>> = match &self.input {
            Some(s) => Some(parse_list(s, "--input")?),
            None => None,
        };
        let n = match (n, &input_modes) {
            (Some(n), Some(modes)) if modes.len() != n => {
                return Err(CliError::Config(format!(
                    "--n {n} disagrees with {} input modes",
                    modes.len()
                )));
            }
            (Some(n), _) => n,
            (None, Some(modes)) => modes.len(),
            (None, None) => return Err(missing("n")),
        };
        let fourier = self.fourier.unwrap_or(false);
        let haar = self.haar.unwrap_or(false);
        let walk = self.walk.unwrap_or(false);
        let picked = [self.matrix.is_some(), fourier, haar, walk]
            .iter()
            .filter(|&&b| b)
            .count();
        if picked > 1 {
            return Err(CliError::Config(
                "pick one of --matrix, --fourier, --haar, --walk".into(),
            ));
        }
        let cyclic_wanted = self.cyclic.unwrap_or(false);
        // m from --m, n^p, or the file; the cyclic default kicks in when the
        // Fourier dimension came from --p.
        let p_for_cyclic = self.p.unwrap_or(2);
        let m_explicit = resolve_mode_count(self.m, Some(n), self.p)?;
        let matrix = if let Some(path) = &self.matrix {
            MatrixSource::File { path: path.display().to_string() }
        } else if haar {
            MatrixSource::Haar { m: m_explicit.ok_or_else(|| missing("m"))? }
        } else if walk {
            MatrixSource::Walk {
                m: m_explicit.ok_or_else(|| missing("m"))?,
                steps: self.steps.unwrap_or(8),
            }
        } else {
            // Fourier is the default family.
            MatrixSource::Fourier { m: m_explicit.ok_or_else(|| missing("m"))? }
        };
        let input = if let Some(modes) = input_modes {
            InputChoice::Modes { modes }
        } else if cyclic_wanted || (matches!(matrix, MatrixSource::Fourier { .. }) && self.p.is_some())
        {
            InputChoice::Cyclic { n, p: p_for_cyclic }
        } else {
            InputChoice::Modes { modes: (1..=n as u64).collect() }
        };
        Ok(ResolvedSource { matrix, input, n })
    }
}

// ---------------------------------------------------------------- sample --

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct SampleSpec {
    /// Sampling model: uniform | classical | meanfield | boson | misaligned.
    #[arg(long)]
    pub model: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceSpec,
    #[arg(long)]
    pub n: Option<usize>,
    /// Index (1-based) of the distinguishable particle (misaligned model).
    #[arg(long)]
    pub bad: Option<usize>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest event-space size the exact samplers may tabulate.
    #[arg(long)]
    pub cap: Option<u64>,
    /// Freeze the mean-field phases across shots instead of redrawing.
    #[arg(long = "freeze-phases", action = clap::ArgAction::SetTrue)]
    pub freeze_phases: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleConfig {
    pub model: String,
    #[serde(flatten)]
    pub source: ResolvedSource,
    pub bad: usize,
    pub shots: u64,
    pub seed: u64,
    pub cap: u64,
    pub freeze_phases: bool,
    #[serde(skip)]
    pub out: PathBuf,
}

impl SampleSpec {
    pub fn merge(self, file: SampleSpec) -> SampleSpec {
        SampleSpec {
            model: self.model.or(file.model),
            source: self.source.merge(file.source),
            n: self.n.or(file.n),
            bad: self.bad.or(file.bad),
            shots: self.shots.or(file.shots),
            seed: self.seed.or(file.seed),
            cap: self.cap.or(file.cap),
            freeze_phases: self.freeze_phases.or(file.freeze_phases),
            out: self.out.or(file.out),
            config: None,
        }
    }

    pub fn resolve(self) -> Result<SampleConfig> {
        let model = self.model.ok_or_else(|| missing("model"))?;
        if !["uniform", "classical", "meanfield", "boson", "misaligned"]
            .contains(&model.as_str())
        {
            return Err(CliError::Config(format!("unknown model `{model}`")));
        }
        let source = self.source.resolve(self.n)?;
        Ok(SampleConfig {
            model,
            source,
            bad: self.bad.unwrap_or(1),
            shots: self.shots.ok_or_else(|| missing("shots"))?,
            seed: self.seed.unwrap_or_else(entropy_seed),
            cap: self.cap.unwrap_or(DEFAULT_CAP),
            freeze_phases: self.freeze_phases.unwrap_or(false),
            out: self.out.ok_or_else(|| missing("out"))?,
        })
    }
}

// --------------------------------------------------------------- certify --

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct CertifySpec {
    /// Batch JSONL file (expects its sidecar header next to it).
    #[arg(long)]
    pub batch: Option<PathBuf>,
    /// Particle count; overrides the sidecar header.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyConfig {
    pub batch: String,
    pub n: Option<usize>,
    #[serde(skip)]
    pub batch_path: PathBuf,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl CertifySpec {
    pub fn merge(self, file: CertifySpec) -> CertifySpec {
        CertifySpec {
            batch: self.batch.or(file.batch),
            n: self.n.or(file.n),
            out: self.out.or(file.out),
            config: None,
        }
    }

    pub fn resolve(self) -> Result<CertifyConfig> {
        let batch_path = self.batch.ok_or_else(|| missing("batch"))?;
        Ok(CertifyConfig {
            batch: batch_path.display().to_string(),
            n: self.n,
            batch_path,
            out: self.out,
        })
    }
}

// --------------------------------------------------------------- witness --

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct WitnessSpec {
    /// Batch JSONL file for empirical witnesses.
    #[arg(long)]
    pub batch: Option<PathBuf>,
    /// Compute exact witnesses of a model instead of a batch.
    #[arg(long, action = clap::ArgAction::SetTrue)]
    pub exact: Option<bool>,
    /// Model for --exact: classical | meanfield | boson | misaligned.
    #[arg(long)]
    pub model: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceSpec,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub bad: Option<usize>,
    /// Phase draws for the mean-field average.
    #[arg(long)]
    pub draws: Option<u64>,
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the summary as CSV rows (model,n,m,quantity,value,stderr).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write the per-event table (event,probability,forbidden);
    /// exact mode only.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessConfig {
    pub mode: String, // "batch" or "exact"
    pub batch: Option<String>,
    pub model: Option<String>,
    pub source: Option<ResolvedSource>,
    pub bad: usize,
    pub draws: u64,
    pub cap: u64,
    pub seed: u64,
    #[serde(skip)]
    pub batch_path: Option<PathBuf>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[serde(skip)]
    pub table: Option<PathBuf>,
}

impl WitnessSpec {
    pub fn merge(self, file: WitnessSpec) -> WitnessSpec {
        WitnessSpec {
            batch: self.batch.or(file.batch),
            exact: self.exact.or(file.exact),
            model: self.model.or(file.model),
            source: self.source.merge(file.source),
            n: self.n.or(file.n),
            bad: self.bad.or(file.bad),
            draws: self.draws.or(file.draws),
            cap: self.cap.or(file.cap),
            seed: self.seed.or(file.seed),
            out: self.out.or(file.out),
            csv: self.csv.or(file.csv),
            table: self.table.or(file.table),
            config: None,
        }
    }

    pub fn resolve(self) -> Result<WitnessConfig> {
        let exact = self.exact.unwrap_or(false);
        if exact == self.batch.is_some() {
            return Err(CliError::Config(
                "pick exactly one of --batch or --exact".into(),
            ));
        }
        let (model, source) = if exact {
            let model = self.model.ok_or_else(|| missing("model"))?;
            if !["classical", "meanfield", "boson", "misaligned"].contains(&model.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown exact-witness model `{model}`"
                )));
            }
            (Some(model), Some(self.source.resolve(self.n)?))
        } else {
            (None, None)
        };
        Ok(WitnessConfig {
            mode: if exact { "exact".into() } else { "batch".into() },
            batch: self.batch.as_ref().map(|p| p.display().to_string()),
            model,
            source,
            bad: self.bad.unwrap_or(1),
            draws: self.draws.unwrap_or(10_000),
            cap: self.cap.unwrap_or(DEFAULT_CAP),
            seed: self.seed.unwrap_or_else(entropy_seed),
            batch_path: self.batch,
            out: self.out,
            csv: self.csv,
            table: self.table,
        })
    }
}

// -------------------------------------------------------------- estimate --

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct EstimateSpec {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub p: Option<u32>,
    /// Average deviation magnitude ‖δ‖ for the inaccuracy estimates.
    #[arg(long = "avg-dev")]
    pub avg_dev: Option<f64>,
    /// Weight of the perfectly indistinguishable term, ∏|c_{q,1}|².
    #[arg(long = "indist-weight")]
    pub indist_weight: Option<f64>,
    /// Target false-accept probability for the required-runs calculator.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateConfig {
    pub n: usize,
    pub m: Option<u64>,
    pub avg_dev: Option<f64>,
    pub indist_weight: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl EstimateSpec {
    pub fn merge(self, file: EstimateSpec) -> EstimateSpec {
        EstimateSpec {
            n: self.n.or(file.n),
            m: self.m.or(file.m),
            p: self.p.or(file.p),
            avg_dev: self.avg_dev.or(file.avg_dev),
            indist_weight: self.indist_weight.or(file.indist_weight),
            alpha: self.alpha.or(file.alpha),
            out: self.out.or(file.out),
            config: None,
        }
    }

    pub fn resolve(self) -> Result<EstimateConfig> {
        let n = self.n.ok_or_else(|| missing("n"))?;
        Ok(EstimateConfig {
            n,
            m: resolve_mode_count(self.m, Some(n), self.p)?,
            avg_dev: self.avg_dev,
            indist_weight: self.indist_weight,
            alpha: self.alpha,
            out: self.out,
        })
    }
}

// ---------------------------------------------------------------- figure --

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureKind {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
}

impl FromStr for FigureKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2a" => Ok(FigureKind::Fig2a),
            "fig2b" => Ok(FigureKind::Fig2b),
            "fig3" => Ok(FigureKind::Fig3),
            "fig4" => Ok(FigureKind::Fig4),
            other => Err(CliError::Config(format!("unknown figure `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct FigureSpec {
    /// Which data table: fig2a | fig2b | fig3 | fig4.
    #[arg(long)]
    pub which: Option<String>,
    /// Particle counts, e.g. `3,4`.
    #[arg(long = "n-list")]
    pub n_list: Option<String>,
    /// Matrices per point (fig2a) or deviation draws per point (fig4).
    #[arg(long)]
    pub ensemble: Option<usize>,
    /// Phase draws per mean-field average.
    #[arg(long)]
    pub draws: Option<u64>,
    /// Deviation magnitudes for fig4, e.g. `0.005,0.01,0.02`.
    #[arg(long = "avg-dev-list")]
    pub avg_dev_list: Option<String>,
    /// Forbidden-event subsample size for fig4 (defaults to exact when the
    /// forbidden set is small, 200 otherwise).
    #[arg(long)]
    pub subsample: Option<u64>,
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureConfig {
    pub which: FigureKind,
    pub n_list: Vec<usize>,
    pub ensemble: usize,
    pub draws: u64,
    pub avg_dev_list: Vec<f64>,
    pub subsample: Option<u64>,
    pub cap: u64,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl FigureSpec {
    pub fn merge(self, file: FigureSpec) -> FigureSpec {
        FigureSpec {
            which: self.which.or(file.which),
            n_list: self.n_list.or(file.n_list),
            ensemble: self.ensemble.or(file.ensemble),
            draws: self.draws.or(file.draws),
            avg_dev_list: self.avg_dev_list.or(file.avg_dev_list),
            subsample: self.subsample.or(file.subsample),
            cap: self.cap.or(file.cap),
            seed: self.seed.or(file.seed),
            out: self.out.or(file.out),
            config: None,
        }
    }

    pub fn resolve(self) -> Result<FigureConfig> {
        let which = FigureKind::from_str(&self.which.ok_or_else(|| missing("which"))?)?;
        let n_list = match self.n_list {
            Some(s) => parse_list(&s, "--n-list")?,
            None => match which {
                FigureKind::Fig2a | FigureKind::Fig2b => vec![3, 4],
                FigureKind::Fig3 => vec![2, 3, 4, 5],
                FigureKind::Fig4 => vec![3],
            },
        };
        if n_list.is_empty() || n_list.iter().any(|&n| n < 2) {
            return Err(CliError::Config("--n-list needs entries ≥ 2".into()));
        }
        let avg_dev_list = match self.avg_dev_list {
            Some(s) => parse_list(&s, "--avg-dev-list")?,
            None => vec![0.005, 0.01, 0.02, 0.03, 0.05, 0.1],
        };
        let (ensemble, draws) = match which {
            FigureKind::Fig2a => (self.ensemble.unwrap_or(100), self.draws.unwrap_or(10_000)),
            FigureKind::Fig2b => (self.ensemble.unwrap_or(1), self.draws.unwrap_or(100_000)),
            FigureKind::Fig3 => (self.ensemble.unwrap_or(1), self.draws.unwrap_or(20_000)),
            FigureKind::Fig4 => (self.ensemble.unwrap_or(400), self.draws.unwrap_or(0)),
        };
        Ok(FigureConfig {
            which,
            n_list,
            ensemble,
            draws,
            avg_dev_list,
            subsample: self.subsample,
            cap: self.cap.unwrap_or(DEFAULT_CAP),
            seed: self.seed.unwrap_or_else(entropy_seed),
            out: self.out,
        })
    }
}
