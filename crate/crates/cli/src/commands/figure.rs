//! `bosim figure` — deterministic CSV data tables behind the survey plots:
//! coincidence mimicry across Haar ensembles, clouding on the walk mesh,
//! per-model violation of the suppression law, and the deviation sweep with
//! its first-order estimate.

use bosim_core::certify::{
    expected_violation_exact, forbidden_event_count, meanfield_violation_mc,
    meanfield_witnesses_mc, v_dev_estimate, v_dev_numeric, witnesses_exact,
};
use bosim_core::linalg::{make_fourier, make_haar_random, make_walk_matrix, perturb};
use bosim_core::permanent::{boson_probability, classical_probability, misaligned_probability};
use bosim_core::rng::derive_seed;
use bosim_core::InputConfig;

use super::build_input;
use crate::config::{config_hash, FigureConfig, FigureKind, InputChoice};
use crate::formats::{CsvTable, FileMeta};
use crate::{CliError, Result};

/// Walk-mesh geometry behind the clouding table: 8 modes, 8 layers,
/// particles entering the adjacent modes 1..n.
const WALK_MODES: usize = 8;
const WALK_STEPS: usize = 8;

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

fn table(cfg: &FigureConfig, header: &str) -> CsvTable {
    let meta = FileMeta::new(cfg.seed, config_hash(cfg));
    let echo = serde_json::to_string(cfg).expect("config echo");
    CsvTable::with_config(&meta, Some(&echo), header)
}

/// Renders the requested table; pure in the config.
pub fn render(cfg: &FigureConfig) -> Result<String> {
    match cfg.which {
        FigureKind::Fig2a => fig2a(cfg),
        FigureKind::Fig2b => fig2b(cfg),
        FigureKind::Fig3 => fig3(cfg),
        FigureKind::Fig4 => fig4(cfg),
    }
}

/// Coincidence probability across a Haar ensemble at m = n², per model.
fn fig2a(cfg: &FigureConfig) -> Result<String> {
    let mut csv = table(cfg, "n,model,p1,stderr");
    for &n in &cfg.n_list {
        let m = (n * n) as u64;
        let input = InputConfig::indistinguishable((1..=n as u64).collect())?;
        let mut by_model: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for i in 0..cfg.ensemble {
            let matrix_seed = derive_seed(derive_seed(cfg.seed, n as u64), i as u64);
            let u = make_haar_random(n * n, matrix_seed)?;
            let classical =
                witnesses_exact(|e| classical_probability(&u, &input, e), n, m, cfg.cap)?;
            let meanfield =
                meanfield_witnesses_mc(&u, &input, cfg.draws, derive_seed(matrix_seed, 1))?;
            let boson = witnesses_exact(|e| boson_probability(&u, &input, e), n, m, cfg.cap)?;
            by_model[0].push(classical.p1);
            by_model[1].push(meanfield.p1);
            by_model[2].push(boson.p1);
        }
        for (model, values) in ["classical", "meanfield", "boson"].iter().zip(&by_model) {
            let (mean, se) = mean_and_se(values);
            csv.row(&[n.to_string(), model.to_string(), mean.to_string(), se.to_string()]);
        }
    }
    Ok(csv.into_string())
}

/// Clouding on the beam-splitter walk mesh, per model.
fn fig2b(cfg: &FigureConfig) -> Result<String> {
    let mut csv = table(cfg, "n,model,clouding,stderr");
    let u = make_walk_matrix(WALK_MODES, WALK_STEPS)?;
    let m = WALK_MODES as u64;
    for &n in &cfg.n_list {
        if n > WALK_MODES {
            return Err(CliError::Config(format!(
                "walk mesh holds {WALK_MODES} modes; cannot inject n={n} adjacent particles"
            )));
        }
        let input = InputConfig::indistinguishable((1..=n as u64).collect())?;
        let classical =
            witnesses_exact(|e| classical_probability(&u, &input, e), n, m, cfg.cap)?;
        let meanfield = meanfield_witnesses_mc(
            &u,
            &input,
            cfg.draws,
            derive_seed(cfg.seed, 0x2b00 + n as u64),
        )?;
        let boson = witnesses_exact(|e| boson_probability(&u, &input, e), n, m, cfg.cap)?;
        for (model, w) in [
            ("classical", &classical),
            ("meanfield", &meanfield),
            ("boson", &boson),
        ] {
            csv.row(&[
                n.to_string(),
                model.to_string(),
                w.clouding.expect("even mode count").to_string(),
                w.clouding_stderr.expect("even mode count").to_string(),
            ]);
        }
    }
    Ok(csv.into_string())
}

/// Violation of the suppression law on (Fourier, cyclic input), per model.
fn fig3(cfg: &FigureConfig) -> Result<String> {
    let mut csv = table(cfg, "n,model,violation,stderr");
    for &n in &cfg.n_list {
        let input_choice = InputChoice::Cyclic { n, p: 2 };
        let m = (n * n) as u64;
        let u = make_fourier(n * n)?;
        let input = build_input(&input_choice, m)?;
        let classical = expected_violation_exact(
            |e| classical_probability(&u, &input, e),
            n,
            m,
            cfg.cap,
        )?;
        let (mf, mf_se) = meanfield_violation_mc(
            &u,
            &input,
            cfg.draws,
            derive_seed(cfg.seed, 0x3000 + n as u64),
        )?;
        let misaligned = expected_violation_exact(
            |e| misaligned_probability(&u, &input, 1, e),
            n,
            m,
            cfg.cap,
        )?;
        csv.row(&[n.to_string(), "classical".into(), classical.to_string(), "0".into()]);
        csv.row(&[n.to_string(), "meanfield".into(), mf.to_string(), mf_se.to_string()]);
        csv.row(&[n.to_string(), "misaligned".into(), misaligned.to_string(), "0".into()]);
    }
    Ok(csv.into_string())
}

/// Deviation sweep: Monte-Carlo violation under perturbed matrices against
/// the first-order estimate. The stderr column carries the per-draw spread
/// combined with the forbidden-subsample error.
fn fig4(cfg: &FigureConfig) -> Result<String> {
    let mut csv = table(cfg, "avg_dev,v_numeric,stderr,v_estimate");
    let n = cfg.n_list[0];
    let m = (n * n) as u64;
    let u = make_fourier(n * n)?;
    let input = build_input(&InputChoice::Cyclic { n, p: 2 }, m)?;
    let (_, forbidden) = forbidden_event_count(n, m)
        .ok_or_else(|| CliError::Config(format!("event counts overflow at n={n}")))?;
    // All forbidden events when the set is small, the classic 200-event
    // subsample otherwise.
    let subsample = match cfg.subsample {
        Some(s) if (s as u128) < forbidden => Some(s),
        Some(_) => None,
        None if forbidden <= 1000 => None,
        None => Some(200),
    };
    for (d, &avg_dev) in cfg.avg_dev_list.iter().enumerate() {
        let mut values = Vec::with_capacity(cfg.ensemble);
        let mut subsample_var_sum = 0.0;
        for i in 0..cfg.ensemble {
            let draw_seed = derive_seed(cfg.seed, ((d as u64 + 1) << 32) | i as u64);
            let (w, _) = perturb(&u, avg_dev, draw_seed)?;
            let (v, se) = v_dev_numeric(&w, &input, subsample, draw_seed, cfg.cap)?;
            values.push(v);
            subsample_var_sum += se * se;
        }
        let count = values.len() as f64;
        let mean = values.iter().sum::<f64>() / count;
        let spread = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0)
        } else {
            0.0
        };
        let combined = (spread + subsample_var_sum / count).sqrt();
        let est = v_dev_estimate(n, m, avg_dev)?;
        let estimate = est.closed_form.unwrap_or(est.general);
        csv.row(&[
            avg_dev.to_string(),
            mean.to_string(),
            combined.to_string(),
            estimate.to_string(),
        ]);
    }
    Ok(csv.into_string())
}

pub fn run(cfg: FigureConfig) -> Result<()> {
    let csv = render(&cfg)?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &csv).map_err(crate::CliError::io(path))?;
            let rows = csv.lines().filter(|l| !l.starts_with('#')).count().saturating_sub(1);
            println!("wrote {rows} data rows to {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}
