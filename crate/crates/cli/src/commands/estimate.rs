//! `bosim estimate` — calculators for the distinguishability bound, the
//! first-order deviation estimates and the required-runs confidence
//! arithmetic.

use bosim_core::certify::{p_approx, required_runs, v_dev_estimate, v_total_estimate};
use serde::Serialize;

use crate::config::{config_hash, EstimateConfig};
use crate::formats::emit_json;
use crate::{CliError, Result, VERSION};

#[derive(Debug, Serialize)]
pub struct EstimateJson {
    pub version: String,
    pub config_hash: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avg_dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_approx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beyond_validity: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_dev_general: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_dev_closed_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indist_weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_partial_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub required_runs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_total_estimate: Option<f64>,
}

pub fn report(cfg: &EstimateConfig) -> Result<EstimateJson> {
    let mut json = EstimateJson {
        version: VERSION.to_string(),
        config_hash: config_hash(cfg),
        n: cfg.n,
        m: cfg.m,
        avg_dev: cfg.avg_dev,
        p_approx: None,
        beyond_validity: None,
        v_dev_general: None,
        v_dev_closed_form: None,
        indist_weight: cfg.indist_weight,
        v_partial_bound: None,
        alpha: cfg.alpha,
        required_runs: None,
        v_total_estimate: None,
    };
    if let Some(dev) = cfg.avg_dev {
        let m = cfg
            .m
            .ok_or_else(|| CliError::Config("deviation estimates need --m or --p".into()))?;
        let p = p_approx(cfg.n, m, dev)?;
        let v = v_dev_estimate(cfg.n, m, dev)?;
        json.p_approx = Some(p.value);
        json.beyond_validity = Some(p.beyond_validity);
        json.v_dev_general = Some(v.general);
        json.v_dev_closed_form = v.closed_form;
    }
    if let Some(w) = cfg.indist_weight {
        if !(0.0..=1.0).contains(&w) {
            return Err(CliError::Config(format!(
                "--indist-weight must lie in [0, 1], got {w}"
            )));
        }
        json.v_partial_bound = Some((cfg.n as f64 - 1.0) / cfg.n as f64 * (1.0 - w));
    }
    if let Some(alpha) = cfg.alpha {
        json.required_runs = Some(required_runs(cfg.n as u64, alpha)?);
    }
    if let (Some(partial), Some(general)) = (json.v_partial_bound, json.v_dev_general) {
        let dev = json.v_dev_closed_form.unwrap_or(general);
        json.v_total_estimate = Some(v_total_estimate(partial, dev));
    }
    Ok(json)
}

pub fn run(cfg: EstimateConfig) -> Result<()> {
    let json = report(&cfg)?;
    emit_json(&json, cfg.out.as_deref())
}
