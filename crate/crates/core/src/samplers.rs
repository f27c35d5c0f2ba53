//! Seeded event-stream generators for the four sampling models, plus the
//! misaligned variant.
//!
//! Every sampler is a pure function of its arguments: shot `i` consumes the
//! counter-based stream `(seed, i)` (see [`crate::rng`]), so a batch is
//! reproducible bit-exactly and shot prefixes coincide across different shot
//! counts. The bosonic and misaligned samplers are exact: they tabulate the
//! full event distribution once (the `cap` argument bounds that table) and
//! draw shots by inverse CDF.

use alloc::vec::Vec;
use core::str::FromStr;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::events::{
    enumerate_events, multiset_count, unrank_event, InputConfig, Mode, OccupationEvent,
};
use crate::fp;
use crate::linalg::{MatrixLabel, ModeUnitary};
use crate::permanent::{boson_probability, misaligned_probability};
use crate::rng::StreamRng;

/// Reserved stream index for draws shared by all shots (frozen phases).
const SHARED_STREAM: u64 = u64::MAX;

/// Row-normalization budget for samplers that route by `|U_{j,k}|²`.
const ROW_NORM_TOL: f64 = 1e-10;

/// Which physical model generated a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Uniform,
    Classical,
    MeanField,
    Boson,
    Misaligned,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Uniform => "uniform",
            Model::Classical => "classical",
            Model::MeanField => "meanfield",
            Model::Boson => "boson",
            Model::Misaligned => "misaligned",
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Model::Uniform),
            "classical" => Ok(Model::Classical),
            "meanfield" => Ok(Model::MeanField),
            "boson" => Ok(Model::Boson),
            "misaligned" => Ok(Model::Misaligned),
            other => Err(Error::InvalidArgument(alloc::format!(
                "unknown sampling model `{other}`"
            ))),
        }
    }
}

/// Batch provenance: sizes, matrix label and shot count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchMeta {
    pub particles: usize,
    pub modes: Mode,
    pub matrix_label: Option<MatrixLabel>,
    pub shots: u64,
}

/// A seeded, reproducible stream of output events.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub model: Model,
    pub seed: u64,
    pub meta: BatchMeta,
    pub events: Vec<OccupationEvent>,
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::InvalidArgument("samplers need shots ≥ 1".into()));
    }
    Ok(())
}

fn check_input_fits(u: &ModeUnitary, input: &InputConfig) -> Result<()> {
    let m = u.dim() as Mode;
    for &j in input.modes() {
        if j > m {
            return Err(Error::ModeOutOfRange { mode: j, modes: m });
        }
    }
    Ok(())
}

/// First index whose cumulative weight exceeds `target`; the last bin absorbs
/// rounding at the top end.
fn draw_from_cdf(cdf: &[f64], target: f64) -> usize {
    let idx = cdf.partition_point(|&c| c <= target);
    idx.min(cdf.len() - 1)
}

/// I.i.d. uniform draws over all `C(m+n−1, n)` multisets, by unranking a
/// uniform integer. Ignores any matrix or input configuration.
pub fn sample_uniform(n: usize, m: Mode, shots: u64, seed: u64) -> Result<SampleBatch> {
    check_shots(shots)?;
    let count = multiset_count(n, m).filter(|&c| c > 0).ok_or_else(|| {
        Error::SizeOverflow(alloc::format!("multiset count for n={n}, m={m}"))
    })?;
    let mut events = Vec::with_capacity(shots as usize);
    for shot in 0..shots {
        let mut rng = StreamRng::new(seed, shot);
        events.push(unrank_event(n, m, rng.next_u128_below(count))?);
    }
    Ok(SampleBatch {
        model: Model::Uniform,
        seed,
        meta: BatchMeta { particles: n, modes: m, matrix_label: None, shots },
        events,
    })
}

/// Distinguishable particles routed independently: particle prepared in `j`
/// exits at `k` with probability `|U_{j,k}|²`.
pub fn sample_classical(
    u: &ModeUnitary,
    input: &InputConfig,
    shots: u64,
    seed: u64,
) -> Result<SampleBatch> {
    check_shots(shots)?;
    check_input_fits(u, input)?;
    let m = u.dim();
    let mut cdfs = Vec::with_capacity(input.particle_count());
    for (r, &j) in input.modes().iter().enumerate() {
        let row = u.row(j as usize);
        let norm: f64 = row.iter().map(|z| z.norm_sqr()).sum();
        if fp::fabs(norm - 1.0) > ROW_NORM_TOL {
            return Err(Error::RowNotNormalized { row: r + 1, norm });
        }
        let mut cdf = Vec::with_capacity(m);
        let mut acc = 0.0;
        for z in row {
            acc += z.norm_sqr();
            cdf.push(acc);
        }
        cdfs.push(cdf);
    }
    let mut events = Vec::with_capacity(shots as usize);
    for shot in 0..shots {
        let mut rng = StreamRng::new(seed, shot);
        let modes: Vec<Mode> = cdfs
            .iter()
            .map(|cdf| draw_from_cdf(cdf, rng.next_f64()) as Mode + 1)
            .collect();
        events.push(OccupationEvent::new(modes, m as Mode)?);
    }
    Ok(SampleBatch {
        model: Model::Classical,
        seed,
        meta: BatchMeta {
            particles: input.particle_count(),
            modes: m as Mode,
            matrix_label: Some(u.label()),
            shots,
        },
        events,
    })
}

/// Single-particle output distribution of the random-phase macroscopic
/// superposition: `p_q = |Σ_r e^{iθ_r} U_{j_r,q}|² / n`.
pub(crate) fn meanfield_distribution(
    u: &ModeUnitary,
    input: &InputConfig,
    phases: &[f64],
    out: &mut Vec<f64>,
) {
    let m = u.dim();
    let n = input.particle_count();
    let mut amps = alloc::vec![Complex64::new(0.0, 0.0); m];
    for (r, &j) in input.modes().iter().enumerate() {
        let rot = Complex64::new(fp::cos(phases[r]), fp::sin(phases[r]));
        for (q, &amp) in u.row(j as usize).iter().enumerate() {
            amps[q] += rot * amp;
        }
    }
    out.clear();
    out.extend(amps.iter().map(|amp| amp.norm_sqr() / n as f64));
}

fn sample_meanfield_impl(
    u: &ModeUnitary,
    input: &InputConfig,
    shots: u64,
    seed: u64,
    frozen: bool,
) -> Result<SampleBatch> {
    check_shots(shots)?;
    check_input_fits(u, input)?;
    let n = input.particle_count();
    let m = u.dim();
    let frozen_phases: Vec<f64> = if frozen {
        let mut rng = StreamRng::new(seed, SHARED_STREAM);
        (0..n).map(|_| rng.next_angle()).collect()
    } else {
        Vec::new()
    };
    let mut p = Vec::with_capacity(m);
    let mut phases = alloc::vec![0.0f64; n];
    let mut cdf = alloc::vec![0.0f64; m];
    let mut events = Vec::with_capacity(shots as usize);
    for shot in 0..shots {
        let mut rng = StreamRng::new(seed, shot);
        if frozen {
            phases.copy_from_slice(&frozen_phases);
        } else {
            for phi in phases.iter_mut() {
                *phi = rng.next_angle();
            }
        }
        meanfield_distribution(u, input, &phases, &mut p);
        debug_assert!(
            fp::fabs(p.iter().sum::<f64>() - 1.0) <= 1e-10,
            "mean-field distribution not normalized"
        );
        let mut acc = 0.0;
        for (q, &w) in p.iter().enumerate() {
            acc += w;
            cdf[q] = acc;
        }
        let modes: Vec<Mode> = (0..n)
            .map(|_| draw_from_cdf(&cdf, rng.next_f64() * acc) as Mode + 1)
            .collect();
        events.push(OccupationEvent::new(modes, m as Mode)?);
    }
    Ok(SampleBatch {
        model: Model::MeanField,
        seed,
        meta: BatchMeta {
            particles: n,
            modes: m as Mode,
            matrix_label: Some(u.label()),
            shots,
        },
        events,
    })
}

/// Mean-field sampler: each shot draws fresh uniform phases `θ_r`, forms the
/// single-particle distribution `p^mf`, then places all `n` particles
/// i.i.d. from it.
pub fn sample_meanfield(
    u: &ModeUnitary,
    input: &InputConfig,
    shots: u64,
    seed: u64,
) -> Result<SampleBatch> {
    sample_meanfield_impl(u, input, shots, seed, false)
}

/// Mean-field sampler with one phase setting shared by every shot — the
/// single-realization behavior in which particles stay classically
/// correlated across shots.
pub fn sample_meanfield_frozen(
    u: &ModeUnitary,
    input: &InputConfig,
    shots: u64,
    seed: u64,
) -> Result<SampleBatch> {
    sample_meanfield_impl(u, input, shots, seed, true)
}

/// Exact probability table over the full event space: events in enumeration
/// order with their cumulative weights.
struct EventTable {
    events: Vec<OccupationEvent>,
    cumulative: Vec<f64>,
    total: f64,
}

fn build_table<F>(n: usize, m: Mode, cap: u64, mut prob: F) -> Result<EventTable>
where
    F: FnMut(&OccupationEvent) -> Result<f64>,
{
    let mut events = Vec::new();
    let mut cumulative = Vec::new();
    let mut acc = 0.0;
    for event in enumerate_events(n, m, cap)? {
        acc += prob(&event)?;
        events.push(event);
        cumulative.push(acc);
    }
    Ok(EventTable { events, cumulative, total: acc })
}

fn sample_from_table(
    table: &EventTable,
    model: Model,
    u: &ModeUnitary,
    n: usize,
    shots: u64,
    seed: u64,
) -> SampleBatch {
    let mut events = Vec::with_capacity(shots as usize);
    for shot in 0..shots {
        let mut rng = StreamRng::new(seed, shot);
        let idx = draw_from_cdf(&table.cumulative, rng.next_f64() * table.total);
        events.push(table.events[idx].clone());
    }
    SampleBatch {
        model,
        seed,
        meta: BatchMeta {
            particles: n,
            modes: u.dim() as Mode,
            matrix_label: Some(u.label()),
            shots,
        },
        events,
    }
}

/// Exact boson sampler: tabulates the permanent-weighted distribution over
/// all `C(m+n−1, n)` events (refused above `cap`), then draws shots by
/// inverse CDF.
pub fn sample_boson(
    u: &ModeUnitary,
    input: &InputConfig,
    shots: u64,
    seed: u64,
    cap: u64,
) -> Result<SampleBatch> {
    check_shots(shots)?;
    check_input_fits(u, input)?;
    let n = input.particle_count();
    let table = build_table(n, u.dim() as Mode, cap, |e| boson_probability(u, input, e))?;
    Ok(sample_from_table(&table, Model::Boson, u, n, shots, seed))
}

/// Exact sampler for the misaligned model (particle `bad` distinguishable);
/// the same table-based scheme as [`sample_boson`].
pub fn sample_misaligned(
    u: &ModeUnitary,
    input: &InputConfig,
    bad: usize,
    shots: u64,
    seed: u64,
    cap: u64,
) -> Result<SampleBatch> {
    check_shots(shots)?;
    check_input_fits(u, input)?;
    let n = input.particle_count();
    let table = build_table(n, u.dim() as Mode, cap, |e| {
        misaligned_probability(u, input, bad, e)
    })?;
    Ok(sample_from_table(&table, Model::Misaligned, u, n, shots, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{make_fourier, perturb};
    use alloc::vec;

    #[test]
    fn uniform_covers_the_small_event_space() {
        let batch = sample_uniform(2, 2, 300, 11).unwrap();
        assert_eq!(batch.events.len(), 300);
        let mut seen = [0u32; 3];
        for e in &batch.events {
            match e.modes() {
                [1, 1] => seen[0] += 1,
                [1, 2] => seen[1] += 1,
                [2, 2] => seen[2] += 1,
                other => panic!("unexpected event {other:?}"),
            }
        }
        assert!(seen.iter().all(|&c| c > 0), "counts {seen:?}");
    }

    #[test]
    fn samplers_are_deterministic_with_prefix_stability() {
        let u = make_fourier(4).unwrap();
        let input = InputConfig::indistinguishable(vec![1, 3]).unwrap();
        let long = sample_boson(&u, &input, 40, 5, 1000).unwrap();
        let again = sample_boson(&u, &input, 40, 5, 1000).unwrap();
        assert_eq!(long, again);
        // Shot i depends only on (seed, i): shorter runs are prefixes.
        let short = sample_boson(&u, &input, 10, 5, 1000).unwrap();
        assert_eq!(&long.events[..10], &short.events[..]);
        let other_seed = sample_boson(&u, &input, 40, 6, 1000).unwrap();
        assert_ne!(long.events, other_seed.events);
    }

    #[test]
    fn beam_splitter_bosons_only_bunch() {
        let u = make_fourier(2).unwrap();
        let input = InputConfig::indistinguishable(vec![1, 2]).unwrap();
        let batch = sample_boson(&u, &input, 2000, 3, 100).unwrap();
        for e in &batch.events {
            assert!(!e.is_collision_free(), "coincidence event {:?} sampled", e.modes());
        }
    }

    #[test]
    fn single_particle_boson_reduces_to_classical_marginals() {
        let u = make_fourier(5).unwrap();
        let input = InputConfig::indistinguishable(vec![3]).unwrap();
        let table = build_table(1, 5, 100, |e| boson_probability(&u, &input, e)).unwrap();
        for (i, e) in table.events.iter().enumerate() {
            let k = e.modes()[0] as usize;
            let expect = u.entry(3, k).norm_sqr();
            let weight = if i == 0 {
                table.cumulative[0]
            } else {
                table.cumulative[i] - table.cumulative[i - 1]
            };
            assert!(fp::fabs(weight - expect) <= 1e-12);
        }
    }

    #[test]
    fn meanfield_single_particle_distribution_is_the_row() {
        let u = make_fourier(4).unwrap();
        let input = InputConfig::indistinguishable(vec![2]).unwrap();
        let mut p = Vec::new();
        meanfield_distribution(&u, &input, &[1.234], &mut p);
        for (q, &w) in p.iter().enumerate() {
            assert!(fp::fabs(w - u.entry(2, q + 1).norm_sqr()) <= 1e-12);
        }
    }

    #[test]
    fn meanfield_distribution_normalizes_for_any_phases() {
        let u = make_fourier(9).unwrap();
        let input = InputConfig::indistinguishable(vec![1, 4, 7]).unwrap();
        let mut p = Vec::new();
        for phases in [[0.0, 0.0, 0.0], [0.3, 2.2, 5.9], [3.1, 0.01, 4.4]] {
            meanfield_distribution(&u, &input, &phases, &mut p);
            let sum: f64 = p.iter().sum();
            assert!(fp::fabs(sum - 1.0) <= 1e-10, "sum {sum}");
        }
    }

    #[test]
    fn frozen_meanfield_shares_one_phase_setting() {
        let u = make_fourier(9).unwrap();
        let input = InputConfig::indistinguishable(vec![1, 4, 7]).unwrap();
        let frozen = sample_meanfield_frozen(&u, &input, 50, 9).unwrap();
        let again = sample_meanfield_frozen(&u, &input, 50, 9).unwrap();
        assert_eq!(frozen, again);
        let fresh = sample_meanfield(&u, &input, 50, 9).unwrap();
        assert_ne!(frozen.events, fresh.events);
    }

    #[test]
    fn classical_rejects_nonnormalized_rows() {
        let u = make_fourier(4).unwrap();
        let (w, _) = perturb(&u, 0.3, 1).unwrap();
        let input = InputConfig::indistinguishable(vec![1, 2]).unwrap();
        assert!(matches!(
            sample_classical(&w, &input, 10, 0),
            Err(Error::RowNotNormalized { .. })
        ));
    }

    #[test]
    fn boson_cap_is_enforced() {
        let u = make_fourier(9).unwrap();
        let input = InputConfig::indistinguishable(vec![1, 4, 7]).unwrap();
        assert!(matches!(
            sample_boson(&u, &input, 10, 0, 100),
            Err(Error::CapExceeded { count: Some(165), cap: 100 })
        ));
    }

    #[test]
    fn zero_shots_are_rejected() {
        assert!(sample_uniform(2, 4, 0, 1).is_err());
    }
}
