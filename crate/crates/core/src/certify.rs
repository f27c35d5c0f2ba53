//! Suppression-law certification, coarse-grained witnesses and the two
//! inaccuracy estimators.
//!
//! For the `m = n^p` Fourier matrix with the cyclically symmetric input,
//! every event whose mode-index sum is nonzero mod `n` is forbidden. The
//! violation `𝒱` is the fraction of observed events that are forbidden; an
//! ideal boson sampler has `𝒱 = 0`, and a structureless sampler passes a
//! clean `R`-event test only with probability `n^{−R}`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::events::{binomial, enumerate_events, multiset_count, unrank_event, InputConfig, Mode, OccupationEvent};
use crate::fp;
use crate::linalg::ModeUnitary;
use crate::permanent::boson_probability;
use crate::rng::StreamRng;
use crate::samplers::{meanfield_distribution, Model, SampleBatch};

/// Largest mode count for which per-mode witness vectors are allocated.
const WITNESS_MODE_LIMIT: Mode = 10_000_000;

/// True iff the event is forbidden by the suppression law for `n` particles:
/// `Σ_l k̄_l mod n ≠ 0`.
///
/// Pure index arithmetic — no matrix, no permanent — so it scales to
/// millions of particles in trivially predictable time.
pub fn is_forbidden(event: &OccupationEvent, n: u64) -> bool {
    assert!(n >= 1, "particle count must be ≥ 1");
    event.mode_sum() % n as u128 != 0
}

/// Chance that `runs` events from a structureless sampler all satisfy the
/// suppression law: `n^{−runs}`.
pub fn false_accept_probability(n: u64, runs: u64) -> f64 {
    1.0 / fp::powi(n as f64, runs.min(u32::MAX as u64) as u32)
}

/// Smallest number of clean events `R` with `n^{−R} ≤ alpha`.
pub fn required_runs(n: u64, alpha: f64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidArgument("confidence needs n ≥ 2".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "confidence level must lie in (0, 1], got {alpha}"
        )));
    }
    let mut runs = 0u64;
    let mut pow = 1.0f64;
    while alpha * pow < 1.0 {
        pow *= n as f64;
        runs += 1;
    }
    Ok(runs)
}

/// Violation tally of a batch against the suppression law.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub model: Model,
    pub particles: usize,
    pub forbidden: u64,
    pub runs: u64,
    /// `forbidden / runs`.
    pub violation: f64,
    /// `n^{−runs}`, reported only for a clean batch (no forbidden event).
    pub false_accept_prob: Option<f64>,
}

/// Counts forbidden events in a batch.
pub fn violation(batch: &SampleBatch) -> Result<ViolationReport> {
    if batch.events.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let n = batch.meta.particles as u64;
    let runs = batch.events.len() as u64;
    let forbidden = batch.events.iter().filter(|e| is_forbidden(e, n)).count() as u64;
    Ok(ViolationReport {
        model: batch.model,
        particles: batch.meta.particles,
        forbidden,
        runs,
        violation: forbidden as f64 / runs as f64,
        false_accept_prob: (forbidden == 0).then(|| false_accept_probability(n, runs)),
    })
}

/// Exact multiset counts `(total, forbidden)` for `n` particles over `m`
/// modes, by dynamic programming over mode-residue classes (no enumeration).
/// `None` when a count overflows 128 bits.
pub fn forbidden_event_count(n: usize, m: Mode) -> Option<(u128, u128)> {
    if n == 0 || m == 0 {
        return Some((0, 0));
    }
    let n_u = n as u64;
    // state[j][s]: multisets of j particles over the classes seen so far
    // with weighted residue sum ≡ s (mod n).
    let mut state = vec![vec![0u128; n]; n + 1];
    state[0][0] = 1;
    for r in 0..n_u {
        let class_modes = m / n_u + if r >= 1 && r <= m % n_u { 1 } else { 0 };
        if class_modes == 0 {
            continue;
        }
        let mut next = vec![vec![0u128; n]; n + 1];
        for j in 0..=n {
            for s in 0..n {
                let ways = state[j][s];
                if ways == 0 {
                    continue;
                }
                for t in 0..=(n - j) {
                    let picks = binomial(class_modes as u128 + t as u128 - 1, t as u128)?;
                    let s2 = (s + (t as u64 * r) as usize % n) % n;
                    let cell = &mut next[j + t][s2];
                    *cell = cell.checked_add(ways.checked_mul(picks)?)?;
                }
            }
        }
        state = next;
    }
    let allowed = state[n][0];
    let total: u128 = state[n].iter().try_fold(0u128, |a, &b| a.checked_add(b))?;
    Some((total, total - allowed))
}

/// Infinite-shot violation of an exact model: the summed probability of all
/// forbidden events, by full enumeration (bounded by `cap`).
pub fn expected_violation_exact<F>(mut prob: F, n: usize, m: Mode, cap: u64) -> Result<f64>
where
    F: FnMut(&OccupationEvent) -> Result<f64>,
{
    let n_u = n as u64;
    let mut total = 0.0;
    for event in enumerate_events(n, m, cap)? {
        if is_forbidden(&event, n_u) {
            total += prob(&event)?;
        }
    }
    Ok(total)
}

/// Violation estimate from `sample_size` distinct forbidden events drawn
/// uniformly, rescaled to the full forbidden count. Returns the estimate and
/// its standard error. Falls back to nothing — callers wanting exactness use
/// [`expected_violation_exact`].
pub fn expected_violation_sampled<F>(
    mut prob: F,
    n: usize,
    m: Mode,
    sample_size: u64,
    seed: u64,
) -> Result<(f64, f64)>
where
    F: FnMut(&OccupationEvent) -> Result<f64>,
{
    if sample_size == 0 {
        return Err(Error::InvalidArgument("subset size must be ≥ 1".into()));
    }
    let (total, forbidden) = forbidden_event_count(n, m)
        .ok_or_else(|| Error::SizeOverflow(alloc::format!("event counts for n={n}, m={m}")))?;
    if forbidden == 0 {
        return Err(Error::NoForbiddenEvents);
    }
    let take = (sample_size as u128).min(forbidden) as u64;
    let mut rng = StreamRng::new(seed, 0);
    let mut chosen = BTreeSet::new();
    let mut values = Vec::with_capacity(take as usize);
    while (values.len() as u64) < take {
        let rank = rng.next_u128_below(total);
        let event = unrank_event(n, m, rank)?;
        if is_forbidden(&event, n as u64) && chosen.insert(rank) {
            values.push(prob(&event)?);
        }
    }
    let count = values.len() as f64;
    let mean: f64 = values.iter().sum::<f64>() / count;
    let scale = forbidden as f64;
    // Exhausting the whole forbidden set makes the estimate exact.
    let se = if values.len() >= 2 && (values.len() as u128) < forbidden {
        let var: f64 =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0);
        scale * fp::sqrt(var / count)
    } else {
        0.0
    };
    Ok((scale * mean, se))
}

/// Monte-Carlo estimate of the deviation-induced violation
/// `Σ_{forbidden k̄} P(k̄; W)` for a perturbed matrix `W`.
///
/// With `sample_size = None` (or a size covering the whole forbidden set)
/// the sum runs over every forbidden event exactly (standard error 0);
/// otherwise over a random distinct subset, rescaled.
pub fn v_dev_numeric(
    w: &ModeUnitary,
    input: &InputConfig,
    sample_size: Option<u64>,
    seed: u64,
    cap: u64,
) -> Result<(f64, f64)> {
    let n = input.particle_count();
    let m = w.dim() as Mode;
    let (_, forbidden) = forbidden_event_count(n, m)
        .ok_or_else(|| Error::SizeOverflow(alloc::format!("event counts for n={n}, m={m}")))?;
    if forbidden == 0 {
        return Err(Error::NoForbiddenEvents);
    }
    match sample_size {
        Some(size) if (size as u128) < forbidden => {
            expected_violation_sampled(|e| boson_probability(w, input, e), n, m, size, seed)
        }
        _ => {
            let v = expected_violation_exact(|e| boson_probability(w, input, e), n, m, cap)?;
            Ok((v, 0.0))
        }
    }
}

/// Coarse-grained observables of a batch or model: coincidence probability,
/// clouding (even mode counts only) and per-mode mean occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSummary {
    /// Probability of collision-free events.
    pub p1: f64,
    pub p1_stderr: f64,
    /// Probability that all particles exit in the same half of the mode
    /// array; absent for odd mode counts.
    pub clouding: Option<f64>,
    pub clouding_stderr: Option<f64>,
    /// Mean particle number per output mode (length `m`).
    pub mean_occupations: Vec<f64>,
    pub occupation_stderr: Vec<f64>,
}

fn check_witness_modes(m: Mode) -> Result<usize> {
    if m == 0 || m > WITNESS_MODE_LIMIT {
        return Err(Error::InvalidArgument(alloc::format!(
            "witness vectors need 1 ≤ m ≤ {WITNESS_MODE_LIMIT}, got {m}"
        )));
    }
    Ok(m as usize)
}

/// Witnesses of an exact per-event distribution, via full enumeration.
pub fn witnesses_exact<F>(mut prob: F, n: usize, m: Mode, cap: u64) -> Result<WitnessSummary>
where
    F: FnMut(&OccupationEvent) -> Result<f64>,
{
    let m_len = check_witness_modes(m)?;
    let even = m % 2 == 0;
    let mut p1 = 0.0;
    let mut clouding = 0.0;
    let mut occupations = vec![0.0f64; m_len];
    for event in enumerate_events(n, m, cap)? {
        let p = prob(&event)?;
        if event.is_collision_free() {
            p1 += p;
        }
        if even && event.same_half(m)? {
            clouding += p;
        }
        for (&mode, &s) in event.occupations() {
            occupations[mode as usize - 1] += p * s as f64;
        }
    }
    Ok(WitnessSummary {
        p1,
        p1_stderr: 0.0,
        clouding: even.then_some(clouding),
        clouding_stderr: even.then_some(0.0),
        mean_occupations: occupations,
        occupation_stderr: vec![0.0; m_len],
    })
}

/// Empirical witnesses of a sampled batch, with binomial / sample standard
/// errors.
pub fn witnesses_empirical(batch: &SampleBatch) -> Result<WitnessSummary> {
    if batch.events.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let m = batch.meta.modes;
    let m_len = check_witness_modes(m)?;
    let even = m % 2 == 0;
    let shots = batch.events.len() as f64;
    let mut cf = 0u64;
    let mut half = 0u64;
    let mut occ_sum = vec![0.0f64; m_len];
    let mut occ_sumsq = vec![0.0f64; m_len];
    for event in &batch.events {
        if event.is_collision_free() {
            cf += 1;
        }
        if even && event.same_half(m)? {
            half += 1;
        }
        for (&mode, &s) in event.occupations() {
            let s = s as f64;
            occ_sum[mode as usize - 1] += s;
            occ_sumsq[mode as usize - 1] += s * s;
        }
    }
    let p1 = cf as f64 / shots;
    let clouding = half as f64 / shots;
    let mean_occupations: Vec<f64> = occ_sum.iter().map(|&s| s / shots).collect();
    let occupation_stderr: Vec<f64> = occ_sum
        .iter()
        .zip(&occ_sumsq)
        .map(|(&s, &sq)| {
            let mean = s / shots;
            let var = (sq / shots - mean * mean).max(0.0);
            fp::sqrt(var / shots)
        })
        .collect();
    Ok(WitnessSummary {
        p1,
        p1_stderr: fp::sqrt(p1 * (1.0 - p1) / shots),
        clouding: even.then_some(clouding),
        clouding_stderr: even.then_some(fp::sqrt(clouding * (1.0 - clouding) / shots)),
        mean_occupations,
        occupation_stderr,
    })
}

/// Mean occupation of every output mode for any of the matrix-driven models:
/// `⟨n̂_k⟩ = Σ_l |U_{j_l,k}|²` (single-particle marginals are model
/// independent).
pub fn mean_occupations(u: &ModeUnitary, input: &InputConfig) -> Vec<f64> {
    let mut occ = vec![0.0f64; u.dim()];
    for &j in input.modes() {
        for (k, amp) in u.row(j as usize).iter().enumerate() {
            occ[k] += amp.norm_sqr();
        }
    }
    occ
}

fn complex_powi(z: Complex64, mut k: u32) -> Complex64 {
    let mut base = z;
    let mut acc = Complex64::new(1.0, 0.0);
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

/// Mean-field witnesses by Monte-Carlo over phase settings.
///
/// Per setting the collision-free probability is `n!·e_n(p^mf)` (elementary
/// symmetric polynomial) and the clouding probability is
/// `p_low^n + p_high^n`; both integrate over phases by plain averaging.
/// Mean occupations come from the exact single-particle marginals.
pub fn meanfield_witnesses_mc(
    u: &ModeUnitary,
    input: &InputConfig,
    draws: u64,
    seed: u64,
) -> Result<WitnessSummary> {
    if draws == 0 {
        return Err(Error::InvalidArgument("phase average needs draws ≥ 1".into()));
    }
    let n = input.particle_count();
    let m = u.dim();
    check_witness_modes(m as Mode)?;
    let even = m % 2 == 0;
    let n_fact = fp::factorial(n as u64);
    let mut p = Vec::with_capacity(m);
    let mut phases = vec![0.0f64; n];
    let mut elementary = vec![0.0f64; n + 1];
    let (mut p1_sum, mut p1_sumsq) = (0.0, 0.0);
    let (mut c_sum, mut c_sumsq) = (0.0, 0.0);
    for draw in 0..draws {
        let mut rng = StreamRng::new(seed, draw);
        for phi in phases.iter_mut() {
            *phi = rng.next_angle();
        }
        meanfield_distribution(u, input, &phases, &mut p);
        elementary.iter_mut().for_each(|e| *e = 0.0);
        elementary[0] = 1.0;
        for &x in &p {
            for k in (1..=n).rev() {
                elementary[k] += x * elementary[k - 1];
            }
        }
        let p1 = n_fact * elementary[n];
        p1_sum += p1;
        p1_sumsq += p1 * p1;
        if even {
            let low: f64 = p[..m / 2].iter().sum();
            let c = fp::powi(low, n as u32) + fp::powi(1.0 - low, n as u32);
            c_sum += c;
            c_sumsq += c * c;
        }
    }
    let d = draws as f64;
    let stderr = |sum: f64, sumsq: f64| {
        let mean = sum / d;
        fp::sqrt(((sumsq / d - mean * mean).max(0.0)) / d)
    };
    Ok(WitnessSummary {
        p1: p1_sum / d,
        p1_stderr: stderr(p1_sum, p1_sumsq),
        clouding: even.then(|| c_sum / d),
        clouding_stderr: even.then(|| stderr(c_sum, c_sumsq)),
        mean_occupations: mean_occupations(u, input),
        occupation_stderr: vec![0.0; m],
    })
}

/// Mean-field violation of the suppression law by Monte-Carlo over phase
/// settings. Returns mean and standard error.
///
/// Per setting the particles fall i.i.d. from `p^mf`, so the probability of
/// an allowed mode-sum residue follows from the characteristic function:
/// `P(Σk ≡ 0 mod n) = (1/n)·Σ_t (Σ_q p_q ω^{tq})^n` with `ω = e^{2πi/n}` —
/// exact in the event space, no enumeration.
pub fn meanfield_violation_mc(
    u: &ModeUnitary,
    input: &InputConfig,
    draws: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if draws == 0 {
        return Err(Error::InvalidArgument("phase average needs draws ≥ 1".into()));
    }
    let n = input.particle_count();
    let m = u.dim();
    let mut p = Vec::with_capacity(m);
    let mut phases = vec![0.0f64; n];
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for draw in 0..draws {
        let mut rng = StreamRng::new(seed, draw);
        for phi in phases.iter_mut() {
            *phi = rng.next_angle();
        }
        meanfield_distribution(u, input, &phases, &mut p);
        let mut allowed = 0.0;
        for t in 0..n {
            let mut z = Complex64::new(0.0, 0.0);
            for (q, &w) in p.iter().enumerate() {
                // ω^{t·k} with k the 1-based mode index.
                let angle = core::f64::consts::TAU * (t as u128 * (q as u128 + 1) % n as u128) as f64
                    / n as f64;
                z += w * Complex64::new(fp::cos(angle), fp::sin(angle));
            }
            allowed += complex_powi(z, n as u32).re;
        }
        let v = 1.0 - allowed / n as f64;
        sum += v;
        sumsq += v * v;
    }
    let d = draws as f64;
    let mean = sum / d;
    let var = (sumsq / d - mean * mean).max(0.0);
    Ok((mean, fp::sqrt(var / d)))
}

/// Coefficients of each internal state in the Gram-Schmidt-orthonormalized
/// basis of the input states, from their overlap (Gram) matrix.
///
/// Row `r` (1-based length `r`) holds `c_{r,d}`; diagonal entries are real
/// and nonnegative. This is the Cholesky factor of the conjugated Gram
/// matrix, tolerant of semidefinite directions (identical states).
pub fn distinguishability_coeffs(overlap: &[Complex64], n: usize) -> Result<Vec<Vec<Complex64>>> {
    const TOL: f64 = 1e-10;
    if n == 0 || overlap.len() != n * n {
        return Err(Error::InvalidArgument(alloc::format!(
            "{} overlap entries for {n} states",
            overlap.len()
        )));
    }
    let g = |r: usize, s: usize| overlap[r * n + s];
    for r in 0..n {
        if fp::fabs(g(r, r).re - 1.0) > TOL || fp::fabs(g(r, r).im) > TOL {
            return Err(Error::InvalidArgument(alloc::format!(
                "overlap diagonal entry {} is not 1",
                r + 1
            )));
        }
        for s in 0..r {
            if fp::sqrt((g(r, s) - g(s, r).conj()).norm_sqr()) > TOL {
                return Err(Error::InvalidArgument(
                    "overlap matrix is not Hermitian".into(),
                ));
            }
        }
    }
    // conj(G) = C·C† with C lower-triangular.
    let a = |r: usize, s: usize| g(r, s).conj();
    let mut c: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = Vec::with_capacity(r + 1);
        for d in 0..r {
            let mut acc = a(r, d);
            for k in 0..d {
                acc -= row[k] * c[d][k].conj();
            }
            let pivot = c[d][d].re;
            if pivot > TOL {
                row.push(acc / pivot);
            } else if fp::sqrt(acc.norm_sqr()) <= TOL {
                // Semidefinite direction: the state has no component here.
                row.push(Complex64::new(0.0, 0.0));
            } else {
                return Err(Error::NotPositiveSemidefinite { row: r + 1 });
            }
        }
        let residual = a(r, r).re - row.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if residual < -TOL {
            return Err(Error::NotPositiveSemidefinite { row: r + 1 });
        }
        row.push(Complex64::new(fp::sqrt(residual.max(0.0)), 0.0));
        c.push(row);
    }
    Ok(c)
}

/// Upper-bound estimate of the distinguishability-induced violation:
/// `(n−1)/n · (1 − ∏_{q=2}^n |c_{q,1}|²)`.
///
/// An inequality, not an equality — report it as a bound.
pub fn violation_bound_partial(coeffs: &[Vec<Complex64>]) -> f64 {
    let n = coeffs.len();
    if n <= 1 {
        return 0.0;
    }
    let indist_weight: f64 = coeffs[1..].iter().map(|row| row[0].norm_sqr()).product();
    (n as f64 - 1.0) / n as f64 * (1.0 - indist_weight)
}

/// First-order estimate of a single forbidden event's probability under an
/// entry-wise deviation of average magnitude `avg_dev`:
/// `P_approx = (n·n!/m^n)·‖δ‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PApprox {
    pub value: f64,
    /// Set when `‖δ‖ ≥ 1/n`, where the first-order expansion breaks down.
    pub beyond_validity: bool,
}

pub fn p_approx(n: usize, m: Mode, avg_dev: f64) -> Result<PApprox> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("estimate needs n ≥ 1 and m ≥ 1".into()));
    }
    if !(avg_dev >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "average deviation must be nonnegative, got {avg_dev}"
        )));
    }
    let beyond_validity = avg_dev >= 1.0 / n as f64;
    if avg_dev == 0.0 {
        return Ok(PApprox { value: 0.0, beyond_validity });
    }
    let direct = fp::powi(m as f64, n as u32);
    let value = if direct.is_finite() {
        n as f64 * fp::factorial(n as u64) / direct * avg_dev * avg_dev
    } else {
        let ln = fp::log(n as f64) + libm::lgamma(n as f64 + 1.0) - n as f64 * fp::log(m as f64)
            + 2.0 * fp::log(avg_dev);
        fp::exp(ln)
    };
    Ok(PApprox { value, beyond_validity })
}

/// Estimated deviation-induced violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VDevEstimate {
    /// `(n−1)/n · N_events · P_approx` with `N_events = C(m+n−1, n)`.
    pub general: f64,
    /// The `√e·(n−1)·‖δ‖²` closed form, available when `m = n²`.
    pub closed_form: Option<f64>,
    pub beyond_validity: bool,
}

pub fn v_dev_estimate(n: usize, m: Mode, avg_dev: f64) -> Result<VDevEstimate> {
    let p = p_approx(n, m, avg_dev)?;
    let events = match multiset_count(n, m) {
        Some(c) => c as f64,
        None => {
            let a = m as f64 + n as f64;
            fp::exp(libm::lgamma(a) - libm::lgamma(n as f64 + 1.0) - libm::lgamma(m as f64))
        }
    };
    let general = (n as f64 - 1.0) / n as f64 * events * p.value;
    let closed_form = ((n as u64).checked_mul(n as u64) == Some(m)).then(|| {
        fp::sqrt(core::f64::consts::E) * (n as f64 - 1.0) * avg_dev * avg_dev
    });
    Ok(VDevEstimate { general, closed_form, beyond_validity: p.beyond_validity })
}

/// Convenience composition of the two deterioration sources,
/// `𝒱_total ≈ 𝒱_partial + 𝒱_dev`. An approximation that treats them as
/// independent.
pub fn v_total_estimate(v_partial: f64, v_dev: f64) -> f64 {
    v_partial + v_dev
}
