//! Output events, input configurations and multiset combinatorics.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// 1-based mode index. Wide enough for certification arithmetic on mode
/// counts far beyond what any matrix is ever stored for.
pub type Mode = u64;

/// An output event: `n` particles distributed over modes `1..=m`.
///
/// Stored both as the sorted mode list `k̄` (one entry per particle,
/// repetitions allowed) and as the sparse occupation map `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupationEvent {
    modes: Vec<Mode>,
    occupations: BTreeMap<Mode, u32>,
}

impl OccupationEvent {
    /// Builds an event from per-particle mode indices (any order; sorted
    /// internally). Rejects empty events and indices outside `1..=m`.
    pub fn new(mut modes: Vec<Mode>, mode_count: Mode) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument("event needs at least one particle".into()));
        }
        modes.sort_unstable();
        if modes[0] < 1 || *modes.last().unwrap() > mode_count {
            let bad = if modes[0] < 1 { modes[0] } else { *modes.last().unwrap() };
            return Err(Error::ModeOutOfRange { mode: bad, modes: mode_count });
        }
        let mut occupations = BTreeMap::new();
        for &k in &modes {
            *occupations.entry(k).or_insert(0u32) += 1;
        }
        Ok(OccupationEvent { modes, occupations })
    }

    /// Number of particles `n`.
    pub fn particle_count(&self) -> usize {
        self.modes.len()
    }

    /// Sorted mode list `k̄` (one entry per particle).
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Sparse occupation map mode → count.
    pub fn occupations(&self) -> &BTreeMap<Mode, u32> {
        &self.occupations
    }

    pub fn occupation(&self, mode: Mode) -> u32 {
        self.occupations.get(&mode).copied().unwrap_or(0)
    }

    /// `∏_q s_q!` — the bunching factor dividing permanent-squared weights.
    ///
    /// Exact in 128 bits for every event a permanent kernel accepts
    /// (`n ≤ 34`); larger events are outside any caller's range here.
    pub fn multiplicity_factor(&self) -> u128 {
        let mut acc: u128 = 1;
        for &s in self.occupations.values() {
            for i in 2..=s as u128 {
                acc = acc
                    .checked_mul(i)
                    .expect("occupation factorial overflows 128 bits");
            }
        }
        acc
    }

    /// True iff no mode holds more than one particle.
    pub fn is_collision_free(&self) -> bool {
        self.occupations.values().all(|&s| s <= 1)
    }

    /// True iff all particles sit in modes `1..=m/2` or all in `m/2+1..=m`.
    /// Requires an even mode count.
    pub fn same_half(&self, mode_count: Mode) -> Result<bool> {
        if mode_count % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "same-half split needs an even mode count, got {mode_count}"
            )));
        }
        let half = mode_count / 2;
        let lo = self.modes[0];
        let hi = *self.modes.last().unwrap();
        Ok(hi <= half || lo > half)
    }

    /// `Σ_l k̄_l` as a 128-bit integer (certification-scale events can hold
    /// 10^6 indices of size 10^12).
    pub fn mode_sum(&self) -> u128 {
        self.modes.iter().map(|&k| k as u128).sum()
    }
}

/// Particles prepared one per input mode, with internal-state labels and
/// optionally the lower-triangular overlap coefficients of those states in
/// an orthonormalized basis.
#[derive(Debug, Clone, PartialEq)]
pub struct InputConfig {
    modes: Vec<Mode>,
    labels: Vec<u32>,
    overlap_coeffs: Option<Vec<Vec<Complex64>>>,
}

impl InputConfig {
    /// All particles share one internal state.
    pub fn indistinguishable(modes: Vec<Mode>) -> Result<Self> {
        let labels = alloc::vec![0; modes.len()];
        Self::with_labels(modes, labels)
    }

    /// Particles with explicit internal-state labels; equal labels mean
    /// identical states. Input modes must be distinct.
    pub fn with_labels(modes: Vec<Mode>, labels: Vec<u32>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument("input needs at least one particle".into()));
        }
        if labels.len() != modes.len() {
            return Err(Error::InvalidArgument(format!(
                "{} modes but {} labels",
                modes.len(),
                labels.len()
            )));
        }
        if modes.iter().any(|&j| j < 1) {
            return Err(Error::ModeOutOfRange { mode: 0, modes: Mode::MAX });
        }
        let mut seen = modes.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(
                "input modes must be distinct (one particle per port)".into(),
            ));
        }
        Ok(InputConfig { modes, labels, overlap_coeffs: None })
    }

    /// Attaches lower-triangular overlap coefficients `c_{r,d}` (row `r` has
    /// `r` entries). Each row must be normalized: `Σ_d |c_{r,d}|² = 1`.
    pub fn with_overlap_coeffs(mut self, coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        if coeffs.len() != self.modes.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficient rows for {} particles",
                coeffs.len(),
                self.modes.len()
            )));
        }
        for (r, row) in coeffs.iter().enumerate() {
            if row.len() != r + 1 {
                return Err(Error::InvalidArgument(format!(
                    "coefficient row {} must hold {} entries, found {}",
                    r + 1,
                    r + 1,
                    row.len()
                )));
            }
            let norm: f64 = row.iter().map(|c| c.norm_sqr()).sum();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::RowNotNormalized { row: r + 1, norm });
            }
        }
        self.overlap_coeffs = Some(coeffs);
        Ok(self)
    }

    pub fn particle_count(&self) -> usize {
        self.modes.len()
    }

    /// Input mode list `j̄`.
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn overlap_coeffs(&self) -> Option<&[Vec<Complex64>]> {
        self.overlap_coeffs.as_deref()
    }

    /// True iff every particle carries the same internal label.
    pub fn is_indistinguishable(&self) -> bool {
        self.labels.windows(2).all(|w| w[0] == w[1])
    }
}

/// `C(a, b)` in 128 bits; `None` if any intermediate overflows.
pub(crate) fn binomial(a: u128, b: u128) -> Option<u128> {
    if b > a {
        return Some(0);
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 1..=b {
        acc = acc.checked_mul(a - b + i)? / i;
    }
    Some(acc)
}

/// Number of size-`n` multisets over `m` modes: `C(m+n−1, n)`.
/// `None` when the count overflows 128 bits.
pub fn multiset_count(n: usize, m: Mode) -> Option<u128> {
    binomial(m as u128 + n as u128 - 1, n as u128)
}

/// Lexicographic iterator over all size-`n` multisets of modes `1..=m`.
///
/// A restartable value type: disjoint rank ranges can be run per thread via
/// [`unrank_event`].
#[derive(Debug, Clone)]
pub struct EventEnumeration {
    m: Mode,
    current: Option<Vec<Mode>>,
}

impl Iterator for EventEnumeration {
    type Item = OccupationEvent;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.current.as_mut()?;
        let event = OccupationEvent::new(current.clone(), self.m)
            .expect("enumeration yields valid events");
        // Advance: bump the rightmost index below m, reset the tail to it.
        match current.iter().rposition(|&k| k < self.m) {
            Some(i) => {
                let next = current[i] + 1;
                for k in &mut current[i..] {
                    *k = next;
                }
            }
            None => self.current = None,
        }
        Some(event)
    }
}

/// Enumerates every size-`n` multiset over modes `1..=m` in lexicographic
/// order of `k̄`. Refuses event spaces larger than `cap`.
pub fn enumerate_events(n: usize, m: Mode, cap: u64) -> Result<EventEnumeration> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument(
            "enumeration needs n ≥ 1 particles and m ≥ 1 modes".into(),
        ));
    }
    let count = multiset_count(n, m);
    match count {
        Some(c) if c <= cap as u128 => {}
        _ => return Err(Error::CapExceeded { count, cap }),
    }
    Ok(EventEnumeration { m, current: Some(alloc::vec![1; n]) })
}

/// Event at position `rank` (0-based) of the lexicographic enumeration.
///
/// Multisets map to strict combinations by `c_i = k_i + i`, which this walks
/// in the combinatorial number system.
pub fn unrank_event(n: usize, m: Mode, mut rank: u128) -> Result<OccupationEvent> {
    let total = multiset_count(n, m)
        .ok_or_else(|| Error::SizeOverflow(format!("multiset count for n={n}, m={m}")))?;
    if n == 0 || rank >= total {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} outside event space of size {total}"
        )));
    }
    let universe = m as u128 + n as u128 - 1;
    let mut modes = Vec::with_capacity(n);
    let mut c = 0u128; // strict-combination candidate, 0-based
    for i in 0..n {
        let slots_after = (n - 1 - i) as u128;
        loop {
            // Combinations starting with c at position i.
            let here = binomial(universe - 1 - c, slots_after)
                .ok_or_else(|| Error::SizeOverflow("binomial during unranking".into()))?;
            if here <= rank {
                rank -= here;
                c += 1;
            } else {
                modes.push((c - i as u128 + 1) as Mode);
                c += 1;
                break;
            }
        }
    }
    OccupationEvent::new(modes, m)
}

/// Position of `event` in the lexicographic enumeration (inverse of
/// [`unrank_event`]).
pub fn rank_event(event: &OccupationEvent, m: Mode) -> Result<u128> {
    let n = event.particle_count();
    let universe = m as u128 + n as u128 - 1;
    let mut rank = 0u128;
    let mut prev = 0u128; // first unexplored strict-combination value
    for (i, &k) in event.modes().iter().enumerate() {
        let c = k as u128 - 1 + i as u128;
        let slots_after = (n - 1 - i) as u128;
        for skipped in prev..c {
            rank += binomial(universe - 1 - skipped, slots_after)
                .ok_or_else(|| Error::SizeOverflow("binomial during ranking".into()))?;
        }
        prev = c + 1;
    }
    Ok(rank)
}
