//! Permanent kernels and exact per-event probabilities.
//!
//! The bosonic weight of an output event is the squared permanent of the
//! submatrix picking the occupied input rows and output columns (columns
//! repeated per occupation), divided by the bunching factor `∏_q s_q!` —
//! the normalization under which the weights of all multisets sum to one.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::events::{InputConfig, Mode, OccupationEvent};
use crate::linalg::ModeUnitary;

/// Hard cap for the inclusion-exclusion kernel (cost `2^n·n`).
pub const RYSER_MAX: usize = 30;

/// Hard cap for the definitional `n!`-term oracle.
pub const NAIVE_MAX: usize = 8;

/// A square complex matrix cut from a [`ModeUnitary`] by mode lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Submatrix {
    order: usize,
    entries: Vec<Complex64>, // row-major
}

impl Submatrix {
    /// `M_{l,q} = U_{rows[l], cols[q]}`; `cols` may repeat modes (bunched
    /// outputs repeat the column once per particle).
    pub fn from_unitary(u: &ModeUnitary, rows: &[Mode], cols: &[Mode]) -> Result<Self> {
        if rows.len() != cols.len() || rows.is_empty() {
            return Err(Error::InvalidArgument(alloc::format!(
                "submatrix needs equal nonzero row/column counts, got {}×{}",
                rows.len(),
                cols.len()
            )));
        }
        let m = u.dim() as Mode;
        let order = rows.len();
        let mut entries = Vec::with_capacity(order * order);
        for &j in rows {
            if j < 1 || j > m {
                return Err(Error::ModeOutOfRange { mode: j, modes: m });
            }
            for &k in cols {
                if k < 1 || k > m {
                    return Err(Error::ModeOutOfRange { mode: k, modes: m });
                }
                entries.push(u.entry(j as usize, k as usize));
            }
        }
        Ok(Submatrix { order, entries })
    }

    /// Wraps row-major entries directly (oracle tests, random matrices).
    pub fn from_entries(order: usize, entries: Vec<Complex64>) -> Result<Self> {
        if order == 0 || entries.len() != order * order {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} entries for an order-{order} submatrix",
                entries.len()
            )));
        }
        Ok(Submatrix { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Entry-wise `|M_{l,q}|²` as a real submatrix — the transfer matrix of
    /// independently routed distinguishable particles.
    pub fn abs_squared(&self) -> Submatrix {
        Submatrix {
            order: self.order,
            entries: self
                .entries
                .iter()
                .map(|z| Complex64::new(z.norm_sqr(), 0.0))
                .collect(),
        }
    }
}

/// Permanent by Ryser's inclusion-exclusion over column subsets, with
/// Gray-code updates of the running row sums (`O(2^n·n)`).
pub fn permanent_ryser(m: &Submatrix) -> Result<Complex64> {
    let n = m.order();
    if n > RYSER_MAX {
        return Err(Error::PermanentSizeCap { order: n, max: RYSER_MAX });
    }
    let entries = m.entries();
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray_prev: u64 = 0;
    for k in 1u64..1 << n {
        let gray = k ^ (k >> 1);
        let toggled = (gray ^ gray_prev).trailing_zeros() as usize;
        if gray & (1 << toggled) != 0 {
            for (l, sum) in row_sums.iter_mut().enumerate() {
                *sum += entries[l * n + toggled];
            }
        } else {
            for (l, sum) in row_sums.iter_mut().enumerate() {
                *sum -= entries[l * n + toggled];
            }
        }
        gray_prev = gray;
        let product: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total += product;
        } else {
            total -= product;
        }
    }
    // Σ_S (−1)^{|S|} ∏ row sums carries an overall (−1)^n.
    if n % 2 == 0 {
        Ok(total)
    } else {
        Ok(-total)
    }
}

/// Permanent by the defining sum over all `n!` permutations. Test oracle;
/// independent of the inclusion-exclusion path.
pub fn permanent_naive(m: &Submatrix) -> Result<Complex64> {
    let n = m.order();
    if n > NAIVE_MAX {
        return Err(Error::PermanentSizeCap { order: n, max: NAIVE_MAX });
    }
    let entries = m.entries();
    let mut used = vec![false; n];
    fn recurse(
        entries: &[Complex64],
        n: usize,
        row: usize,
        used: &mut [bool],
        partial: Complex64,
    ) -> Complex64 {
        if row == n {
            return partial;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..n {
            if !used[col] {
                used[col] = true;
                acc += recurse(entries, n, row + 1, used, partial * entries[row * n + col]);
                used[col] = false;
            }
        }
        acc
    }
    Ok(recurse(entries, n, 0, &mut used, Complex64::new(1.0, 0.0)))
}

fn check_counts(input: &InputConfig, event: &OccupationEvent) -> Result<()> {
    if input.particle_count() != event.particle_count() {
        return Err(Error::ParticleCountMismatch {
            input: input.particle_count(),
            event: event.particle_count(),
        });
    }
    Ok(())
}

/// Exact bosonic event weight `|perm(M)|² / ∏_q s_q!` for indistinguishable
/// particles.
pub fn boson_probability(
    u: &ModeUnitary,
    input: &InputConfig,
    event: &OccupationEvent,
) -> Result<f64> {
    if !input.is_indistinguishable() {
        return Err(Error::DistinguishableInput);
    }
    check_counts(input, event)?;
    let m = Submatrix::from_unitary(u, input.modes(), event.modes())?;
    let perm = permanent_ryser(&m)?;
    Ok(perm.norm_sqr() / event.multiplicity_factor() as f64)
}

/// Exact event weight for independently routed distinguishable particles:
/// `perm(|M|²) / ∏_q s_q!`.
pub fn classical_probability(
    u: &ModeUnitary,
    input: &InputConfig,
    event: &OccupationEvent,
) -> Result<f64> {
    check_counts(input, event)?;
    let m = Submatrix::from_unitary(u, input.modes(), event.modes())?;
    let perm = permanent_ryser(&m.abs_squared())?;
    Ok(perm.re / event.multiplicity_factor() as f64)
}

/// Exact event weight when particle `bad` (1-based) is distinguishable from
/// the otherwise indistinguishable rest: an incoherent mixture over the
/// distinguishable particle's destination, each branch weighted by the
/// remaining `n−1` bosons reaching the event with that mode decremented.
pub fn misaligned_probability(
    u: &ModeUnitary,
    input: &InputConfig,
    bad: usize,
    event: &OccupationEvent,
) -> Result<f64> {
    let n = input.particle_count();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "misalignment needs at least two particles".into(),
        ));
    }
    if bad < 1 || bad > n {
        return Err(Error::InvalidArgument(alloc::format!(
            "bad particle index {bad} outside 1..={n}"
        )));
    }
    check_counts(input, event)?;
    let m = u.dim() as Mode;
    let bad_mode = input.modes()[bad - 1];
    if bad_mode > m {
        return Err(Error::ModeOutOfRange { mode: bad_mode, modes: m });
    }
    let rest_modes: Vec<Mode> = input
        .modes()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != bad - 1)
        .map(|(_, &j)| j)
        .collect();
    let rest = InputConfig::indistinguishable(rest_modes)?;
    let mut total = 0.0;
    for (&q, _) in event.occupations() {
        let mut reduced: Vec<Mode> = event.modes().to_vec();
        let pos = reduced.iter().position(|&k| k == q).unwrap();
        reduced.remove(pos);
        let reduced_event = OccupationEvent::new(reduced, m)?;
        let p_bad = u.entry(bad_mode as usize, q as usize).norm_sqr();
        total += p_bad * boson_probability(u, &rest, &reduced_event)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::enumerate_events;
    use crate::fp;
    use crate::linalg::make_fourier;
    use crate::rng::StreamRng;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ryser_identity_and_ones() {
        let id = Submatrix::from_entries(
            3,
            vec![
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(permanent_ryser(&id).unwrap(), c(1.0, 0.0));
        let ones = Submatrix::from_entries(3, vec![c(1.0, 0.0); 9]).unwrap();
        let p = permanent_ryser(&ones).unwrap();
        assert!((p - c(6.0, 0.0)).norm_sqr() < 1e-20);
    }

    #[test]
    fn ryser_beam_splitter_permanent_vanishes() {
        let u = make_fourier(2).unwrap();
        let m = Submatrix::from_unitary(&u, &[1, 2], &[1, 2]).unwrap();
        let p = permanent_ryser(&m).unwrap();
        assert!(p.norm_sqr() < 1e-24, "perm {p}");
    }

    #[test]
    fn naive_small_cases() {
        let one = Submatrix::from_entries(1, vec![c(2.5, -1.0)]).unwrap();
        assert_eq!(permanent_naive(&one).unwrap(), c(2.5, -1.0));
        let two = Submatrix::from_entries(
            2,
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        // ad + bc
        assert_eq!(permanent_naive(&two).unwrap(), c(10.0, 0.0));
    }

    #[test]
    fn ryser_matches_naive_on_random_matrices() {
        let mut rng = StreamRng::new(314, 0);
        for n in 2..=6usize {
            for _ in 0..50 {
                let entries: Vec<Complex64> = (0..n * n)
                    .map(|_| {
                        let (re, im) = rng.next_gaussian_pair();
                        c(re, im)
                    })
                    .collect();
                let m = Submatrix::from_entries(n, entries).unwrap();
                let a = permanent_ryser(&m).unwrap();
                let b = permanent_naive(&m).unwrap();
                let rel = fp::sqrt((a - b).norm_sqr()) / fp::sqrt(b.norm_sqr()).max(1e-300);
                assert!(rel <= 1e-10, "n={n} rel={rel}");
            }
        }
    }

    #[test]
    fn size_caps_are_enforced() {
        let big = Submatrix::from_entries(9, vec![c(0.0, 0.0); 81]).unwrap();
        assert!(matches!(
            permanent_naive(&big),
            Err(Error::PermanentSizeCap { order: 9, max: NAIVE_MAX })
        ));
    }

    #[test]
    fn hong_ou_mandel_probabilities() {
        let u = make_fourier(2).unwrap();
        let input = InputConfig::indistinguishable(vec![1, 2]).unwrap();
        let coincide = OccupationEvent::new(vec![1, 2], 2).unwrap();
        let bunch = OccupationEvent::new(vec![1, 1], 2).unwrap();
        assert!(boson_probability(&u, &input, &coincide).unwrap() <= 1e-12);
        assert!(fp::fabs(boson_probability(&u, &input, &bunch).unwrap() - 0.5) <= 1e-12);
        assert!(fp::fabs(classical_probability(&u, &input, &coincide).unwrap() - 0.5) <= 1e-12);
        assert!(fp::fabs(classical_probability(&u, &input, &bunch).unwrap() - 0.25) <= 1e-12);
    }

    #[test]
    fn single_particle_reduces_to_matrix_moduli() {
        let u = make_fourier(5).unwrap();
        let input = InputConfig::indistinguishable(vec![2]).unwrap();
        for k in 1..=5u64 {
            let e = OccupationEvent::new(vec![k], 5).unwrap();
            let expect = u.entry(2, k as usize).norm_sqr();
            assert!(fp::fabs(boson_probability(&u, &input, &e).unwrap() - expect) <= 1e-12);
            assert!(fp::fabs(classical_probability(&u, &input, &e).unwrap() - expect) <= 1e-12);
        }
    }

    #[test]
    fn misaligned_two_particles_is_classical() {
        let u = make_fourier(2).unwrap();
        let input = InputConfig::indistinguishable(vec![1, 2]).unwrap();
        let coincide = OccupationEvent::new(vec![1, 2], 2).unwrap();
        let bunch = OccupationEvent::new(vec![1, 1], 2).unwrap();
        assert!(fp::fabs(misaligned_probability(&u, &input, 2, &coincide).unwrap() - 0.5) <= 1e-12);
        assert!(fp::fabs(misaligned_probability(&u, &input, 2, &bunch).unwrap() - 0.25) <= 1e-12);
    }

    #[test]
    fn misaligned_bad_index_validation() {
        let u = make_fourier(2).unwrap();
        let input = InputConfig::indistinguishable(vec![1, 2]).unwrap();
        let e = OccupationEvent::new(vec![1, 2], 2).unwrap();
        assert!(misaligned_probability(&u, &input, 0, &e).is_err());
        assert!(misaligned_probability(&u, &input, 3, &e).is_err());
    }

    #[test]
    fn misaligned_is_invariant_under_input_relabeling() {
        let u = make_fourier(9).unwrap();
        let a = InputConfig::indistinguishable(vec![1, 4, 7]).unwrap();
        let b = InputConfig::indistinguishable(vec![4, 1, 7]).unwrap();
        for e in enumerate_events(3, 9, 1000).unwrap() {
            let pa = misaligned_probability(&u, &a, 1, &e).unwrap();
            let pb = misaligned_probability(&u, &b, 2, &e).unwrap();
            assert!(fp::fabs(pa - pb) <= 1e-12);
        }
    }

    #[test]
    fn probabilities_normalize() {
        for (n, m) in [(2usize, 4u64), (3, 9)] {
            let u = make_fourier(m as usize).unwrap();
            let modes: Vec<Mode> = (1..=n as Mode).collect();
            let input = InputConfig::indistinguishable(modes).unwrap();
            let mut sums = [0.0f64; 3];
            for e in enumerate_events(n, m, 100_000).unwrap() {
                sums[0] += boson_probability(&u, &input, &e).unwrap();
                sums[1] += classical_probability(&u, &input, &e).unwrap();
                if n >= 2 {
                    sums[2] += misaligned_probability(&u, &input, 1, &e).unwrap();
                }
            }
            for (i, s) in sums.iter().enumerate() {
                assert!(fp::fabs(s - 1.0) <= 1e-9, "model {i} sums to {s} at n={n}, m={m}");
            }
        }
    }

    #[test]
    fn distinct_labels_are_rejected_by_the_boson_weight() {
        let u = make_fourier(2).unwrap();
        let input = InputConfig::with_labels(vec![1, 2], vec![0, 1]).unwrap();
        let e = OccupationEvent::new(vec![1, 2], 2).unwrap();
        assert_eq!(boson_probability(&u, &input, &e), Err(Error::DistinguishableInput));
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let u = make_fourier(4).unwrap();
        let input = InputConfig::indistinguishable(vec![1, 2, 3]).unwrap();
        let e = OccupationEvent::new(vec![1, 2], 4).unwrap();
        assert!(matches!(
            boson_probability(&u, &input, &e),
            Err(Error::ParticleCountMismatch { input: 3, event: 2 })
        ));
    }
}
