//! Construction, validation and perturbation of mode-transformation matrices.
//!
//! `entry(j, k)` is the transition amplitude from input mode `j` to output
//! mode `k`, both 1-based. Constructors verify the unitarity contract
//! eagerly, so any non-perturbed [`ModeUnitary`] in circulation satisfies
//! `max |U†U − I| ≤ 1e-10`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::events::{InputConfig, Mode};
use crate::fp;
use crate::rng::StreamRng;

/// Unitarity budget for constructed matrices: an order above double-precision
/// accumulation error at dimensions up to ~10^4.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Per-entry modulus budget for Fourier matrices (`|U_{l,q}|² = 1/m`).
pub const FOURIER_MODULUS_TOL: f64 = 1e-12;

/// Provenance of a matrix; `Perturbed` is the one label exempt from the
/// unitarity contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixLabel {
    Haar,
    Fourier,
    Walk,
    Perturbed,
    Custom,
}

impl MatrixLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixLabel::Haar => "haar",
            MatrixLabel::Fourier => "fourier",
            MatrixLabel::Walk => "walk",
            MatrixLabel::Perturbed => "perturbed",
            MatrixLabel::Custom => "custom",
        }
    }
}

impl core::str::FromStr for MatrixLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(MatrixLabel::Haar),
            "fourier" => Ok(MatrixLabel::Fourier),
            "walk" => Ok(MatrixLabel::Walk),
            "perturbed" => Ok(MatrixLabel::Perturbed),
            "custom" => Ok(MatrixLabel::Custom),
            other => Err(Error::InvalidArgument(format!("unknown matrix label `{other}`"))),
        }
    }
}

/// An `m × m` mode-transformation matrix with its measured unitarity defect.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    dim: usize,
    entries: Vec<Complex64>, // row-major
    defect: f64,
    label: MatrixLabel,
}

impl ModeUnitary {
    /// Wraps row-major entries, measuring `max |U†U − I|` and enforcing the
    /// label's contract (unitarity for everything but `Perturbed`, plus the
    /// flat-modulus invariant for `Fourier`).
    pub fn from_entries(dim: usize, entries: Vec<Complex64>, label: MatrixLabel) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be ≥ 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "{} entries for a {dim}×{dim} matrix",
                entries.len()
            )));
        }
        let defect = unitarity_defect(dim, &entries);
        if label != MatrixLabel::Perturbed && defect > UNITARITY_TOL {
            return Err(Error::UnitarityViolation { defect, tolerance: UNITARITY_TOL });
        }
        if label == MatrixLabel::Fourier {
            let target = 1.0 / dim as f64;
            for (i, z) in entries.iter().enumerate() {
                if fp::fabs(z.norm_sqr() - target) > FOURIER_MODULUS_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "fourier entry {} has squared modulus {}, expected 1/{dim}",
                        i,
                        z.norm_sqr()
                    )));
                }
            }
        }
        Ok(ModeUnitary { dim, entries, defect, label })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> MatrixLabel {
        self.label
    }

    /// Measured `max |U†U − I|` at construction time.
    pub fn unitarity_defect(&self) -> f64 {
        self.defect
    }

    /// Amplitude from input mode `j` to output mode `k` (1-based).
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        assert!(
            (1..=self.dim).contains(&j) && (1..=self.dim).contains(&k),
            "mode index ({j}, {k}) outside 1..={}",
            self.dim
        );
        self.entries[(j - 1) * self.dim + (k - 1)]
    }

    /// Output-amplitude row of input mode `j` (1-based).
    pub fn row(&self, j: usize) -> &[Complex64] {
        assert!((1..=self.dim).contains(&j), "mode index {j} outside 1..={}", self.dim);
        &self.entries[(j - 1) * self.dim..j * self.dim]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }
}

fn unitarity_defect(dim: usize, entries: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in i..dim {
            // (U†U)_{ij} = Σ_l conj(U_{l,i}) U_{l,j}
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..dim {
                acc += entries[l * dim + i].conj() * entries[l * dim + j];
            }
            if i == j {
                acc -= 1.0;
            }
            let dev = fp::sqrt(acc.norm_sqr());
            if dev > worst {
                worst = dev;
            }
        }
    }
    worst
}

/// The symmetric `m`-mode Fourier matrix `U_{l,q} = e^{i·2π·l·q/m}/√m`
/// (1-based `l`, `q`).
pub fn make_fourier(m: usize) -> Result<ModeUnitary> {
    if m == 0 {
        return Err(Error::InvalidArgument("fourier matrix needs m ≥ 1".into()));
    }
    let inv_sqrt_m = 1.0 / fp::sqrt(m as f64);
    let mut entries = Vec::with_capacity(m * m);
    for l in 1..=m as u128 {
        for q in 1..=m as u128 {
            // Reduce l·q mod m before the division so large dimensions keep
            // full angular precision.
            let phase = TAU * ((l * q) % m as u128) as f64 / m as f64;
            entries.push(Complex64::new(
                inv_sqrt_m * fp::cos(phase),
                inv_sqrt_m * fp::sin(phase),
            ));
        }
    }
    ModeUnitary::from_entries(m, entries, MatrixLabel::Fourier)
}

/// The cyclically symmetric input `j̄ = (1, n^{p−1}+1, …, (n−1)·n^{p−1}+1)`
/// for the `m = n^p`-mode Fourier matrix. Returns the configuration together
/// with the implied mode count.
pub fn make_cyclic_input(n: usize, p: u32) -> Result<(InputConfig, Mode)> {
    if n < 2 {
        return Err(Error::InvalidArgument("cyclic input needs n ≥ 2".into()));
    }
    if p < 2 {
        return Err(Error::InvalidArgument("cyclic input needs p ≥ 2".into()));
    }
    let n = n as Mode;
    let mut stride: Mode = 1;
    for _ in 0..p - 1 {
        stride = stride
            .checked_mul(n)
            .ok_or_else(|| Error::SizeOverflow(format!("n^p for n={n}, p={p}")))?;
    }
    let m = stride
        .checked_mul(n)
        .ok_or_else(|| Error::SizeOverflow(format!("n^p for n={n}, p={p}")))?;
    let modes: Vec<Mode> = (0..n).map(|r| r * stride + 1).collect();
    Ok((InputConfig::indistinguishable(modes)?, m))
}

/// A Haar-distributed random unitary, deterministic in `seed`.
///
/// Columns of an i.i.d. complex-Gaussian matrix are orthonormalized by
/// twice-iterated Gram-Schmidt; keeping each pivot norm positive fixes the
/// diagonal phase convention under which the result is Haar.
pub fn make_haar_random(m: usize, seed: u64) -> Result<ModeUnitary> {
    if m == 0 {
        return Err(Error::InvalidArgument("haar matrix needs m ≥ 1".into()));
    }
    let mut rng = StreamRng::new(seed, 0);
    let mut gauss = Vec::with_capacity(m * m);
    for _ in 0..m * m {
        let (re, im) = rng.next_gaussian_pair();
        gauss.push(Complex64::new(re, im));
    }
    // Column-wise modified Gram-Schmidt, re-orthogonalized once.
    let mut cols: Vec<Vec<Complex64>> = (0..m)
        .map(|c| (0..m).map(|r| gauss[r * m + c]).collect())
        .collect();
    for c in 0..m {
        loop {
            for _pass in 0..2 {
                for p in 0..c {
                    let proj: Complex64 =
                        (0..m).map(|r| cols[p][r].conj() * cols[c][r]).sum();
                    for r in 0..m {
                        let sub = proj * cols[p][r];
                        cols[c][r] -= sub;
                    }
                }
            }
            let norm = fp::sqrt(cols[c].iter().map(|z| z.norm_sqr()).sum::<f64>());
            if norm > 1e-100 {
                for z in &mut cols[c] {
                    *z /= norm;
                }
                break;
            }
            // Degenerate draw (measure zero); replace the column.
            for z in &mut cols[c] {
                let (re, im) = rng.next_gaussian_pair();
                *z = Complex64::new(re, im);
            }
        }
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); m * m];
    for (c, col) in cols.iter().enumerate() {
        for (r, &z) in col.iter().enumerate() {
            entries[r * m + c] = z;
        }
    }
    ModeUnitary::from_entries(m, entries, MatrixLabel::Haar)
}

/// Brick-wall mesh of 50:50 beam splitters: `steps` alternating layers, the
/// odd layers coupling modes (1,2), (3,4), …, the even layers (2,3), (4,5), ….
/// Requires an even mode count.
pub fn make_walk_matrix(m: usize, steps: usize) -> Result<ModeUnitary> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "walk mesh needs an even mode count, got {m}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("walk mesh needs steps ≥ 1".into()));
    }
    let inv_sqrt2 = 1.0 / fp::sqrt(2.0);
    let t = Complex64::new(inv_sqrt2, 0.0);
    let r = Complex64::new(0.0, inv_sqrt2);
    let mut entries = vec![Complex64::new(0.0, 0.0); m * m];
    for d in 0..m {
        entries[d * m + d] = Complex64::new(1.0, 0.0);
    }
    // Accumulate U ← U·L per layer, so entry (j, k) stays the j→k amplitude
    // of the layers applied in order.
    for layer in 0..steps {
        let start = layer % 2;
        let mut a = start;
        while a + 1 < m {
            for row in 0..m {
                let ua = entries[row * m + a];
                let ub = entries[row * m + a + 1];
                entries[row * m + a] = ua * t + ub * r;
                entries[row * m + a + 1] = ua * r + ub * t;
            }
            a += 2;
        }
    }
    ModeUnitary::from_entries(m, entries, MatrixLabel::Walk)
}

/// A multiplicative deviation field `δ` with its average entry magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationField {
    dim: usize,
    entries: Vec<Complex64>, // row-major
    avg_magnitude: f64,
}

impl PerturbationField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major `δ` entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// The `‖δ‖` the field was rescaled to.
    pub fn avg_magnitude(&self) -> f64 {
        self.avg_magnitude
    }

    /// Arithmetic mean of `|δ_{l,q}|` recomputed from the entries.
    pub fn recompute_avg(&self) -> f64 {
        let sum: f64 = self.entries.iter().map(|z| fp::sqrt(z.norm_sqr())).sum();
        sum / (self.dim * self.dim) as f64
    }
}

/// Entry-wise perturbation `W_{l,q} = U_{l,q}·(1 + δ_{l,q})`.
///
/// `δ` entries carry uniform phases and half-normal magnitudes rescaled so
/// the mean magnitude hits `target_avg` exactly; deviation sweeps therefore
/// have no horizontal jitter. Deterministic in `seed`.
pub fn perturb(
    u: &ModeUnitary,
    target_avg: f64,
    seed: u64,
) -> Result<(ModeUnitary, PerturbationField)> {
    if !(0.0..1.0).contains(&target_avg) {
        return Err(Error::InvalidArgument(format!(
            "perturbation magnitude must lie in [0, 1), got {target_avg}"
        )));
    }
    let m = u.dim();
    let count = m * m;
    let mut delta = vec![Complex64::new(0.0, 0.0); count];
    if target_avg > 0.0 {
        let mut rng = StreamRng::new(seed, 0);
        let mut magnitudes = vec![0.0f64; count];
        loop {
            let mut sum = 0.0;
            for g in magnitudes.iter_mut() {
                *g = fp::fabs(rng.next_gaussian_pair().0);
                sum += *g;
            }
            if sum > 0.0 {
                let scale = target_avg * count as f64 / sum;
                for (d, &g) in delta.iter_mut().zip(magnitudes.iter()) {
                    let phase = rng.next_angle();
                    let mag = scale * g;
                    *d = Complex64::new(mag * fp::cos(phase), mag * fp::sin(phase));
                }
                break;
            }
        }
    }
    let entries: Vec<Complex64> = u
        .entries()
        .iter()
        .zip(delta.iter())
        .map(|(&a, &d)| a * (Complex64::new(1.0, 0.0) + d))
        .collect();
    let w = ModeUnitary::from_entries(m, entries, MatrixLabel::Perturbed)?;
    Ok((w, PerturbationField { dim: m, entries: delta, avg_magnitude: target_avg }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        fp::sqrt((a - b).norm_sqr()) <= tol
    }

    #[test]
    fn fourier_two_modes_is_the_beam_splitter() {
        let u = make_fourier(2).unwrap();
        let s = 1.0 / fp::sqrt(2.0);
        assert!(close(u.entry(1, 1), Complex64::new(-s, 0.0), 1e-15));
        assert!(close(u.entry(1, 2), Complex64::new(s, 0.0), 1e-15));
        assert!(close(u.entry(2, 1), Complex64::new(s, 0.0), 1e-15));
        assert!(close(u.entry(2, 2), Complex64::new(s, 0.0), 1e-15));
    }

    #[test]
    fn fourier_one_mode_is_identity() {
        let u = make_fourier(1).unwrap();
        assert!(close(u.entry(1, 1), Complex64::new(1.0, 0.0), 1e-12));
    }

    #[test]
    fn fourier_nine_modes_contract() {
        let u = make_fourier(9).unwrap();
        assert!(u.unitarity_defect() <= 1e-12, "defect {}", u.unitarity_defect());
        for l in 1..=9 {
            for q in 1..=9 {
                assert!(fp::fabs(u.entry(l, q).norm_sqr() - 1.0 / 9.0) <= 1e-12);
            }
        }
    }

    #[test]
    fn fourier_row_sums_follow_the_geometric_identity() {
        for m in 1..=64usize {
            let u = make_fourier(m).unwrap();
            for l in 1..=m {
                let sum: Complex64 = u.row(l).iter().sum();
                let expect = if l == m {
                    Complex64::new(fp::sqrt(m as f64), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!(close(sum, expect, 1e-9), "m={m} l={l} sum={sum}");
            }
        }
    }

    #[test]
    fn cyclic_input_examples() {
        let (cfg, m) = make_cyclic_input(3, 2).unwrap();
        assert_eq!(cfg.modes(), &[1, 4, 7]);
        assert_eq!(m, 9);
        let (cfg, m) = make_cyclic_input(2, 2).unwrap();
        assert_eq!(cfg.modes(), &[1, 3]);
        assert_eq!(m, 4);
        let (cfg, m) = make_cyclic_input(4, 2).unwrap();
        assert_eq!(cfg.modes(), &[1, 5, 9, 13]);
        assert_eq!(m, 16);
        assert!(cfg.is_indistinguishable());
    }

    #[test]
    fn cyclic_input_rejects_bad_sizes() {
        assert!(make_cyclic_input(1, 2).is_err());
        assert!(make_cyclic_input(2, 1).is_err());
        assert!(matches!(make_cyclic_input(10, 30), Err(Error::SizeOverflow(_))));
    }

    #[test]
    fn haar_is_unitary_and_deterministic() {
        let u = make_haar_random(9, 42).unwrap();
        assert!(u.unitarity_defect() <= UNITARITY_TOL);
        for k in 1..=9 {
            let norm: f64 = (1..=9).map(|j| u.entry(j, k).norm_sqr()).sum();
            assert!(fp::fabs(norm - 1.0) <= 1e-10, "column {k} norm {norm}");
        }
        assert_eq!(u, make_haar_random(9, 42).unwrap());
        assert_ne!(u, make_haar_random(9, 43).unwrap());
    }

    #[test]
    fn haar_single_mode_is_a_phase() {
        let u = make_haar_random(1, 7).unwrap();
        assert!(fp::fabs(u.entry(1, 1).norm_sqr() - 1.0) <= 1e-12);
    }

    #[test]
    fn haar_top_entry_marginal_matches_the_measure() {
        // For m = 2 the squared modulus of any entry is uniform on [0, 1]:
        // mean 1/2, variance 1/12.
        let samples = 1000;
        let mut sum = 0.0;
        for i in 0..samples {
            let u = make_haar_random(2, 9000 + i).unwrap();
            sum += u.entry(1, 1).norm_sqr();
        }
        let mean = sum / samples as f64;
        let three_se = 3.0 * fp::sqrt(1.0 / 12.0 / samples as f64);
        assert!(fp::fabs(mean - 0.5) <= three_se, "mean {mean} vs 0.5 ± {three_se}");
    }

    #[test]
    fn walk_single_step_two_modes_is_one_beam_splitter() {
        let u = make_walk_matrix(2, 1).unwrap();
        let s = 1.0 / fp::sqrt(2.0);
        assert!(close(u.entry(1, 1), Complex64::new(s, 0.0), 1e-15));
        assert!(close(u.entry(1, 2), Complex64::new(0.0, s), 1e-15));
        assert!(close(u.entry(2, 1), Complex64::new(0.0, s), 1e-15));
        assert!(close(u.entry(2, 2), Complex64::new(s, 0.0), 1e-15));
    }

    #[test]
    fn walk_mesh_contract() {
        let u = make_walk_matrix(8, 8).unwrap();
        assert!(u.unitarity_defect() <= UNITARITY_TOL);
        assert!(make_walk_matrix(7, 3).is_err());
        assert!(make_walk_matrix(8, 0).is_err());
    }

    #[test]
    fn perturb_zero_keeps_the_matrix() {
        let u = make_fourier(4).unwrap();
        let (w, field) = perturb(&u, 0.0, 5).unwrap();
        assert_eq!(w.entries(), u.entries());
        assert_eq!(w.label(), MatrixLabel::Perturbed);
        assert!(field.entries().iter().all(|z| z.norm_sqr() == 0.0));
        assert_eq!(field.recompute_avg(), 0.0);
    }

    #[test]
    fn perturb_hits_the_target_average_exactly() {
        let u = make_fourier(9).unwrap();
        let (_, field) = perturb(&u, 0.01, 21).unwrap();
        assert!(fp::fabs(field.recompute_avg() - 0.01) <= 1e-12);
        assert_eq!(field.avg_magnitude(), 0.01);
    }

    #[test]
    fn perturb_seeds_give_distinct_fields_with_equal_norm() {
        let u = make_fourier(9).unwrap();
        let (_, f1) = perturb(&u, 0.05, 1).unwrap();
        let (_, f2) = perturb(&u, 0.05, 2).unwrap();
        assert_ne!(f1.entries(), f2.entries());
        assert!(fp::fabs(f1.recompute_avg() - f2.recompute_avg()) <= 1e-12);
        assert_eq!(perturb(&u, 0.05, 1).unwrap().1.entries(), f1.entries());
    }

    #[test]
    fn perturb_rejects_large_targets() {
        let u = make_fourier(3).unwrap();
        assert!(perturb(&u, 1.0, 0).is_err());
        assert!(perturb(&u, 1.5, 0).is_err());
    }

    #[test]
    fn from_entries_enforces_unitarity_for_nonperturbed_labels() {
        let bad = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
        ];
        assert!(matches!(
            ModeUnitary::from_entries(2, bad.clone(), MatrixLabel::Custom),
            Err(Error::UnitarityViolation { .. })
        ));
        assert!(ModeUnitary::from_entries(2, bad, MatrixLabel::Perturbed).is_ok());
    }
}
