//! States and distance measures between them (and between channels via their
//! Jamiołkowski states).
//!
//! The central quantity is the superfidelity
//! `G(ρ,σ) = tr(ρσ) + √(1 − tr ρ²) · √(1 − tr σ²)`,
//! an upper bound on the fidelity that needs only overlap and purity terms, so
//! it is measurable with interference circuits (see [`crate::circuit`]).
//! `√(1 − G)` and `arccos(G)` are metrics on channels; `√(2 − 2√G)` is not and
//! is reported only as a diagnostic.

use crate::channel::Channel;
use crate::error::{QchanError, Result};
use crate::linalg::{ComplexMatrix, C64, HERMITICITY_TOL, PSD_CLAMP};
use serde::Serialize;

/// Largest imaginary residue tolerated in nominally real traces.
const IMAG_TOL: f64 = 1e-10;

/// Clamps to `[0, ∞)` while letting NaN through untouched.
pub(crate) fn clamp_nonneg(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

/// Clamps to `[0, 1]` while letting NaN through untouched.
pub(crate) fn clamp_unit(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else if x > 1.0 {
        1.0
    } else {
        x
    }
}

pub(crate) fn check_distribution(label: &str, v: &[f64]) -> Result<()> {
    if let Some(&bad) = v.iter().find(|&&x| !(x >= -1e-9)) {
        return Err(QchanError::NotDistribution(format!(
            "{label} has entry {bad}"
        )));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(QchanError::NotDistribution(format!(
            "{label} sums to {sum}"
        )));
    }
    Ok(())
}

/// Density matrix: hermitian, PSD and unit-trace within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity (1e-9), unit trace (1e-9) and PSD (eigenvalues
    /// ≥ −1e-9) before accepting the matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QchanError::Shape(format!(
                "density matrix must be square, got {:?}",
                matrix.shape()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if !(defect <= HERMITICITY_TOL) {
            return Err(QchanError::NotHermitian { defect });
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(QchanError::InvalidParameter {
                name: "trace".into(),
                value: format!("{}+{}i", tr.re, tr.im),
                bound: "1 within 1e-9".into(),
            });
        }
        let min = matrix.eigh()?.min_eigenvalue();
        if min < -1e-9 {
            return Err(QchanError::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(DensityMatrix {
            dim: matrix.rows(),
            matrix,
        })
    }

    /// Wraps a matrix that is known valid by construction.
    pub fn new_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        DensityMatrix {
            dim: matrix.rows(),
            matrix,
        }
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix::new_unchecked(
            ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        )
    }

    /// The pure computational-basis state `|i⟩⟨i|`.
    pub fn basis_state(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index out of range");
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(i, i)] = C64::new(1.0, 0.0);
        DensityMatrix::new_unchecked(m)
    }

    /// Pure state `|ψ⟩⟨ψ|` from amplitudes, normalized on entry.
    pub fn from_pure(amplitudes: &[C64]) -> Result<Self> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(QchanError::Numerical("zero state vector".into()));
        }
        let d = amplitudes.len();
        let m = ComplexMatrix::from_fn(d, d, |i, j| {
            amplitudes[i] * amplitudes[j].conj() / norm_sqr
        });
        Ok(DensityMatrix::new_unchecked(m))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr ρ²` as a real number; the imaginary residue is asserted negligible.
    pub fn purity(&self) -> f64 {
        let t = self
            .matrix
            .symmetric_trace_product(&self.matrix)
            .expect("a density matrix is square");
        assert!(
            t.im.abs() < IMAG_TOL,
            "purity has imaginary residue {}",
            t.im
        );
        t.re
    }
}

/// `tr(ρσ)` as a real number, bit-identical under argument swap.
fn overlap(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(QchanError::DimMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let t = rho.matrix().symmetric_trace_product(sigma.matrix())?;
    assert!(
        t.im.abs() < IMAG_TOL,
        "state overlap has imaginary residue {}",
        t.im
    );
    Ok(t.re)
}

/// Purity defects below this are numerical zeros: a pure state's computed
/// `1 − tr ρ²` lands at ±few·ε, and against a mixed partner the excess term
/// would inflate by √ε ≈ 1e-8.
const EXCESS_FLOOR: f64 = 1e-14;

pub(crate) fn excess_term(ex_r: f64, ex_s: f64) -> f64 {
    // One square root of the product (not a product of square roots): for
    // identical arguments the excess term then reproduces 1 − tr ρ² to the
    // last bit and G(ρ,ρ) rounds to exactly 1. Zeroing applies only to the
    // mixed-pure pairing so that self-comparison keeps that cancellation.
    if (ex_r < EXCESS_FLOOR) != (ex_s < EXCESS_FLOOR) {
        0.0
    } else {
        (ex_r * ex_s).sqrt()
    }
}

fn superfidelity_raw(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let t = overlap(rho, sigma)?;
    let ex_r = clamp_nonneg(1.0 - rho.purity());
    let ex_s = clamp_nonneg(1.0 - sigma.purity());
    Ok(t + excess_term(ex_r, ex_s))
}

/// Superfidelity `G(ρ,σ) = tr(ρσ) + √((1−tr ρ²)(1−tr σ²))`, clamped to [0, 1].
///
/// Exactly symmetric in its arguments (bitwise), and an upper bound on
/// [`fidelity`]; the two agree whenever either state is pure or both are
/// qubits.
pub fn superfidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(clamp_unit(superfidelity_raw(rho, sigma)?))
}

/// Superfidelity of two commuting states given their matched spectra.
///
/// `p[i]` and `q[i]` must belong to a common eigenbasis; both must be
/// probability distributions within 1e-9.
pub fn superfidelity_commuting(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(QchanError::DimMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    check_distribution("first spectrum", p)?;
    check_distribution("second spectrum", q)?;
    let dot: f64 = p.iter().zip(q).map(|(&a, &b)| a * b).sum();
    let pp: f64 = p.iter().map(|&a| a * a).sum();
    let qq: f64 = q.iter().map(|&a| a * a).sum();
    Ok(clamp_unit(
        dot + excess_term(clamp_nonneg(1.0 - pp), clamp_nonneg(1.0 - qq)),
    ))
}

/// Fidelity of two commuting states given their matched spectra:
/// `(Σ √(pᵢ qᵢ))²`, with per-term products below −1e-10 rejected.
pub fn fidelity_commuting(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(QchanError::DimMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    check_distribution("first spectrum", p)?;
    check_distribution("second spectrum", q)?;
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let prod = a * b;
        if prod < -PSD_CLAMP {
            return Err(QchanError::NotPositive {
                min_eigenvalue: prod,
            });
        }
        acc += clamp_nonneg(prod).sqrt();
    }
    Ok(clamp_unit(acc * acc))
}

/// Clamps a nominally PSD spectrum, rejecting eigenvalues below −1e-10.
fn clamp_spectrum(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    let min = eigenvalues.first().copied().unwrap_or(0.0);
    if min < -PSD_CLAMP {
        return Err(QchanError::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(eigenvalues.iter().map(|&l| clamp_nonneg(l)).collect())
}

/// Relative floor below which product-spectrum eigenvalues are numerical
/// zeros: rank-deficient √ρσ√ρ yields true zeros at ~1e-16, and their square
/// roots would otherwise each inflate the fidelity by ~1e-8.
const SPECTRUM_FLOOR: f64 = 1e-13;

fn fidelity_raw(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(QchanError::DimMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let s = rho.matrix().psd_sqrt()?;
    let inner = s.matmul(sigma.matrix())?.matmul(&s)?;
    let eig = inner.eigh()?;
    let lam = clamp_spectrum(&eig.eigenvalues)?;
    let floor = lam.last().copied().unwrap_or(0.0) * SPECTRUM_FLOOR;
    Ok(lam
        .iter()
        .filter(|&&l| l > floor)
        .map(|l| l.sqrt())
        .sum::<f64>()
        .powi(2))
}

/// Fidelity `F(ρ,σ) = (tr √(√ρ σ √ρ))²`, clamped to [0, 1].
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(clamp_unit(fidelity_raw(rho, sigma)?))
}

/// Trace distance `½ · tr|ρ − σ|`, clamped to [0, 1].
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(QchanError::DimMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let diff = rho.matrix().sub(sigma.matrix())?;
    Ok(clamp_unit(0.5 * diff.trace_norm()?))
}

/// The three standard functionals turning a fidelity-like score into a
/// distance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivedMetrics {
    /// `A_X = arccos √x`.
    pub angle: f64,
    /// `B_X = √(2 − 2√x)`.
    pub bures: f64,
    /// `C_X = √(1 − x)`.
    pub root_complement: f64,
}

/// Evaluates the A/B/C functionals at `x ∈ [0, 1]` (1e-12 entry tolerance).
pub fn derived_metrics(x: f64) -> Result<DerivedMetrics> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(QchanError::InvalidParameter {
            name: "x".into(),
            value: format!("{x}"),
            bound: "[0, 1] within 1e-12".into(),
        });
    }
    let x = clamp_unit(x);
    let root = x.sqrt();
    Ok(DerivedMetrics {
        angle: root.acos(),
        bures: clamp_nonneg(2.0 - 2.0 * root).sqrt(),
        root_complement: clamp_nonneg(1.0 - x).sqrt(),
    })
}

/// Every distance measure the crate computes for one pair of states or
/// channels.
///
/// `root_superinfidelity_cg = √(1−G)` and `angle_ag2 = arccos G` are metrics on
/// channels; `bures_bg = √(2−2√G)` is kept for diagnostics although it fails
/// the triangle inequality.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub fidelity: f64,
    pub superfidelity: f64,
    pub trace_distance: f64,
    /// Bures distance `√(2 − 2√F)`.
    pub bures_bf: f64,
    /// Root infidelity `√(1 − F)`.
    pub root_infidelity_cf: f64,
    /// Root superinfidelity `√(1 − G)`; a metric.
    pub root_superinfidelity_cg: f64,
    /// Angle `arccos G`; a metric.
    pub angle_ag2: f64,
    /// `√(2 − 2√G)`; NOT a metric, diagnostic only.
    pub bures_bg: f64,
    /// Fidelity before clamping to [0, 1].
    pub raw_fidelity: f64,
    /// Superfidelity before clamping to [0, 1].
    pub raw_superfidelity: f64,
}

impl MetricReport {
    /// Computes every measure between two states of equal dimension.
    pub fn between_states(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Self> {
        let raw_fidelity = fidelity_raw(rho, sigma)?;
        let raw_superfidelity = superfidelity_raw(rho, sigma)?;
        let f = clamp_unit(raw_fidelity);
        let g = clamp_unit(raw_superfidelity);
        debug_assert!(
            g >= f - 1e-7,
            "superfidelity {g} undercuts fidelity {f} beyond tolerance"
        );
        let from_f = derived_metrics(f)?;
        let from_g = derived_metrics(g)?;
        let report = MetricReport {
            fidelity: f,
            superfidelity: g,
            trace_distance: trace_distance(rho, sigma)?,
            bures_bf: from_f.bures,
            root_infidelity_cf: from_f.root_complement,
            root_superinfidelity_cg: from_g.root_complement,
            angle_ag2: clamp_unit(g).acos(),
            bures_bg: from_g.bures,
            raw_fidelity,
            raw_superfidelity,
        };
        debug_assert!(report.all_finite(), "metric report has non-finite entries");
        Ok(report)
    }

    fn all_finite(&self) -> bool {
        [
            self.fidelity,
            self.superfidelity,
            self.trace_distance,
            self.bures_bf,
            self.root_infidelity_cf,
            self.root_superinfidelity_cg,
            self.angle_ag2,
            self.bures_bg,
            self.raw_fidelity,
            self.raw_superfidelity,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// Plain-text rendering, one measure per line.
    pub fn to_text(&self) -> String {
        format!(
            "fidelity                 {:.12}\n\
             superfidelity            {:.12}\n\
             trace_distance           {:.12}\n\
             bures_bf                 {:.12}\n\
             root_infidelity_cf       {:.12}\n\
             root_superinfidelity_cg  {:.12}\n\
             angle_ag2                {:.12}\n\
             bures_bg (not a metric)  {:.12}\n",
            self.fidelity,
            self.superfidelity,
            self.trace_distance,
            self.bures_bf,
            self.root_infidelity_cf,
            self.root_superinfidelity_cg,
            self.angle_ag2,
            self.bures_bg,
        )
    }
}

/// Full metric report between two channels via their Jamiołkowski states.
///
/// Both channels are validated first; see
/// [`process_metrics_unvalidated`] to skip that gate.
pub fn process_metrics(a: &Channel, b: &Channel) -> Result<MetricReport> {
    if a.dim() != b.dim() {
        return Err(QchanError::DimMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let rho = a.jamiolkowski()?;
    let sigma = b.jamiolkowski()?;
    MetricReport::between_states(rho.state(), sigma.state())
}

/// Metric report without the CP-TP validation gate (still checks dimensions).
pub fn process_metrics_unvalidated(a: &Channel, b: &Channel) -> Result<MetricReport> {
    if a.dim() != b.dim() {
        return Err(QchanError::DimMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let rho = a.jamiolkowski_unchecked();
    let sigma = b.jamiolkowski_unchecked();
    MetricReport::between_states(rho.state(), sigma.state())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(rng: &mut ChaCha20Rng, dim: usize) -> DensityMatrix {
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let w = g.matmul(&g.adjoint()).unwrap();
        let tr = w.trace().re;
        DensityMatrix::new(w.scale(c(1.0 / tr, 0.0))).unwrap()
    }

    fn diag_state(entries: &[f64]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_diag(entries)).unwrap()
    }

    #[test]
    fn density_matrix_rejects_bad_inputs() {
        let non_hermitian = ComplexMatrix::from_rows(vec![
            vec![c(0.5, 0.0), c(0.5, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            DensityMatrix::new(non_hermitian),
            Err(QchanError::NotHermitian { .. })
        ));
        let wrong_trace = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(wrong_trace),
            Err(QchanError::InvalidParameter { .. })
        ));
        let negative = ComplexMatrix::from_real_diag(&[1.5, -0.5]);
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(QchanError::NotPositive { .. })
        ));
    }

    #[test]
    fn purity_of_named_states() {
        assert!((DensityMatrix::maximally_mixed(4).purity() - 0.25).abs() < 1e-15);
        assert!((DensityMatrix::basis_state(3, 1).purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn superfidelity_of_identical_states_is_one() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for dim in [2usize, 3, 5] {
            let rho = random_state(&mut rng, dim);
            assert!((superfidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn superfidelity_mixed_vs_pure() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let pure = DensityMatrix::basis_state(2, 0);
        assert!((superfidelity(&mixed, &pure).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn superfidelity_of_counterexample_states() {
        let phi = diag_state(&[0.5, 0.5, 0.0, 0.0]);
        let psi1 = diag_state(&[0.5, 0.0, 0.0, 0.5]);
        let psi2 = diag_state(&[0.0, 0.0, 0.5, 0.5]);
        assert!((superfidelity(&psi1, &psi2).unwrap() - 0.75).abs() < 1e-15);
        assert!((superfidelity(&phi, &psi2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn superfidelity_is_bitwise_symmetric() {
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        for dim in [2usize, 3, 4] {
            for _ in 0..25 {
                let a = random_state(&mut rng, dim);
                let b = random_state(&mut rng, dim);
                let ab = superfidelity(&a, &b).unwrap();
                let ba = superfidelity(&b, &a).unwrap();
                assert_eq!(ab.to_bits(), ba.to_bits());
            }
        }
    }

    #[test]
    fn superfidelity_commuting_matches_generic_on_diagonals() {
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        for _ in 0..20 {
            let draw = |rng: &mut ChaCha20Rng| {
                let mut v: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0_f64..1.0)).collect();
                let s: f64 = v.iter().sum();
                v.iter_mut().for_each(|x| *x /= s);
                v
            };
            let p = draw(&mut rng);
            let q = draw(&mut rng);
            let closed_form = superfidelity_commuting(&p, &q).unwrap();
            let generic = superfidelity(&diag_state(&p), &diag_state(&q)).unwrap();
            assert!((closed_form - generic).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_commuting_matches_generic_on_diagonals() {
        let mut rng = ChaCha20Rng::seed_from_u64(44);
        for _ in 0..20 {
            let draw = |rng: &mut ChaCha20Rng| {
                let mut v: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0_f64..1.0)).collect();
                let s: f64 = v.iter().sum();
                v.iter_mut().for_each(|x| *x /= s);
                v
            };
            let p = draw(&mut rng);
            let q = draw(&mut rng);
            let closed_form = fidelity_commuting(&p, &q).unwrap();
            let generic = fidelity(&diag_state(&p), &diag_state(&q)).unwrap();
            assert!((closed_form - generic).abs() < 1e-9);
        }
    }

    #[test]
    fn superfidelity_commuting_rejects_non_distributions() {
        assert!(matches!(
            superfidelity_commuting(&[0.5, 0.6], &[0.5, 0.5]),
            Err(QchanError::NotDistribution(_))
        ));
        assert!(matches!(
            superfidelity_commuting(&[1.2, -0.2], &[0.5, 0.5]),
            Err(QchanError::NotDistribution(_))
        ));
        assert!(matches!(
            superfidelity_commuting(&[1.0], &[0.5, 0.5]),
            Err(QchanError::DimMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_of_pure_states_is_squared_overlap() {
        let zero = DensityMatrix::basis_state(2, 0);
        let one = DensityMatrix::basis_state(2, 1);
        let plus = DensityMatrix::from_pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(fidelity(&zero, &one).unwrap() < 1e-12);
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_of_identical_states_is_one() {
        let mut rng = ChaCha20Rng::seed_from_u64(34);
        let rho = random_state(&mut rng, 4);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric_within_tolerance() {
        let mut rng = ChaCha20Rng::seed_from_u64(35);
        for _ in 0..10 {
            let a = random_state(&mut rng, 3);
            let b = random_state(&mut rng, 3);
            let ab = fidelity(&a, &b).unwrap();
            let ba = fidelity(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-9);
        }
    }

    #[test]
    fn bound_chain_on_random_pairs() {
        let mut rng = ChaCha20Rng::seed_from_u64(36);
        for dim in [2usize, 3, 4] {
            for _ in 0..200 {
                let a = random_state(&mut rng, dim);
                let b = random_state(&mut rng, dim);
                let f = fidelity(&a, &b).unwrap();
                let g = superfidelity(&a, &b).unwrap();
                let d = trace_distance(&a, &b).unwrap();
                assert!(f <= g + 1e-8, "F={f} exceeds G={g} at dim {dim}");
                assert!(1.0 - d <= g + 1e-8, "1-D={} exceeds G={g}", 1.0 - d);
            }
        }
    }

    #[test]
    fn qubit_superfidelity_equals_fidelity() {
        let mut rng = ChaCha20Rng::seed_from_u64(37);
        for _ in 0..100 {
            let a = random_state(&mut rng, 2);
            let b = random_state(&mut rng, 2);
            let f = fidelity(&a, &b).unwrap();
            let g = superfidelity(&a, &b).unwrap();
            assert!((f - g).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_state_superfidelity_equals_fidelity() {
        let mut rng = ChaCha20Rng::seed_from_u64(38);
        for dim in [3usize, 4] {
            for _ in 0..20 {
                let amps: Vec<C64> = (0..dim)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let pure = DensityMatrix::from_pure(&amps).unwrap();
                let mixed = random_state(&mut rng, dim);
                let f = fidelity(&pure, &mixed).unwrap();
                let g = superfidelity(&pure, &mixed).unwrap();
                assert!((f - g).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn trace_distance_extremes() {
        let zero = DensityMatrix::basis_state(2, 0);
        let one = DensityMatrix::basis_state(2, 1);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        assert!(trace_distance(&zero, &zero).unwrap() < 1e-14);
    }

    #[test]
    fn trace_distance_matches_bloch_formula_on_qubits() {
        let mut rng = ChaCha20Rng::seed_from_u64(39);
        let bloch = |r: &DensityMatrix| {
            let m = r.matrix();
            [
                2.0 * m[(0, 1)].re,
                -2.0 * m[(0, 1)].im,
                (m[(0, 0)] - m[(1, 1)]).re,
            ]
        };
        for _ in 0..50 {
            let a = random_state(&mut rng, 2);
            let b = random_state(&mut rng, 2);
            let (ra, rb) = (bloch(&a), bloch(&b));
            let half_bloch_dist = 0.5
                * ra.iter()
                    .zip(&rb)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
            let d = trace_distance(&a, &b).unwrap();
            assert!((d - half_bloch_dist).abs() < 1e-10);
        }
    }

    #[test]
    fn unitary_invariance_of_all_measures() {
        let mut rng = ChaCha20Rng::seed_from_u64(40);
        // Hand-built unitary: 3-dim Fourier matrix.
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let f3 = ComplexMatrix::from_fn(3, 3, |i, j| {
            omega.powu((i * j) as u32) / c(3.0_f64.sqrt(), 0.0)
        });
        let a = random_state(&mut rng, 3);
        let b = random_state(&mut rng, 3);
        let rot = |r: &DensityMatrix| {
            DensityMatrix::new_unchecked(
                f3.matmul(r.matrix()).unwrap().matmul(&f3.adjoint()).unwrap(),
            )
        };
        let (ar, br) = (rot(&a), rot(&b));
        assert!((fidelity(&a, &b).unwrap() - fidelity(&ar, &br).unwrap()).abs() < 1e-9);
        assert!((superfidelity(&a, &b).unwrap() - superfidelity(&ar, &br).unwrap()).abs() < 1e-9);
        assert!(
            (trace_distance(&a, &b).unwrap() - trace_distance(&ar, &br).unwrap()).abs() < 1e-9
        );
    }

    #[test]
    fn appending_a_pure_ancilla_preserves_superfidelity() {
        let mut rng = ChaCha20Rng::seed_from_u64(41);
        let phi = DensityMatrix::from_pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let r1 = random_state(&mut rng, 3);
        let r2 = random_state(&mut rng, 3);
        let ext = |r: &DensityMatrix| {
            DensityMatrix::new_unchecked(phi.matrix().kron(r.matrix()))
        };
        let g_small = superfidelity(&r1, &r2).unwrap();
        let g_big = superfidelity(&ext(&r1), &ext(&r2)).unwrap();
        assert!((g_small - g_big).abs() < 1e-10);
    }

    #[test]
    fn derived_metrics_at_endpoints() {
        let at_one = derived_metrics(1.0).unwrap();
        assert!(at_one.angle.abs() < 1e-12);
        assert!(at_one.bures.abs() < 1e-12);
        assert!(at_one.root_complement.abs() < 1e-12);
        let at_zero = derived_metrics(0.0).unwrap();
        assert!((at_zero.angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((at_zero.bures - 2.0_f64.sqrt()).abs() < 1e-12);
        assert!((at_zero.root_complement - 1.0).abs() < 1e-12);
        assert!(derived_metrics(1.5).is_err());
        assert!(derived_metrics(-0.1).is_err());
    }

    #[test]
    fn metric_report_is_consistent() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let a = random_state(&mut rng, 3);
        let b = random_state(&mut rng, 3);
        let rep = MetricReport::between_states(&a, &b).unwrap();
        assert!(rep.fidelity <= rep.superfidelity + 1e-8);
        assert!((rep.root_superinfidelity_cg - (1.0 - rep.superfidelity).sqrt()).abs() < 1e-12);
        assert!((rep.angle_ag2 - rep.superfidelity.acos()).abs() < 1e-12);
        assert!((rep.bures_bf - (2.0 - 2.0 * rep.fidelity.sqrt()).sqrt()).abs() < 1e-12);
        assert!(rep.to_text().contains("superfidelity"));
    }

    #[test]
    fn superfidelity_concavity_spot_check() {
        let mut rng = ChaCha20Rng::seed_from_u64(43);
        for _ in 0..50 {
            let r1 = random_state(&mut rng, 3);
            let r2 = random_state(&mut rng, 3);
            let r3 = random_state(&mut rng, 3);
            let alpha: f64 = rng.gen_range(0.0..1.0);
            let mix = DensityMatrix::new_unchecked(
                r2.matrix()
                    .scale(c(alpha, 0.0))
                    .add(&r3.matrix().scale(c(1.0 - alpha, 0.0)))
                    .unwrap(),
            );
            let lhs = superfidelity(&r1, &mix).unwrap();
            let rhs = alpha * superfidelity(&r1, &r2).unwrap()
                + (1.0 - alpha) * superfidelity(&r1, &r3).unwrap();
            assert!(lhs >= rhs - 1e-9);
        }
    }
}
