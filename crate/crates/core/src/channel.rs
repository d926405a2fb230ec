//! Quantum channels (trace-preserving, ideally completely positive maps) in
//! four interchangeable representations.
//!
//! Conventions, fixed crate-wide:
//! * `vec(ρ)` is row-major, so the raw entry slice of a matrix *is* its
//!   vectorization.
//! * The superoperator acts as `vec(Φ(ρ)) = M · vec(ρ)`; for Kraus operators
//!   `M = Σ_k E_k ⊗ conj(E_k)`.
//! * The dynamical matrix is `D = reshuffle(M) = Σ_k vec(E_k) vec(E_k)†`,
//!   with `tr D = d` for trace-preserving maps; the Jamiołkowski state is
//!   `ρ_J = D/d`, the image of the maximally entangled state under `Φ ⊗ id`
//!   (the channel acts on the first tensor factor).
//! * Complete positivity ⇔ `D ⪰ 0`; trace preservation ⇔ the partial trace
//!   of `D` over the first subsystem equals the identity.

use crate::error::{QchanError, Result};
use crate::families::AffineQubit;
use crate::linalg::{perfect_square_root, ComplexMatrix, Subsystem, C64};
use crate::metrics::DensityMatrix;
use serde::Serialize;
use std::sync::OnceLock;

/// Tolerance for the CP / TP / hermiticity verdicts in [`ValidationReport`].
pub const VALIDATION_TOL: f64 = 1e-8;
/// Eigenvalues of the dynamical matrix below this are dropped when extracting
/// Kraus operators.
const KRAUS_KEEP_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A set of same-dimension square Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausSet {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    /// Requires a nonempty list of square operators of equal dimension.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| QchanError::Shape("empty Kraus list".into()))?;
        if !first.is_square() {
            return Err(QchanError::Shape(format!(
                "Kraus operators must be square, got {:?}",
                first.shape()
            )));
        }
        let dim = first.rows();
        for op in &operators {
            if op.shape() != (dim, dim) {
                return Err(QchanError::Shape(format!(
                    "Kraus operators disagree in shape: {:?} vs ({dim}, {dim})",
                    op.shape()
                )));
            }
        }
        Ok(KrausSet { dim, operators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// `‖Σ E†E − I‖_F`, zero for trace-preserving sets.
    pub fn completeness_defect(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.operators {
            let term = e.adjoint().matmul(e).expect("square operators");
            acc = acc.add(&term).expect("same shape");
        }
        acc.sub(&ComplexMatrix::identity(self.dim))
            .expect("same shape")
            .frobenius_norm()
    }
}

/// The matrix `M` with `vec(Φ(ρ)) = M · vec(ρ)` (row-major vec).
#[derive(Debug, Clone)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    /// Accepts a `d²×d²` matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QchanError::Shape(format!(
                "superoperator must be square, got {:?}",
                matrix.shape()
            )));
        }
        let dim = perfect_square_root(matrix.rows())?;
        Ok(Superoperator { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// The dynamical matrix `D = reshuffle(M)`, normalized so `tr D = d` for
/// trace-preserving channels.
#[derive(Debug, Clone)]
pub struct DynamicalMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DynamicalMatrix {
    /// Accepts a `d²×d²` matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QchanError::Shape(format!(
                "dynamical matrix must be square, got {:?}",
                matrix.shape()
            )));
        }
        let dim = perfect_square_root(matrix.rows())?;
        Ok(DynamicalMatrix { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// The channel's Jamiołkowski state `ρ_J = D/d`, a density matrix on the
/// doubled space when the channel is CP-TP.
#[derive(Debug, Clone)]
pub struct JamiolkowskiState {
    dim: usize,
    state: DensityMatrix,
}

impl JamiolkowskiState {
    /// Hilbert-space dimension `d` of the underlying channel (the state lives
    /// in dimension `d²`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }
}

/// CP / TP diagnosis of a channel, with the defects that drove each verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub dim: usize,
    /// `max |D − D†|` entrywise.
    pub hermiticity_defect: f64,
    pub trace_re: f64,
    pub trace_im: f64,
    /// `|tr D − d|`.
    pub trace_defect: f64,
    /// Smallest eigenvalue of `D/d`; NaN when `D` is too far from hermitian
    /// to diagonalize.
    pub min_eigenvalue: f64,
    /// `‖Tr_1 D − I‖_F`.
    pub tp_defect: f64,
    pub hermitian: bool,
    pub completely_positive: bool,
    pub trace_preserving: bool,
}

impl ValidationReport {
    pub fn is_cp_tp(&self) -> bool {
        self.hermitian && self.completely_positive && self.trace_preserving
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "dim {}: hermitian {} (defect {:.3e}), CP {} (min eigenvalue {:.3e}), \
             TP {} (defect {:.3e}), trace {:.12}{:+.3e}i",
            self.dim,
            self.hermitian,
            self.hermiticity_defect,
            self.completely_positive,
            self.min_eigenvalue,
            self.trace_preserving,
            self.tp_defect,
            self.trace_re,
            self.trace_im,
        )
    }
}

/// The stored form of a channel; conversions are cached on first use.
#[derive(Debug, Clone)]
pub enum Repr {
    Kraus(KrausSet),
    Superoperator(Superoperator),
    Dynamical(DynamicalMatrix),
    Affine(AffineQubit),
}

impl Repr {
    /// Short label for display.
    pub fn kind(&self) -> &'static str {
        match self {
            Repr::Kraus(_) => "kraus",
            Repr::Superoperator(_) => "superoperator",
            Repr::Dynamical(_) => "dynamical",
            Repr::Affine(_) => "affine",
        }
    }
}

/// A quantum channel with lazily cached representations.
///
/// Construction never validates; call [`Channel::validate`] (or read
/// [`Channel::validation`]) to gate on CP-TP.
#[derive(Debug, Clone)]
pub struct Channel {
    dim: usize,
    repr: Repr,
    superop: OnceLock<Superoperator>,
    dynamical: OnceLock<DynamicalMatrix>,
    jam: OnceLock<JamiolkowskiState>,
    kraus_cache: OnceLock<KrausSet>,
    validation: OnceLock<ValidationReport>,
}

impl Channel {
    fn with_repr(dim: usize, repr: Repr) -> Self {
        Channel {
            dim,
            repr,
            superop: OnceLock::new(),
            dynamical: OnceLock::new(),
            jam: OnceLock::new(),
            kraus_cache: OnceLock::new(),
            validation: OnceLock::new(),
        }
    }

    pub fn from_kraus(operators: Vec<ComplexMatrix>) -> Result<Self> {
        Ok(Channel::from_kraus_set(KrausSet::new(operators)?))
    }

    pub fn from_kraus_set(set: KrausSet) -> Self {
        Channel::with_repr(set.dim(), Repr::Kraus(set))
    }

    pub fn from_superoperator(matrix: ComplexMatrix) -> Result<Self> {
        let s = Superoperator::new(matrix)?;
        Ok(Channel::with_repr(s.dim(), Repr::Superoperator(s)))
    }

    pub fn from_dynamical(matrix: ComplexMatrix) -> Result<Self> {
        let d = DynamicalMatrix::new(matrix)?;
        Ok(Channel::with_repr(d.dim(), Repr::Dynamical(d)))
    }

    /// Rescales a Jamiołkowski state back to the dynamical matrix `D = d·ρ`.
    pub fn from_jamiolkowski(state: &DensityMatrix) -> Result<Self> {
        let dim = perfect_square_root(state.dim())?;
        let d = state.matrix().scale(C64::new(dim as f64, 0.0));
        Channel::from_dynamical(d)
    }

    pub fn from_affine(map: AffineQubit) -> Self {
        Channel::with_repr(2, Repr::Affine(map))
    }

    /// The identity channel on a `dim`-dimensional system.
    pub fn identity(dim: usize) -> Self {
        Channel::from_kraus_set(
            KrausSet::new(vec![ComplexMatrix::identity(dim)]).expect("identity is square"),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    /// The superoperator form, computed once and cached.
    pub fn superoperator(&self) -> &Superoperator {
        if let Repr::Superoperator(m) = &self.repr {
            return m;
        }
        self.superop.get_or_init(|| {
            let matrix = match &self.repr {
                Repr::Kraus(k) => superop_from_kraus(k),
                Repr::Superoperator(_) => unreachable!(),
                Repr::Dynamical(d) => d
                    .matrix
                    .reshuffle()
                    .expect("dynamical matrix shape was checked"),
                Repr::Affine(a) => a
                    .dynamical_matrix()
                    .reshuffle()
                    .expect("affine dynamical matrix is 4×4"),
            };
            Superoperator {
                dim: self.dim,
                matrix,
            }
        })
    }

    /// The dynamical-matrix form, computed once and cached.
    pub fn dynamical(&self) -> &DynamicalMatrix {
        if let Repr::Dynamical(d) = &self.repr {
            return d;
        }
        self.dynamical.get_or_init(|| {
            let matrix = match &self.repr {
                Repr::Kraus(k) => dynamical_from_kraus(k),
                Repr::Superoperator(m) => m
                    .matrix
                    .reshuffle()
                    .expect("superoperator shape was checked"),
                Repr::Dynamical(_) => unreachable!(),
                Repr::Affine(a) => a.dynamical_matrix(),
            };
            DynamicalMatrix {
                dim: self.dim,
                matrix,
            }
        })
    }

    /// The Jamiołkowski state without any CP-TP gate; the wrapped
    /// [`DensityMatrix`] is not re-validated.
    pub fn jamiolkowski_unchecked(&self) -> &JamiolkowskiState {
        self.jam.get_or_init(|| {
            let scale = C64::new(1.0 / self.dim as f64, 0.0);
            JamiolkowskiState {
                dim: self.dim,
                state: DensityMatrix::new_unchecked(self.dynamical().matrix.scale(scale)),
            }
        })
    }

    /// The Jamiołkowski state, after checking the channel is CP-TP.
    pub fn jamiolkowski(&self) -> Result<&JamiolkowskiState> {
        self.validate()?;
        Ok(self.jamiolkowski_unchecked())
    }

    /// Kraus operators, extracting them from the dynamical matrix when the
    /// channel was built in another form. Extraction requires `D ⪰ 0` within
    /// tolerance; operators come out ordered by descending weight with a
    /// deterministic phase.
    pub fn kraus(&self) -> Result<&KrausSet> {
        if let Repr::Kraus(k) = &self.repr {
            return Ok(k);
        }
        if let Some(k) = self.kraus_cache.get() {
            return Ok(k);
        }
        let extracted = extract_kraus(self.dim, &self.dynamical().matrix)?;
        Ok(self.kraus_cache.get_or_init(|| extracted))
    }

    /// Full CP / TP diagnosis, cached.
    pub fn validation(&self) -> &ValidationReport {
        self.validation.get_or_init(|| {
            let d = &self.dynamical().matrix;
            let dim = self.dim;
            let hermiticity_defect = d.hermiticity_defect();
            let hermitian = hermiticity_defect <= VALIDATION_TOL;
            let tr = d.trace();
            let trace_defect = (tr - C64::new(dim as f64, 0.0)).norm();
            let reduced = d
                .partial_trace(dim, dim, Subsystem::First)
                .expect("dynamical matrix factors as d×d");
            let tp_defect = reduced
                .sub(&ComplexMatrix::identity(dim))
                .expect("same shape")
                .frobenius_norm();
            let min_eigenvalue = if hermitian {
                let sym = d
                    .add(&d.adjoint())
                    .expect("same shape")
                    .scale(C64::new(0.5, 0.0));
                match sym.eigh() {
                    Ok(e) => e.min_eigenvalue() / dim as f64,
                    Err(_) => f64::NAN,
                }
            } else {
                f64::NAN
            };
            ValidationReport {
                dim,
                hermiticity_defect,
                trace_re: tr.re,
                trace_im: tr.im,
                trace_defect,
                min_eigenvalue,
                tp_defect,
                hermitian,
                completely_positive: min_eigenvalue >= -VALIDATION_TOL,
                trace_preserving: tp_defect <= VALIDATION_TOL,
            }
        })
    }

    /// Errors with the full [`ValidationReport`] unless the channel is CP-TP.
    pub fn validate(&self) -> Result<()> {
        let report = self.validation();
        if report.is_cp_tp() {
            Ok(())
        } else {
            Err(QchanError::Validation(Box::new(report.clone())))
        }
    }

    /// Applies the channel to a state. The output is not re-validated.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(QchanError::DimMismatch {
                expected: self.dim,
                got: rho.dim(),
            });
        }
        let y = self.superoperator().matrix.matvec(rho.matrix().entries())?;
        Ok(DensityMatrix::new_unchecked(
            ComplexMatrix::from_vec_row_major(self.dim, self.dim, y)?,
        ))
    }

    /// Sequential composition `self ∘ earlier` — `earlier` acts first.
    pub fn compose(&self, earlier: &Channel) -> Result<Channel> {
        if self.dim != earlier.dim {
            return Err(QchanError::DimMismatch {
                expected: self.dim,
                got: earlier.dim,
            });
        }
        let m = self
            .superoperator()
            .matrix
            .matmul(&earlier.superoperator().matrix)?;
        Ok(Channel::with_repr(
            self.dim,
            Repr::Superoperator(Superoperator {
                dim: self.dim,
                matrix: m,
            }),
        ))
    }

    /// Parallel composition `self ⊗ other` on the combined system, with basis
    /// order `|i₁ i₂⟩ ↦ i₁·d₂ + i₂`.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let (d1, d2) = (self.dim, other.dim);
        let kron = self
            .superoperator()
            .matrix
            .kron(&other.superoperator().matrix);
        let matrix = regroup_tensor(&kron, d1, d2);
        Channel::with_repr(
            d1 * d2,
            Repr::Superoperator(Superoperator {
                dim: d1 * d2,
                matrix,
            }),
        )
    }
}

fn superop_from_kraus(k: &KrausSet) -> ComplexMatrix {
    let n = k.dim * k.dim;
    let mut m = ComplexMatrix::zeros(n, n);
    for e in &k.operators {
        m = m.add(&e.kron(&e.conj())).expect("same shape");
    }
    m
}

fn dynamical_from_kraus(k: &KrausSet) -> ComplexMatrix {
    let n = k.dim * k.dim;
    let mut d = ComplexMatrix::zeros(n, n);
    for e in &k.operators {
        let v = e.entries();
        for r in 0..n {
            if v[r] == ZERO {
                continue;
            }
            for c in 0..n {
                d[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    d
}

fn extract_kraus(dim: usize, d_matrix: &ComplexMatrix) -> Result<KrausSet> {
    let eig = d_matrix.eigh()?;
    let min = eig.min_eigenvalue();
    if min < -VALIDATION_TOL * dim as f64 {
        return Err(QchanError::NotPositive {
            min_eigenvalue: min / dim as f64,
        });
    }
    let n = dim * dim;
    let mut operators = Vec::new();
    for idx in (0..n).rev() {
        let lam = eig.eigenvalues[idx];
        if lam <= KRAUS_KEEP_TOL {
            continue;
        }
        let mut column: Vec<C64> = (0..n).map(|r| eig.eigenvectors[(r, idx)]).collect();
        let phase = column
            .iter()
            .find(|z| z.norm() > 1e-12)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(ONE);
        let weight = C64::new(lam.sqrt(), 0.0);
        for z in &mut column {
            *z *= phase * weight;
        }
        operators.push(ComplexMatrix::from_vec_row_major(dim, dim, column)?);
    }
    if operators.is_empty() {
        operators.push(ComplexMatrix::zeros(dim, dim));
    }
    KrausSet::new(operators)
}

fn tensor_index_map(d1: usize, d2: usize) -> Vec<usize> {
    let n = d1 * d1 * d2 * d2;
    (0..n)
        .map(|src| {
            let a = src / (d2 * d2);
            let b = src % (d2 * d2);
            let (i1, j1) = (a / d1, a % d1);
            let (i2, j2) = (b / d2, b % d2);
            (i1 * d2 + i2) * (d1 * d2) + (j1 * d2 + j2)
        })
        .collect()
}

/// The permutation `P` relating local and global vectorizations:
/// `M_{Φ₁⊗Φ₂} = P (M₁ ⊗ M₂) Pᵀ`, and identically for dynamical matrices and
/// Jamiołkowski states.
pub fn tensor_permutation(d1: usize, d2: usize) -> ComplexMatrix {
    let map = tensor_index_map(d1, d2);
    let n = map.len();
    let mut p = ComplexMatrix::zeros(n, n);
    for (src, &dst) in map.iter().enumerate() {
        p[(dst, src)] = ONE;
    }
    p
}

fn regroup_tensor(kron: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    let map = tensor_index_map(d1, d2);
    let n = map.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(map[r], map[c])] = kron[(r, c)];
        }
    }
    out
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
        DensityMatrix::new_unchecked(w.scale(c(1.0 / tr, 0.0)))
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap()
    }

    fn mixed_unitary_qubit(p: f64) -> Channel {
        let e0 = ComplexMatrix::identity(2).scale(c((1.0 - p).sqrt(), 0.0));
        let e1 = pauli_x().scale(c(p.sqrt(), 0.0));
        Channel::from_kraus(vec![e0, e1]).unwrap()
    }

    #[test]
    fn identity_channel_acts_trivially() {
        let mut rng = ChaCha20Rng::seed_from_u64(50);
        for dim in [2usize, 3] {
            let id = Channel::identity(dim);
            let rho = random_state(&mut rng, dim);
            let out = id.apply(&rho).unwrap();
            assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        }
    }

    #[test]
    fn identity_dynamical_matrix_is_unnormalized_bell_projector() {
        let id = Channel::identity(2);
        let d = id.dynamical().matrix().clone();
        for r in 0..4 {
            for col in 0..4 {
                let expect = if (r == 0 || r == 3) && (col == 0 || col == 3) {
                    ONE
                } else {
                    ZERO
                };
                assert_eq!(d[(r, col)], expect, "entry ({r},{col})");
            }
        }
        assert_eq!(d.trace(), c(2.0, 0.0));
    }

    #[test]
    fn kraus_dephasing_kills_off_diagonals() {
        let k0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let k1 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let ch = Channel::from_kraus(vec![k0, k1]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(51);
        let rho = random_state(&mut rng, 2);
        let out = ch.apply(&rho).unwrap();
        assert!(out.matrix()[(0, 1)].norm() < 1e-15);
        assert!(out.matrix()[(1, 0)].norm() < 1e-15);
        assert!((out.matrix()[(0, 0)] - rho.matrix()[(0, 0)]).norm() < 1e-15);
    }

    #[test]
    fn superoperator_and_dynamical_are_reshuffles_of_each_other() {
        let ch = mixed_unitary_qubit(0.3);
        let m = ch.superoperator().matrix().clone();
        let d = ch.dynamical().matrix().clone();
        assert_eq!(m.reshuffle().unwrap().max_abs_diff(&d), 0.0);
        assert_eq!(d.reshuffle().unwrap().max_abs_diff(&m), 0.0);
        let from_super = Channel::from_superoperator(m.clone()).unwrap();
        assert!(from_super.dynamical().matrix().max_abs_diff(&d) < 1e-15);
        let from_dyn = Channel::from_dynamical(d).unwrap();
        assert!(from_dyn.superoperator().matrix().max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn kraus_extraction_reproduces_the_channel() {
        let ch = mixed_unitary_qubit(0.25);
        let rebuilt = Channel::from_dynamical(ch.dynamical().matrix().clone()).unwrap();
        let extracted = rebuilt.kraus().unwrap();
        let again = Channel::from_kraus(extracted.operators().to_vec()).unwrap();
        assert!(
            again
                .superoperator()
                .matrix()
                .max_abs_diff(ch.superoperator().matrix())
                < 1e-10
        );
        assert!(extracted.completeness_defect() < 1e-10);
    }

    #[test]
    fn kraus_extraction_is_deterministic() {
        let build = || {
            let ch = mixed_unitary_qubit(0.4);
            let rebuilt = Channel::from_dynamical(ch.dynamical().matrix().clone()).unwrap();
            rebuilt.kraus().unwrap().operators().to_vec()
        };
        let a = build();
        let b = build();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            for (p, q) in x.entries().iter().zip(y.entries()) {
                assert_eq!(p.re.to_bits(), q.re.to_bits());
                assert_eq!(p.im.to_bits(), q.im.to_bits());
            }
        }
    }

    #[test]
    fn kraus_extraction_orders_by_descending_weight() {
        let ch = mixed_unitary_qubit(0.1);
        let rebuilt = Channel::from_dynamical(ch.dynamical().matrix().clone()).unwrap();
        let ops = rebuilt.kraus().unwrap().operators().to_vec();
        let weights: Vec<f64> = ops.iter().map(|e| e.frobenius_norm()).collect();
        for w in weights.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn transpose_map_is_positive_but_not_completely_positive() {
        // vec(ρᵀ) permutes indices, so M is the swap matrix.
        let swap = ComplexMatrix::from_fn(4, 4, |r, col| {
            let (p, q) = (r / 2, r % 2);
            let (s, t) = (col / 2, col % 2);
            if p == t && q == s {
                ONE
            } else {
                ZERO
            }
        });
        let ch = Channel::from_superoperator(swap).unwrap();
        let report = ch.validation();
        assert!(report.hermitian);
        assert!(report.trace_preserving);
        assert!(!report.completely_positive);
        assert!((report.min_eigenvalue + 0.5).abs() < 1e-12);
        assert!(matches!(
            ch.validate(),
            Err(QchanError::Validation(ref r)) if !r.completely_positive
        ));
        assert!(ch.jamiolkowski().is_err());
    }

    #[test]
    fn trace_decreasing_map_is_flagged() {
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        let ch = Channel::from_kraus(vec![half]).unwrap();
        let report = ch.validation();
        assert!(report.completely_positive);
        assert!(!report.trace_preserving);
        assert!(report.tp_defect > 0.5);
    }

    #[test]
    fn non_hermitian_dynamical_matrix_is_flagged() {
        let mut d = ComplexMatrix::zeros(4, 4);
        d[(0, 1)] = ONE;
        let ch = Channel::from_dynamical(d).unwrap();
        let report = ch.validation();
        assert!(!report.hermitian);
        assert!(report.min_eigenvalue.is_nan());
        assert!(!report.completely_positive);
    }

    #[test]
    fn validation_accepts_cptp_channels() {
        let ch = mixed_unitary_qubit(0.2);
        assert!(ch.validate().is_ok());
        let report = ch.validation();
        assert!(report.is_cp_tp());
        assert!(report.hermiticity_defect < 1e-14);
        assert!(report.tp_defect < 1e-14);
        assert!((report.trace_re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn compose_applies_the_second_argument_first() {
        let reset = Channel::from_kraus(vec![
            ComplexMatrix::from_rows(vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
            ])
            .unwrap(),
            ComplexMatrix::from_rows(vec![
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
            ])
            .unwrap(),
        ])
        .unwrap();
        let flip = Channel::from_kraus(vec![pauli_x()]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(52);
        let rho = random_state(&mut rng, 2);

        let reset_then_flip = flip.compose(&reset).unwrap();
        let out = reset_then_flip.apply(&rho).unwrap();
        assert!((out.matrix()[(1, 1)] - ONE).norm() < 1e-12);

        let flip_then_reset = reset.compose(&flip).unwrap();
        let out = flip_then_reset.apply(&rho).unwrap();
        assert!((out.matrix()[(0, 0)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn compose_rejects_dimension_mismatch() {
        let a = Channel::identity(2);
        let b = Channel::identity(3);
        assert!(matches!(
            a.compose(&b),
            Err(QchanError::DimMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn tensor_matches_pairwise_kraus_products() {
        let a = mixed_unitary_qubit(0.3);
        let k0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let k1 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let b = Channel::from_kraus(vec![k0.clone(), k1.clone()]).unwrap();

        let via_permutation = a.tensor(&b);
        let mut pairwise = Vec::new();
        for e in a.kraus().unwrap().operators() {
            for f in b.kraus().unwrap().operators() {
                pairwise.push(e.kron(f));
            }
        }
        let via_kraus = Channel::from_kraus(pairwise).unwrap();
        assert!(
            via_permutation
                .superoperator()
                .matrix()
                .max_abs_diff(via_kraus.superoperator().matrix())
                < 1e-12
        );
    }

    #[test]
    fn tensor_action_factorizes_on_product_states() {
        let mut rng = ChaCha20Rng::seed_from_u64(53);
        let a = mixed_unitary_qubit(0.15);
        let shift = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == (j + 1) % 3 {
                ONE
            } else {
                ZERO
            }
        });
        let b = Channel::from_kraus(vec![shift]).unwrap();
        let ra = random_state(&mut rng, 2);
        let rb = random_state(&mut rng, 3);
        let joint = DensityMatrix::new_unchecked(ra.matrix().kron(rb.matrix()));
        let out = a.tensor(&b).apply(&joint).unwrap();
        let expect = a
            .apply(&ra)
            .unwrap()
            .matrix()
            .kron(b.apply(&rb).unwrap().matrix());
        assert!(out.matrix().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn tensor_permutation_matrix_matches_fast_path() {
        for (d1, d2) in [(2usize, 2usize), (2, 3)] {
            let a = Channel::identity(d1);
            let b = mixed_unitary_qubit(0.2);
            let b = if d2 == 2 {
                b
            } else {
                Channel::identity(d2)
            };
            let kron = a
                .superoperator()
                .matrix()
                .kron(b.superoperator().matrix());
            let p = tensor_permutation(d1, d2);
            let slow = p.matmul(&kron).unwrap().matmul(&p.transpose()).unwrap();
            let fast = regroup_tensor(&kron, d1, d2);
            assert_eq!(slow.max_abs_diff(&fast), 0.0);
        }
    }

    #[test]
    fn tensor_permutation_is_a_permutation_matrix() {
        let p = tensor_permutation(2, 3);
        for r in 0..36 {
            let row_ones = (0..36).filter(|&c2| p[(r, c2)] == ONE).count();
            let col_ones = (0..36).filter(|&r2| p[(r2, r)] == ONE).count();
            assert_eq!(row_ones, 1);
            assert_eq!(col_ones, 1);
        }
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let t = Channel::identity(2).tensor(&Channel::identity(3));
        assert!(
            t.superoperator()
                .matrix()
                .max_abs_diff(&ComplexMatrix::identity(36))
                < 1e-15
        );
    }

    #[test]
    fn jamiolkowski_state_of_cptp_channel_is_a_density_matrix() {
        let ch = mixed_unitary_qubit(0.35);
        let jam = ch.jamiolkowski().unwrap();
        assert_eq!(jam.dim(), 2);
        let m = jam.state().matrix().clone();
        assert!((m.trace() - ONE).norm() < 1e-14);
        assert!(DensityMatrix::new(m).is_ok());
    }

    #[test]
    fn jamiolkowski_roundtrip_preserves_the_channel() {
        let ch = mixed_unitary_qubit(0.45);
        let jam = ch.jamiolkowski().unwrap().state().clone();
        let back = Channel::from_jamiolkowski(&jam).unwrap();
        assert!(
            back.superoperator()
                .matrix()
                .max_abs_diff(ch.superoperator().matrix())
                < 1e-14
        );
    }

    #[test]
    fn constructors_reject_bad_shapes() {
        assert!(Channel::from_kraus(vec![]).is_err());
        assert!(Channel::from_superoperator(ComplexMatrix::zeros(3, 3)).is_err());
        assert!(Channel::from_superoperator(ComplexMatrix::zeros(4, 9)).is_err());
        assert!(Channel::from_dynamical(ComplexMatrix::zeros(2, 2)).is_err());
        let mixed_shapes = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)];
        assert!(Channel::from_kraus(mixed_shapes).is_err());
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let ch = Channel::identity(2);
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            ch.apply(&rho),
            Err(QchanError::DimMismatch { expected: 2, got: 3 })
        ));
    }
}
