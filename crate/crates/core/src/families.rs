//! Named channel families with closed-form distance measures.
//!
//! Every family here admits an analytic superfidelity (and sometimes fidelity
//! and trace distance) between members; tests and the `verify` suites compare
//! those formulas against the generic eigendecomposition route, so the two
//! must never share code.

use crate::channel::Channel;
use crate::error::{QchanError, Result};
use crate::linalg::{ComplexMatrix, C64, HERMITICITY_TOL};
use crate::metrics::{clamp_nonneg, clamp_unit, check_distribution};
use serde::{Deserialize, Serialize};

const PARAM_TOL: f64 = 1e-12;
const RADICAND_TOL: f64 = 1e-10;

fn ensure_range(name: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value >= lo - PARAM_TOL && value <= hi + PARAM_TOL {
        Ok(())
    } else {
        Err(QchanError::InvalidParameter {
            name: name.into(),
            value: format!("{value}"),
            bound: format!("[{lo}, {hi}]"),
        })
    }
}

fn ensure_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(QchanError::InvalidParameter {
            name: "d".into(),
            value: format!("{d}"),
            bound: "≥ 2".into(),
        });
    }
    Ok(())
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A qubit map acting on the Bloch vector as `r ↦ η ∘ r + κ`
/// (componentwise scaling plus a shift).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineQubit {
    pub kappa: [f64; 3],
    pub eta: [f64; 3],
}

impl AffineQubit {
    pub fn new(kappa: [f64; 3], eta: [f64; 3]) -> Self {
        AffineQubit { kappa, eta }
    }

    pub fn identity() -> Self {
        AffineQubit {
            kappa: [0.0; 3],
            eta: [1.0; 3],
        }
    }

    /// The 4×4 dynamical matrix of the map.
    pub fn dynamical_matrix(&self) -> ComplexMatrix {
        let [kx, ky, kz] = self.kappa;
        let [ex, ey, ez] = self.eta;
        let re = |v: f64| C64::new(0.5 * v, 0.0);
        let k_upper = C64::new(0.5 * kx, 0.5 * ky);
        let k_lower = k_upper.conj();
        ComplexMatrix::from_rows(vec![
            vec![re(1.0 + ez + kz), re(0.0), k_upper, re(ex + ey)],
            vec![re(0.0), re(1.0 - ez + kz), re(ex - ey), k_upper],
            vec![k_lower, re(ex - ey), re(1.0 - ez - kz), re(0.0)],
            vec![re(ex + ey), k_lower, re(0.0), re(1.0 + ez - kz)],
        ])
        .expect("static 4×4 shape")
    }

    /// The induced action on a Bloch vector.
    pub fn bloch_map(&self, r: [f64; 3]) -> [f64; 3] {
        [
            self.eta[0] * r[0] + self.kappa[0],
            self.eta[1] * r[1] + self.kappa[1],
            self.eta[2] * r[2] + self.kappa[2],
        ]
    }

    pub fn channel(self) -> Channel {
        Channel::from_affine(self)
    }
}

fn affine_excess(m: &AffineQubit) -> Result<f64> {
    let r = 3.0 - dot3(&m.kappa, &m.kappa) - dot3(&m.eta, &m.eta);
    if r < -RADICAND_TOL {
        return Err(QchanError::InvalidParameter {
            name: "affine map".into(),
            value: format!("‖κ‖² + ‖η‖² = {}", 3.0 - r),
            bound: "≤ 3".into(),
        });
    }
    Ok(clamp_nonneg(r))
}

/// Closed-form superfidelity between two affine qubit maps:
/// `¼ (1 + κ_a·κ_b + η_a·η_b + √(3−‖κ_a‖²−‖η_a‖²) √(3−‖κ_b‖²−‖η_b‖²))`.
pub fn superfidelity_affine(a: &AffineQubit, b: &AffineQubit) -> Result<f64> {
    let value = 0.25
        * (1.0
            + dot3(&a.kappa, &b.kappa)
            + dot3(&a.eta, &b.eta)
            + (affine_excess(a)?).sqrt() * (affine_excess(b)?).sqrt());
    Ok(clamp_unit(value))
}

/// Jamiołkowski spectrum of a unital qubit map with scaling vector `η`, in
/// the Bell basis: weights of conjugation by I, X, Y, Z.
pub fn bell_diagonal_probabilities(eta: [f64; 3]) -> [f64; 4] {
    let [x, y, z] = eta;
    [
        0.25 * (1.0 + x + y + z),
        0.25 * (1.0 + x - y - z),
        0.25 * (1.0 - x + y - z),
        0.25 * (1.0 - x - y + z),
    ]
}

/// Closed-form superfidelity for unital qubit maps (`κ = 0`).
pub fn superfidelity_unital_qubit(eta_a: [f64; 3], eta_b: [f64; 3]) -> Result<f64> {
    superfidelity_affine(
        &AffineQubit::new([0.0; 3], eta_a),
        &AffineQubit::new([0.0; 3], eta_b),
    )
}

/// Closed-form fidelity for unital qubit maps, via their common Bell
/// eigenbasis: `(Σ √(pᵢ qᵢ))²` over the four conjugation weights.
pub fn fidelity_unital_qubit(eta_a: [f64; 3], eta_b: [f64; 3]) -> Result<f64> {
    let p = bell_diagonal_probabilities(eta_a);
    let q = bell_diagonal_probabilities(eta_b);
    crate::metrics::fidelity_commuting(&p, &q)
}

/// Closed-form trace distance for unital qubit maps:
/// `⅛ Σ_s |s · (η_a − η_b)|` over the four sign patterns `s` of the Bell
/// basis.
pub fn trace_distance_unital_qubit(eta_a: [f64; 3], eta_b: [f64; 3]) -> f64 {
    let d = [
        eta_a[0] - eta_b[0],
        eta_a[1] - eta_b[1],
        eta_a[2] - eta_b[2],
    ];
    let patterns: [[f64; 3]; 4] = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0],
    ];
    0.125
        * patterns
            .iter()
            .map(|s| (s[0] * d[0] + s[1] * d[1] + s[2] * d[2]).abs())
            .sum::<f64>()
}

/// Depolarizing channel: keeps the input with weight `p` and replaces it by
/// the maximally mixed state otherwise. CP for `p ∈ [−1/(d²−1), 1]`.
pub fn depolarizing(d: usize, p: f64) -> Result<Channel> {
    ensure_dim(d)?;
    let dd = d * d;
    ensure_range("p", p, -1.0 / (dd as f64 - 1.0), 1.0)?;
    let uniform = (1.0 - p) / d as f64;
    let matrix = ComplexMatrix::from_fn(dd, dd, |r, c| {
        let mut v = 0.0;
        if r % (d + 1) == 0 && c % (d + 1) == 0 {
            v += p;
        }
        if r == c {
            v += uniform;
        }
        C64::new(v, 0.0)
    });
    Channel::from_dynamical(matrix)
}

/// Closed-form superfidelity between depolarizing channels:
/// `(1 + (d²−1)(pq + √((1−p²)(1−q²)))) / d²`.
pub fn superfidelity_depolarizing(d: usize, p: f64, q: f64) -> Result<f64> {
    ensure_dim(d)?;
    ensure_range("p", p, -1.0, 1.0)?;
    ensure_range("q", q, -1.0, 1.0)?;
    let dd = (d * d) as f64;
    let cross = clamp_nonneg(1.0 - p * p).sqrt() * clamp_nonneg(1.0 - q * q).sqrt();
    Ok(clamp_unit((1.0 + (dd - 1.0) * (p * q + cross)) / dd))
}

/// Mixture of the transpose map (weight `p`) with complete depolarizing.
/// CP for `p ∈ [−1/(d−1), 1/(d+1)]`.
pub fn werner_holevo(d: usize, p: f64) -> Result<Channel> {
    ensure_dim(d)?;
    ensure_range("p", p, -1.0 / (d as f64 - 1.0), 1.0 / (d as f64 + 1.0))?;
    let dd = d * d;
    let uniform = (1.0 - p) / d as f64;
    let matrix = ComplexMatrix::from_fn(dd, dd, |r, c| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        let mut v = 0.0;
        if i == l && j == k {
            v += p;
        }
        if r == c {
            v += uniform;
        }
        C64::new(v, 0.0)
    });
    Channel::from_dynamical(matrix)
}

/// Closed-form superfidelity between members of the transpose-mixture family;
/// identical in form to [`superfidelity_depolarizing`].
pub fn superfidelity_werner_holevo(d: usize, p: f64, q: f64) -> Result<f64> {
    superfidelity_depolarizing(d, p, q)
}

/// Closed-form superfidelity between a depolarizing channel (`p`) and a
/// transpose-mixture channel (`q`):
/// `(1 + (d−1)pq + (d²−1)√((1−p²)(1−q²))) / d²`.
pub fn superfidelity_depolarizing_vs_werner_holevo(d: usize, p: f64, q: f64) -> Result<f64> {
    ensure_dim(d)?;
    ensure_range("p", p, -1.0, 1.0)?;
    ensure_range("q", q, -1.0, 1.0)?;
    let df = d as f64;
    let dd = df * df;
    let cross = clamp_nonneg(1.0 - p * p).sqrt() * clamp_nonneg(1.0 - q * q).sqrt();
    Ok(clamp_unit(
        (1.0 + (df - 1.0) * p * q + (dd - 1.0) * cross) / dd,
    ))
}

/// Entrywise-multiplication (dephasing) channel `ρ ↦ F ∘ ρ`.
///
/// `F` must be hermitian, PSD and have unit diagonal; off-diagonal entries
/// damp the corresponding coherences.
pub fn dephasing(f: ComplexMatrix) -> Result<Channel> {
    if !f.is_square() {
        return Err(QchanError::Shape(format!(
            "dephasing matrix must be square, got {:?}",
            f.shape()
        )));
    }
    let d = f.rows();
    ensure_dim(d)?;
    let defect = f.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(QchanError::NotHermitian { defect });
    }
    for i in 0..d {
        if (f[(i, i)] - C64::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(QchanError::InvalidParameter {
                name: format!("F[{i},{i}]"),
                value: format!("{}", f[(i, i)]),
                bound: "1 within 1e-9".into(),
            });
        }
    }
    let min = f.eigh()?.min_eigenvalue();
    if min < -1e-9 {
        return Err(QchanError::NotPositive {
            min_eigenvalue: min,
        });
    }
    let dd = d * d;
    let matrix = ComplexMatrix::from_fn(dd, dd, |r, c| {
        if r % (d + 1) == 0 && c % (d + 1) == 0 {
            f[(r / (d + 1), c / (d + 1))]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Channel::from_dynamical(matrix)
}

/// Qubit dephasing that scales the off-diagonal by `f` (`|f| ≤ 1`).
///
/// Stored through its two-operator Kraus form `diag(1, f̄)`,
/// `diag(0, √(1−|f|²))` (under `ρ ↦ Σ E ρ E†`), so exporting the channel
/// reproduces the closed-form operators rather than an eigendecomposition.
pub fn dephasing_qubit(f: C64) -> Result<Channel> {
    if f.norm() > 1.0 + PARAM_TOL {
        return Err(QchanError::InvalidParameter {
            name: "f".into(),
            value: format!("{f}"),
            bound: "|f| ≤ 1".into(),
        });
    }
    let zero = C64::new(0.0, 0.0);
    let keep = ComplexMatrix::from_rows(vec![
        vec![C64::new(1.0, 0.0), zero],
        vec![zero, f.conj()],
    ])
    .expect("static 2×2 shape");
    let leak = ComplexMatrix::from_rows(vec![
        vec![zero, zero],
        vec![zero, C64::new(clamp_nonneg(1.0 - f.norm_sqr()).sqrt(), 0.0)],
    ])
    .expect("static 2×2 shape");
    Channel::from_kraus(vec![keep, leak])
}

/// Closed-form superfidelity between dephasing channels:
/// `(Re tr(F_a F_b) + √(d²−‖F_a‖²_F) √(d²−‖F_b‖²_F)) / d²`.
pub fn superfidelity_dephasing(fa: &ComplexMatrix, fb: &ComplexMatrix) -> Result<f64> {
    if !fa.is_square() || !fb.is_square() {
        return Err(QchanError::Shape("dephasing matrices must be square".into()));
    }
    if fa.rows() != fb.rows() {
        return Err(QchanError::DimMismatch {
            expected: fa.rows(),
            got: fb.rows(),
        });
    }
    let d = fa.rows() as f64;
    let overlap = fa.symmetric_trace_product(fb)?.re;
    let excess = |f: &ComplexMatrix| -> Result<f64> {
        let r = d * d - f.frobenius_norm().powi(2);
        if r < -RADICAND_TOL {
            return Err(QchanError::InvalidParameter {
                name: "dephasing matrix".into(),
                value: format!("‖F‖²_F = {}", d * d - r),
                bound: format!("≤ {}", d * d),
            });
        }
        Ok(clamp_nonneg(r))
    };
    let cross = excess(fa)?.sqrt() * excess(fb)?.sqrt();
    Ok(clamp_unit((overlap + cross) / (d * d)))
}

/// Qubit specialization of [`superfidelity_dephasing`]:
/// `(1 + Re(f̄ g) + √((1−|f|²)(1−|g|²))) / 2`.
pub fn superfidelity_dephasing_qubit(f: C64, g: C64) -> Result<f64> {
    for (name, v) in [("f", f), ("g", g)] {
        if v.norm() > 1.0 + PARAM_TOL {
            return Err(QchanError::InvalidParameter {
                name: name.into(),
                value: format!("{v}"),
                bound: "modulus ≤ 1".into(),
            });
        }
    }
    let cross = clamp_nonneg(1.0 - f.norm_sqr()).sqrt() * clamp_nonneg(1.0 - g.norm_sqr()).sqrt();
    Ok(clamp_unit(0.5 * (1.0 + (f.conj() * g).re + cross)))
}

/// The discrete Weyl operator `X^i Z^j` on a `d`-dimensional system, where
/// `X|c⟩ = |c+1 mod d⟩` and `Z|c⟩ = ω^c |c⟩` with `ω = e^{2πi/d}`.
pub fn weyl_operator(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let tau = std::f64::consts::TAU;
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r == (c + i) % d {
            C64::from_polar(1.0, tau * (j * c) as f64 / d as f64)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Mixed-Weyl (generalized Pauli) channel: applies `X^i Z^j` with probability
/// `probs[i·d + j]`.
pub fn pauli_channel(d: usize, probs: &[f64]) -> Result<Channel> {
    ensure_dim(d)?;
    if probs.len() != d * d {
        return Err(QchanError::DimMismatch {
            expected: d * d,
            got: probs.len(),
        });
    }
    check_distribution("Weyl probability table", probs)?;
    let mut operators = Vec::new();
    for (idx, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        let w = weyl_operator(d, idx / d, idx % d);
        operators.push(w.scale(C64::new(p.sqrt(), 0.0)));
    }
    Channel::from_kraus(operators)
}

/// Closed-form superfidelity between mixed-Weyl channels with probability
/// tables `p`, `q` (flattened `i·d + j`): the Weyl operators are an
/// orthogonal family, so the Jamiołkowski spectra are the tables themselves.
pub fn superfidelity_pauli(p: &[f64], q: &[f64]) -> Result<f64> {
    crate::metrics::superfidelity_commuting(p, q)
}

/// Closed-form fidelity between mixed-Weyl channels.
pub fn fidelity_pauli(p: &[f64], q: &[f64]) -> Result<f64> {
    crate::metrics::fidelity_commuting(p, q)
}
