//! Measurement-circuit route to channel overlaps.
//!
//! A controlled-swap interference experiment on two copies of a
//! maximally-entangled pair, one half sent through each channel, measures
//! `P(control = 0) = (1 + tr(ρ_a ρ_b))/2` where `ρ_a, ρ_b` are the channels'
//! Jamiołkowski states. Three such stages (the cross overlap and the two
//! self-overlaps, i.e. purities) determine the superfidelity, so the quantity
//! is experimentally accessible without tomography.
//!
//! [`simulate_p0_gate_level`] builds the full register and gate unitaries and
//! is used to cross-check the closed-form [`exact_p0`];
//! [`estimate_superfidelity`] adds binomial shot noise on top of the exact
//! outcome probabilities.

use crate::channel::Channel;
use crate::error::{QchanError, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::metrics::{clamp_nonneg, clamp_unit, excess_term, DensityMatrix};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Shot budget for the three interference stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShotPlan {
    pub overlap_shots: u64,
    pub purity_a_shots: u64,
    pub purity_b_shots: u64,
}

impl ShotPlan {
    /// The same number of shots for every stage; `0` means "read out the
    /// exact probabilities".
    pub fn uniform(shots: u64) -> Self {
        ShotPlan {
            overlap_shots: shots,
            purity_a_shots: shots,
            purity_b_shots: shots,
        }
    }
}

/// Size of the register the interference circuit needs for channels of a
/// given dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegisterFootprint {
    /// The control is always a single two-level system.
    pub control_dim: usize,
    /// Two entangled pairs, two subsystems each.
    pub subsystem_count: usize,
    pub subsystem_dim: usize,
    /// Dimension of the joint register space, `2·d⁴`.
    pub total_hilbert_dim: usize,
    /// The "one control qubit plus four d-level systems" tally, `2 + 4d`.
    /// The joint space is multiplicative, so this understates simulation
    /// cost; it is reported because it is the conventional way to quote the
    /// experimental footprint.
    pub additive_tally: usize,
    /// Qubit count `1 + 4·log₂ d` when `d` is a power of two.
    pub qubits: Option<u32>,
}

/// Register footprint of the three-stage interference measurement for
/// channels on a `dim`-level system.
pub fn required_register(dim: usize) -> RegisterFootprint {
    RegisterFootprint {
        control_dim: 2,
        subsystem_count: 4,
        subsystem_dim: dim,
        total_hilbert_dim: 2 * dim.pow(4),
        additive_tally: 2 + 4 * dim,
        qubits: if dim.is_power_of_two() {
            Some(1 + 4 * dim.trailing_zeros())
        } else {
            None
        },
    }
}

fn jam_overlap(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let t = a.matrix().symmetric_trace_product(b.matrix())?;
    if t.im.abs() > 1e-10 {
        return Err(QchanError::Numerical(format!(
            "overlap has imaginary residue {}",
            t.im
        )));
    }
    Ok(t.re)
}

/// Exact control-zero probability `(1 + tr(ρ_a ρ_b))/2` of the interference
/// stage, from the closed-form trace. Both channels must be CP-TP.
pub fn exact_p0(a: &Channel, b: &Channel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QchanError::DimMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let t = jam_overlap(a.jamiolkowski()?.state(), b.jamiolkowski()?.state())?;
    Ok(clamp_unit((1.0 + t) / 2.0))
}

/// The state `(Φ ⊗ id)|ψ⁺⟩⟨ψ⁺|` prepared literally: a maximally entangled
/// pair with each Kraus operator applied to the first half.
fn entangled_pair_state(ch: &Channel) -> Result<ComplexMatrix> {
    let d = ch.dim();
    let dd = d * d;
    let amp = 1.0 / (d as f64).sqrt();
    let mut psi = vec![ZERO; dd];
    for i in 0..d {
        psi[i * d + i] = C64::new(amp, 0.0);
    }
    let id = ComplexMatrix::identity(d);
    let mut rho = ComplexMatrix::zeros(dd, dd);
    for e in ch.kraus()?.operators() {
        let v = e.kron(&id).matvec(&psi)?;
        for r in 0..dd {
            if v[r] == ZERO {
                continue;
            }
            for c in 0..dd {
                rho[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    Ok(rho)
}

/// Control-zero probability of the interference stage, obtained by building
/// the full `2·d⁴`-dimensional register, applying
/// `(H ⊗ I) · CSWAP · (H ⊗ I)` as explicit gate matrices and reading out the
/// control.
///
/// Independent of [`exact_p0`] end to end; the two agree to numerical
/// precision, which is what makes the formula trustworthy as a description of
/// the experiment.
pub fn simulate_p0_gate_level(a: &Channel, b: &Channel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QchanError::DimMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let p = a.dim() * a.dim();
    let pp = p * p;
    let ra = entangled_pair_state(a)?;
    let rb = entangled_pair_state(b)?;

    let mut control = ComplexMatrix::zeros(2, 2);
    control[(0, 0)] = ONE;
    let init = control.kron(&ra.kron(&rb));

    let h = {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = s;
        m[(0, 1)] = s;
        m[(1, 0)] = s;
        m[(1, 1)] = -s;
        m
    };
    let h_full = h.kron(&ComplexMatrix::identity(pp));

    let mut cswap = ComplexMatrix::zeros(2 * pp, 2 * pp);
    for x in 0..pp {
        cswap[(x, x)] = ONE;
    }
    for x in 0..p {
        for y in 0..p {
            cswap[(pp + y * p + x, pp + x * p + y)] = ONE;
        }
    }

    let u = h_full.matmul(&cswap)?.matmul(&h_full)?;
    let final_state = u.matmul(&init)?.matmul(&u.adjoint())?;

    let mut p0 = 0.0;
    let mut residue = 0.0_f64;
    for x in 0..pp {
        let z = final_state[(x, x)];
        p0 += z.re;
        residue = residue.max(z.im.abs());
    }
    if residue > 1e-10 {
        return Err(QchanError::Numerical(format!(
            "register diagonal has imaginary residue {residue}"
        )));
    }
    Ok(p0)
}

/// One interference stage with binomial shot noise: returns the estimate of
/// `t` and its plug-in standard error. `shots = 0` returns the exact value.
fn noisy_stage<R: Rng + ?Sized>(t_exact: f64, shots: u64, rng: &mut R) -> (f64, f64) {
    if shots == 0 {
        return (t_exact, 0.0);
    }
    let p0 = clamp_unit((1.0 + t_exact) / 2.0);
    let count = Binomial::new(shots, p0)
        .expect("probability was clamped to [0, 1]")
        .sample(rng);
    let phat = count as f64 / shots as f64;
    let est = 2.0 * phat - 1.0;
    let se = 2.0 * (phat * (1.0 - phat) / shots as f64).sqrt();
    (est, se)
}

/// Superfidelity estimated from the three-stage interference experiment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EstimateReport {
    pub superfidelity_estimate: f64,
    pub superfidelity_exact: f64,
    pub overlap_estimate: f64,
    pub overlap_exact: f64,
    pub purity_a_estimate: f64,
    pub purity_a_exact: f64,
    pub purity_b_estimate: f64,
    pub purity_b_exact: f64,
    pub overlap_stderr: f64,
    pub purity_a_stderr: f64,
    pub purity_b_stderr: f64,
    pub plan: ShotPlan,
}

impl EstimateReport {
    /// Plain-text rendering, one quantity per line.
    pub fn to_text(&self) -> String {
        format!(
            "superfidelity  estimate {:.9}  exact {:.9}\n\
             overlap        estimate {:.9}  exact {:.9}  stderr {:.3e}\n\
             purity_a       estimate {:.9}  exact {:.9}  stderr {:.3e}\n\
             purity_b       estimate {:.9}  exact {:.9}  stderr {:.3e}\n\
             shots          overlap {}  purity_a {}  purity_b {}\n",
            self.superfidelity_estimate,
            self.superfidelity_exact,
            self.overlap_estimate,
            self.overlap_exact,
            self.overlap_stderr,
            self.purity_a_estimate,
            self.purity_a_exact,
            self.purity_a_stderr,
            self.purity_b_estimate,
            self.purity_b_exact,
            self.purity_b_stderr,
            self.plan.overlap_shots,
            self.plan.purity_a_shots,
            self.plan.purity_b_shots,
        )
    }
}

/// Runs the three interference stages (overlap, purity of `a`, purity of `b`,
/// in that order on the given generator) and assembles the superfidelity
/// estimate. Purity estimates are clamped to `[0, 1]` before the square
/// roots; the final estimate is clamped to `[0, 1]`.
pub fn estimate_superfidelity<R: Rng + ?Sized>(
    a: &Channel,
    b: &Channel,
    plan: &ShotPlan,
    rng: &mut R,
) -> Result<EstimateReport> {
    if a.dim() != b.dim() {
        return Err(QchanError::DimMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let ra = a.jamiolkowski()?.state();
    let rb = b.jamiolkowski()?.state();
    let overlap_exact = jam_overlap(ra, rb)?;
    let purity_a_exact = ra.purity();
    let purity_b_exact = rb.purity();
    let superfidelity_exact = clamp_unit(
        overlap_exact
            + excess_term(
                clamp_nonneg(1.0 - purity_a_exact),
                clamp_nonneg(1.0 - purity_b_exact),
            ),
    );

    let (overlap_estimate, overlap_stderr) = noisy_stage(overlap_exact, plan.overlap_shots, rng);
    let (pa_raw, purity_a_stderr) = noisy_stage(purity_a_exact, plan.purity_a_shots, rng);
    let (pb_raw, purity_b_stderr) = noisy_stage(purity_b_exact, plan.purity_b_shots, rng);
    let purity_a_estimate = clamp_unit(pa_raw);
    let purity_b_estimate = clamp_unit(pb_raw);
    let superfidelity_estimate = clamp_unit(
        overlap_estimate
            + (1.0 - purity_a_estimate).sqrt() * (1.0 - purity_b_estimate).sqrt(),
    );

    Ok(EstimateReport {
        superfidelity_estimate,
        superfidelity_exact,
        overlap_estimate,
        overlap_exact,
        purity_a_estimate,
        purity_a_exact,
        purity_b_estimate,
        purity_b_exact,
        overlap_stderr,
        purity_a_stderr,
        purity_b_stderr,
        plan: *plan,
    })
}

/// Channel-vs-unitary fidelity estimate.
///
/// Against a unitary target the Jamiołkowski state of the target is pure, so
/// fidelity, superfidelity and the single overlap stage all coincide — one
/// interference stage suffices.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UnitaryFidelityEstimate {
    pub estimate: f64,
    pub exact: f64,
    pub stderr: f64,
    pub shots: u64,
}

/// Estimates `F(Φ, U·U†)` from the overlap interference stage alone.
pub fn estimate_fidelity_vs_unitary<R: Rng + ?Sized>(
    ch: &Channel,
    u: &ComplexMatrix,
    shots: u64,
    rng: &mut R,
) -> Result<UnitaryFidelityEstimate> {
    if !u.is_square() || u.rows() != ch.dim() {
        return Err(QchanError::DimMismatch {
            expected: ch.dim(),
            got: u.rows(),
        });
    }
    let gram_defect = u
        .adjoint()
        .matmul(u)?
        .sub(&ComplexMatrix::identity(u.rows()))?
        .frobenius_norm();
    if gram_defect > 1e-9 {
        return Err(QchanError::InvalidParameter {
            name: "u".into(),
            value: format!("‖U†U − I‖ = {gram_defect}"),
            bound: "unitary within 1e-9".into(),
        });
    }
    let target = Channel::from_kraus(vec![u.clone()])?;
    let t_exact = jam_overlap(
        ch.jamiolkowski()?.state(),
        target.jamiolkowski()?.state(),
    )?;
    let (est, stderr) = noisy_stage(t_exact, shots, rng);
    Ok(UnitaryFidelityEstimate {
        estimate: clamp_unit(est),
        exact: clamp_unit(t_exact),
        stderr,
        shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{dephasing_qubit, depolarizing};
    use crate::random::RandomSource;

    #[test]
    fn footprint_for_qubits_and_qutrits() {
        let f2 = required_register(2);
        assert_eq!(f2.total_hilbert_dim, 32);
        assert_eq!(f2.additive_tally, 10);
        assert_eq!(f2.qubits, Some(5));
        let f3 = required_register(3);
        assert_eq!(f3.total_hilbert_dim, 162);
        assert_eq!(f3.qubits, None);
    }

    #[test]
    fn identical_channels_interfere_with_unit_probability_gap() {
        let id = Channel::identity(2);
        assert!((exact_p0(&id, &id).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gate_level_simulation_matches_the_formula_for_qubit_channels() {
        let cases = [
            (Channel::identity(2), Channel::identity(2)),
            (Channel::identity(2), depolarizing(2, 0.0).unwrap()),
            (
                dephasing_qubit(C64::new(0.3, 0.4)).unwrap(),
                depolarizing(2, 0.7).unwrap(),
            ),
            (
                depolarizing(2, -0.2).unwrap(),
                dephasing_qubit(C64::new(0.0, -0.9)).unwrap(),
            ),
        ];
        for (a, b) in &cases {
            let formula = exact_p0(a, b).unwrap();
            let gates = simulate_p0_gate_level(a, b).unwrap();
            assert!(
                (formula - gates).abs() < 1e-12,
                "formula {formula} vs gates {gates}"
            );
        }
    }

    #[test]
    fn gate_level_simulation_matches_the_formula_for_qutrits() {
        let a = depolarizing(3, 0.5).unwrap();
        let b = Channel::identity(3);
        let formula = exact_p0(&a, &b).unwrap();
        let gates = simulate_p0_gate_level(&a, &b).unwrap();
        assert!((formula - gates).abs() < 1e-12);
    }

    #[test]
    fn identity_versus_fully_depolarizing_has_known_overlap() {
        let id = Channel::identity(2);
        let dep = depolarizing(2, 0.0).unwrap();
        // Pure Jamiołkowski state against the maximally mixed one: t = 1/4.
        assert!((exact_p0(&id, &dep).unwrap() - 0.625).abs() < 1e-14);
    }

    #[test]
    fn zero_shots_reproduces_exact_values() {
        let a = dephasing_qubit(C64::new(0.5, 0.1)).unwrap();
        let b = depolarizing(2, 0.4).unwrap();
        let mut rng = RandomSource::new(10).rng();
        let rep = estimate_superfidelity(&a, &b, &ShotPlan::uniform(0), &mut rng).unwrap();
        assert_eq!(rep.superfidelity_estimate, rep.superfidelity_exact);
        assert_eq!(rep.overlap_stderr, 0.0);
        let generic = crate::metrics::process_metrics(&a, &b).unwrap().superfidelity;
        assert!((rep.superfidelity_exact - generic).abs() < 1e-14);
    }

    #[test]
    fn estimator_is_seed_deterministic() {
        let a = Channel::identity(2);
        let b = depolarizing(2, 0.3).unwrap();
        let run = || {
            let mut rng = RandomSource::new(11).rng();
            estimate_superfidelity(&a, &b, &ShotPlan::uniform(1000), &mut rng).unwrap()
        };
        let (x, y) = (run(), run());
        assert_eq!(
            x.superfidelity_estimate.to_bits(),
            y.superfidelity_estimate.to_bits()
        );
    }

    #[test]
    fn estimator_converges_with_shots() {
        let a = dephasing_qubit(C64::new(0.2, 0.6)).unwrap();
        let b = depolarizing(2, 0.5).unwrap();
        let mut rng = RandomSource::new(12).rng();
        let rep = estimate_superfidelity(&a, &b, &ShotPlan::uniform(1_000_000), &mut rng).unwrap();
        assert!(
            (rep.superfidelity_estimate - rep.superfidelity_exact).abs() < 0.01,
            "estimate {} vs exact {}",
            rep.superfidelity_estimate,
            rep.superfidelity_exact
        );
        assert!(rep.overlap_stderr > 0.0 && rep.overlap_stderr < 3e-3);
    }

    #[test]
    fn pure_target_overlap_estimation_is_deterministic_at_the_fixed_point() {
        // Identity vs identity: p0 = 1, so every shot lands in the zero bin.
        let id = Channel::identity(2);
        let mut rng = RandomSource::new(13).rng();
        let rep = estimate_superfidelity(&id, &id, &ShotPlan::uniform(500), &mut rng).unwrap();
        assert_eq!(rep.superfidelity_estimate, 1.0);
        assert_eq!(rep.overlap_stderr, 0.0);
    }

    #[test]
    fn unitary_target_fidelity_matches_the_closed_form() {
        let mut rng = RandomSource::new(14).rng();
        let id = ComplexMatrix::identity(2);
        for p in [0.0, 0.4, 1.0] {
            let dep = depolarizing(2, p).unwrap();
            let est = estimate_fidelity_vs_unitary(&dep, &id, 0, &mut rng).unwrap();
            let expect = (1.0 + 3.0 * p) / 4.0;
            assert!((est.exact - expect).abs() < 1e-13, "p={p}");
            let generic = crate::metrics::process_metrics(
                &dep,
                &Channel::from_kraus(vec![id.clone()]).unwrap(),
            )
            .unwrap()
            .fidelity;
            assert!((est.exact - generic).abs() < 1e-8, "p={p}");
        }
    }

    #[test]
    fn unitary_target_estimation_rejects_non_unitaries() {
        let dep = depolarizing(2, 0.5).unwrap();
        let not_unitary = ComplexMatrix::from_real_diag(&[1.0, 0.5]);
        let mut rng = RandomSource::new(15).rng();
        assert!(matches!(
            estimate_fidelity_vs_unitary(&dep, &not_unitary, 10, &mut rng),
            Err(QchanError::InvalidParameter { .. })
        ));
        let wrong_dim = ComplexMatrix::identity(3);
        assert!(estimate_fidelity_vs_unitary(&dep, &wrong_dim, 10, &mut rng).is_err());
    }

    #[test]
    fn non_cp_channels_are_rejected_before_simulation() {
        let swap = ComplexMatrix::from_fn(4, 4, |r, c| {
            let (p, q) = (r / 2, r % 2);
            let (s, t) = (c / 2, c % 2);
            if p == t && q == s {
                ONE
            } else {
                ZERO
            }
        });
        let transpose = Channel::from_superoperator(swap).unwrap();
        let id = Channel::identity(2);
        assert!(exact_p0(&transpose, &id).is_err());
        let mut rng = RandomSource::new(16).rng();
        assert!(
            estimate_superfidelity(&transpose, &id, &ShotPlan::uniform(10), &mut rng).is_err()
        );
    }
}
