//! NMR layer: equilibrium and pseudopure states, free precession under
//! resonance offsets and J coupling, echo-based phase shifting, gradient
//! dephasing, depolarizing noise and spectral readout of diagonal states.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
// Test builds link std, whose inherent float methods shadow the trait.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gates::{rf_pulse, rotation, sigma_x, sigma_z, Axis, Qubit};
use crate::linalg::{
    apply_unitary, expectation, tensor, ComplexMatrix, DensityOperator, GateMatrix,
};

/// Off-diagonal magnitude above which a state no longer counts as diagonal.
pub const DIAGONAL_TOL: f64 = 1e-12;
/// Allowed disagreement between the two c3 estimates without noise.
pub const C3_TOL_NOISELESS: f64 = 1e-10;
/// Allowed disagreement between the two c3 estimates with a noise channel.
pub const C3_TOL_NOISY: f64 = 0.05;

/// Target line amplitude produced by an ideal `|00>` state.
const PURE_REFERENCE: f64 = 0.5;

/// Heteronuclear two-spin system in the rotating frame. Frequencies in Hz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinSystem {
    pub offset_target: f64,
    pub offset_ancilla: f64,
    pub j_coupling: f64,
    /// Thermal polarization `γħB0/kT`.
    pub epsilon: f64,
    /// Residual purity of the pseudopure state.
    pub epsilon_prime: f64,
}

impl Default for SpinSystem {
    /// 13C-labelled chloroform: 1H target 100 Hz off resonance, 13C on
    /// resonance, J = 209 Hz.
    fn default() -> Self {
        SpinSystem {
            offset_target: 100.0,
            offset_ancilla: 0.0,
            j_coupling: 209.0,
            epsilon: 1e-5,
            epsilon_prime: 1.0,
        }
    }
}

impl SpinSystem {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.offset_target, self.offset_ancilla, self.j_coupling, self.epsilon, self.epsilon_prime]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("spin system parameters must be finite"));
        }
        if self.j_coupling <= 0.0 {
            return Err(Error::invalid(format!("J coupling must be positive, got {}", self.j_coupling)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.epsilon_prime > 0.0 && self.epsilon_prime <= 1.0) {
            return Err(Error::invalid(format!(
                "epsilon_prime must lie in (0, 1], got {}",
                self.epsilon_prime
            )));
        }
        Ok(())
    }
}

/// Boltzmann state of one spin, `diag(e^{ε/2}, e^{-ε/2}) / (2 cosh(ε/2))`.
pub fn thermal_state(epsilon: f64) -> Result<DensityOperator> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    // (1 ± tanh(ε/2)) / 2 equals e^{±ε/2} / (2 cosh(ε/2)) without cancellation.
    let w = thermal_purity(epsilon);
    Ok(DensityOperator::from_matrix_unchecked(ComplexMatrix::from_real_diagonal(&[
        0.5 * (1.0 + w),
        0.5 * (1.0 - w),
    ])))
}

/// Weight `w` in `thermal_state(ε) = (1 - w) I/2 + w |0><0|`, i.e. `tanh(ε/2)`.
pub fn thermal_purity(epsilon: f64) -> f64 {
    (epsilon / 2.0).tanh()
}

/// `(1 - purity) I/d + purity |k><k|` on `n_qubits` spins.
pub fn pseudopure_state(n_qubits: usize, purity: f64, target_ket: usize) -> Result<DensityOperator> {
    let dim = match n_qubits {
        1 => 2,
        2 => 4,
        _ => return Err(Error::invalid(format!("n_qubits must be 1 or 2, got {n_qubits}"))),
    };
    if !(purity > 0.0 && purity <= 1.0) {
        return Err(Error::invalid(format!("purity must lie in (0, 1], got {purity}")));
    }
    if target_ket >= dim {
        return Err(Error::invalid(format!("basis index {target_ket} out of range for {n_qubits} qubit(s)")));
    }
    let background = (1.0 - purity) / dim as f64;
    let mut diag = [background; 4];
    diag[target_ket] += purity;
    Ok(DensityOperator::from_matrix_unchecked(ComplexMatrix::from_real_diagonal(&diag[..dim])))
}

/// Propagator of the rotating-frame Hamiltonian
/// `H/2π = ν_t σ_z⊗I/2 + ν_a I⊗σ_z/2 + J σ_z⊗σ_z/4`, diagonal in the
/// computational basis.
pub fn free_propagator(sys: &SpinSystem, tau: f64, j_active: bool) -> Result<GateMatrix> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::invalid(format!("delay must be finite and non-negative, got {tau}")));
    }
    let j = if j_active { sys.j_coupling } else { 0.0 };
    let mut u = ComplexMatrix::zeros(4);
    for (index, (zt, za)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
        let energy = TAU * (sys.offset_target * zt / 2.0 + sys.offset_ancilla * za / 2.0 + j * zt * za / 4.0);
        u[(index, index)] = Complex64::from_polar(1.0, -energy * tau);
    }
    Ok(GateMatrix::from_matrix_unchecked(u))
}

/// Free precession for `tau` seconds, optionally with J coupling.
pub fn free_evolution(rho: &DensityOperator, sys: &SpinSystem, tau: f64, j_active: bool) -> Result<DensityOperator> {
    if rho.dim() != 4 {
        return Err(Error::invalid("free evolution acts on two-spin states"));
    }
    apply_unitary(rho, &free_propagator(sys, tau, j_active)?)
}

/// One element of a pulse sequence timeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PulseEvent {
    /// Hard pulse, half-angle convention.
    Pulse { angle: f64, axis: Axis, qubit: Qubit },
    /// Free precession in seconds.
    Delay { duration: f64, j_active: bool },
    /// Pulsed field gradient, modeled as complete loss of coherence.
    Gradient,
}

impl PulseEvent {
    pub fn apply(&self, rho: &DensityOperator, sys: &SpinSystem) -> Result<DensityOperator> {
        match *self {
            PulseEvent::Pulse { angle, axis, qubit } => apply_unitary(rho, &rf_pulse(angle, axis, qubit)?),
            PulseEvent::Delay { duration, j_active } => free_evolution(rho, sys, duration, j_active),
            PulseEvent::Gradient => Ok(pfg_dephase(rho)),
        }
    }

    /// Unitary of the event, or `None` for a gradient.
    pub fn propagator(&self, sys: &SpinSystem) -> Result<Option<GateMatrix>> {
        match *self {
            PulseEvent::Pulse { angle, axis, qubit } => rf_pulse(angle, axis, qubit).map(Some),
            PulseEvent::Delay { duration, j_active } => free_propagator(sys, duration, j_active).map(Some),
            PulseEvent::Gradient => Ok(None),
        }
    }
}

/// Runs `events` in time order.
pub fn run_sequence(rho: &DensityOperator, sys: &SpinSystem, events: &[PulseEvent]) -> Result<DensityOperator> {
    events.iter().try_fold(*rho, |state, event| event.apply(&state, sys))
}

/// Precession delay that accumulates a relative phase `phi` on the target,
/// `phi = 2π ν_t τ` (200πτ at the default 100 Hz offset).
pub fn phase_delay(sys: &SpinSystem, phi: f64) -> Result<f64> {
    if !phi.is_finite() || phi < 0.0 {
        return Err(Error::invalid(format!("phase must be finite and non-negative, got {phi}")));
    }
    let nu = sys.offset_target;
    if nu == 0.0 || !nu.is_finite() {
        return Err(Error::CannotRealize(format!(
            "a phase shift needs a nonzero target offset, got {nu} Hz"
        )));
    }
    if nu > 0.0 {
        Ok(phi / (TAU * nu))
    } else {
        // Negative offsets wind the other way; wait for the equivalent
        // phase modulo 2π instead.
        Ok(num_traits::Euclid::rem_euclid(&-phi, &TAU) / (TAU * -nu))
    }
}

/// Timeline realizing a target phase shift with J refocused:
/// `τ/2 - π_x(ancilla) - τ/2 - π_x(ancilla)`.
///
/// The second π pulse returns the ancilla to its initial state; it also
/// refocuses the ancilla offset.
pub fn echo_sequence(sys: &SpinSystem, phi: f64) -> Result<[PulseEvent; 4]> {
    let half = phase_delay(sys, phi)? / 2.0;
    let delay = PulseEvent::Delay { duration: half, j_active: true };
    let refocus = PulseEvent::Pulse { angle: PI, axis: Axis::X, qubit: Qubit::Ancilla };
    Ok([delay, refocus, delay, refocus])
}

/// Net propagator of [`echo_sequence`]; equals `phase_gate(phi) ⊗ I` up to a
/// global phase.
pub fn echo_propagator(sys: &SpinSystem, phi: f64) -> Result<GateMatrix> {
    let gates = echo_sequence(sys, phi)?
        .iter()
        .map(|e| e.propagator(sys).map(|g| g.expect("echo has no gradients")))
        .collect::<Result<Vec<_>>>()?;
    GateMatrix::sequence(&gates)
}

/// Pulse-level phase shift of the target, J coupling active throughout.
pub fn echo_phase_shift(rho: &DensityOperator, sys: &SpinSystem, phi: f64) -> Result<DensityOperator> {
    if rho.dim() != 4 {
        return Err(Error::invalid("echo phase shift acts on two-spin states"));
    }
    run_sequence(rho, sys, &echo_sequence(sys, phi)?)
}

/// Zeroes every coherence, keeping populations.
pub fn pfg_dephase(rho: &DensityOperator) -> DensityOperator {
    let diag = rho.matrix().real_diagonal();
    DensityOperator::from_matrix_unchecked(ComplexMatrix::from_real_diagonal(&diag))
}

/// `(1 - p) rho + p I/d`.
pub fn depolarize(rho: &DensityOperator, p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("depolarizing probability must lie in [0, 1], got {p}")));
    }
    let mixed = DensityOperator::maximally_mixed(rho.dim());
    Ok(DensityOperator::from_matrix_unchecked(
        rho.matrix().scale_real(1.0 - p) + mixed.matrix().scale_real(p),
    ))
}

/// Coefficients of a diagonal two-spin state,
/// `ρ = I⊗I/4 + c1 σ_z⊗I + c2 I⊗σ_z + c3 σ_z⊗σ_z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl DiagonalCoefficients {
    /// Populations of `|00>, |01>, |10>, |11>`.
    pub fn probabilities(&self) -> [f64; 4] {
        let DiagonalCoefficients { c1, c2, c3 } = *self;
        [
            0.25 + c1 + c2 + c3,
            0.25 + c1 - c2 - c3,
            0.25 - c1 + c2 - c3,
            0.25 - c1 - c2 + c3,
        ]
    }

    /// Rebuilds the diagonal density operator.
    pub fn rebuild(&self) -> Result<DensityOperator> {
        let p = self.probabilities();
        if p.iter().any(|&x| !(-1e-10..=1.0 + 1e-10).contains(&x)) {
            return Err(Error::invalid(format!("coefficients give populations outside [0, 1]: {p:?}")));
        }
        Ok(DensityOperator::from_matrix_unchecked(ComplexMatrix::from_real_diagonal(&p)))
    }
}

fn require_diagonal(rho: &DensityOperator, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::invalid(format!("expected a {dim}x{dim} state, got {0}x{0}", rho.dim())));
    }
    let off = rho.matrix().off_diagonal_norm();
    if off > DIAGONAL_TOL {
        return Err(Error::invalid(format!("state is not diagonal (largest coherence {off:e})")));
    }
    Ok(())
}

/// Solves for `(c1, c2, c3)` as `tr(P ρ)/4` with `P` each Pauli product.
pub fn extract_diag_coeffs(rho_diag: &DensityOperator) -> Result<DiagonalCoefficients> {
    require_diagonal(rho_diag, 4)?;
    let id = ComplexMatrix::identity(2);
    let z = sigma_z();
    let c = |obs: ComplexMatrix| expectation(rho_diag, &obs).map(|v| v / 4.0);
    Ok(DiagonalCoefficients {
        c1: c(tensor(&z, &id)?)?,
        c2: c(tensor(&id, &z)?)?,
        c3: c(tensor(&z, &z)?)?,
    })
}

/// Coefficient `c` of a diagonal one-spin state `I/2 + c σ_z`, read after a
/// (π/2)_y detection pulse as half the transverse magnetization.
pub fn read_single_signal(rho_diag: &DensityOperator) -> Result<f64> {
    require_diagonal(rho_diag, 2)?;
    let detected = apply_unitary(rho_diag, &rotation(FRAC_PI_2, Axis::Y)?)?;
    Ok(expectation(&detected, &sigma_x())? / 2.0)
}

/// The two lines of one spin's doublet after a detection pulse.
///
/// `line_low` is the transition with the partner spin in `|0>`. Raw
/// amplitudes are `c1 ± c3` (target) or `c2 ± c3` (ancilla).
/// `normalization` is the reference detection amplitude of the prepared
/// pseudopure state relative to an ideal `|00>`; it is 1 for a pure
/// reference and equals the residual purity otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumLines {
    pub qubit: Qubit,
    pub line_low: f64,
    pub line_high: f64,
    pub normalization: f64,
}

impl SpectrumLines {
    pub fn with_normalization(self, normalization: f64) -> Self {
        SpectrumLines { normalization, ..self }
    }

    /// Line amplitudes in units of an ideal pure-state reference.
    pub fn calibrated(&self) -> (f64, f64) {
        (self.line_low / self.normalization, self.line_high / self.normalization)
    }
}

/// Applies (π/2)_y to `qubit` and reads the transverse magnetization of that
/// spin split by the state of its partner.
pub fn read_spectrum(rho_diag: &DensityOperator, qubit: Qubit) -> Result<SpectrumLines> {
    require_diagonal(rho_diag, 4)?;
    let detected = apply_unitary(rho_diag, &rf_pulse(FRAC_PI_2, Axis::Y, qubit)?)?;
    let line = |partner: usize| -> Result<f64> {
        let proj = ComplexMatrix::basis_projector(2, partner);
        let obs = match qubit {
            Qubit::Target => tensor(&sigma_x(), &proj)?,
            Qubit::Ancilla => tensor(&proj, &sigma_x())?,
        };
        Ok(expectation(&detected, &obs)? / 2.0)
    };
    Ok(SpectrumLines {
        qubit,
        line_low: line(0)?,
        line_high: line(1)?,
        normalization: 1.0,
    })
}

/// Reference normalization for `qubit`: the detection signal of the
/// `|00>` pseudopure state at `purity`, relative to the pure state.
pub fn reference_normalization(qubit: Qubit, purity: f64) -> Result<f64> {
    let reference = read_spectrum(&pseudopure_state(2, purity, 0)?, qubit)?;
    Ok(reference.line_low / PURE_REFERENCE)
}

/// One-spin counterpart of [`reference_normalization`].
pub fn single_reference_normalization(purity: f64) -> Result<f64> {
    Ok(read_single_signal(&pseudopure_state(1, purity, 0)?)? / PURE_REFERENCE)
}

fn check_line_qubits(target: &SpectrumLines, ancilla: &SpectrumLines) -> Result<()> {
    if target.qubit != Qubit::Target || ancilla.qubit != Qubit::Ancilla {
        return Err(Error::invalid("expected target lines followed by ancilla lines"));
    }
    Ok(())
}

/// Population of `|00>` from the four lines, `1/4 + c1 + c2 + c3`, using
/// [`C3_TOL_NOISELESS`] for the c3 cross-check.
pub fn reconstruct_population(target: &SpectrumLines, ancilla: &SpectrumLines) -> Result<f64> {
    reconstruct_population_with_tolerance(target, ancilla, C3_TOL_NOISELESS)
}

pub fn reconstruct_population_with_tolerance(
    target: &SpectrumLines,
    ancilla: &SpectrumLines,
    c3_tolerance: f64,
) -> Result<f64> {
    check_line_qubits(target, ancilla)?;
    let (t_low, t_high) = target.calibrated();
    let (a_low, a_high) = ancilla.calibrated();
    let c1 = (t_low + t_high) / 2.0;
    let c2 = (a_low + a_high) / 2.0;
    let c3_target = (t_low - t_high) / 2.0;
    let c3_ancilla = (a_low - a_high) / 2.0;
    if (c3_target - c3_ancilla).abs() > c3_tolerance || c3_target.is_nan() || c3_ancilla.is_nan() {
        return Err(Error::InconsistentReadout { target_c3: c3_target, ancilla_c3: c3_ancilla });
    }
    Ok(0.25 + c1 + c2 + c3_target)
}

/// Probability of finding the target in `|0>` regardless of the ancilla,
/// `1/2 + 2 c1`, from the target doublet alone.
pub fn reconstruct_target_population(target: &SpectrumLines) -> Result<f64> {
    if target.qubit != Qubit::Target {
        return Err(Error::invalid("expected target lines"));
    }
    let (low, high) = target.calibrated();
    Ok(0.5 + low + high)
}
