//! The four interferometer experiments, (α, φ) sweeps and visibility.
//!
//! Single-qubit variants (open, closed, Wheeler) model the target alone in
//! ideal-gate mode. In pulse-sequence mode the target is carried together
//! with an unpolarized ancilla so that the J-refocusing echo acts on the
//! real two-spin system, and the ancilla is traced out before readout.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
// Test builds link std, whose inherent float methods shadow the trait.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, PointFailure, Result};
use crate::gates::{controlled_hadamard, embed, hadamard, phase_gate, y_rotation, Qubit};
use crate::linalg::{
    apply_unitary, partial_trace_ancilla, tensor_density, ComplexMatrix, DensityOperator,
};
use crate::nmr::{
    depolarize, echo_phase_shift, pfg_dephase, pseudopure_state, read_single_signal,
    read_spectrum, reconstruct_population_with_tolerance, reconstruct_target_population,
    reference_normalization, single_reference_normalization, SpectrumLines, SpinSystem,
    C3_TOL_NOISELESS, C3_TOL_NOISY,
};

/// Interferometer layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// No second beam splitter.
    Open,
    /// Second beam splitter always present.
    Closed,
    /// Second beam splitter inserted at random after the first one.
    Wheeler,
    /// Second beam splitter controlled by an ancilla in superposition.
    QuantumDelayed,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Open => "open",
            Variant::Closed => "closed",
            Variant::Wheeler => "wheeler",
            Variant::QuantumDelayed => "quantum-delayed",
        }
    }
}

/// How the phase shifter is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Exact `diag(1, e^{iφ})`.
    IdealGate,
    /// Offset precession with a J-refocusing echo.
    PulseSequence,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::IdealGate => "ideal",
            Mode::PulseSequence => "pulse",
        }
    }
}

/// `n` evenly spaced phases over `[0, 2π]`, both ends included.
pub fn phi_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..n).map(|k| TAU * k as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` evenly spaced ancilla angles over `[0, π/2]`, both ends included.
pub fn alpha_grid(n: usize) -> Vec<f64> {
    phi_grid(n).into_iter().map(|x| x / 4.0).collect()
}

pub const DEFAULT_PHI_STEPS: usize = 21;
pub const DEFAULT_ALPHA_STEPS: usize = 5;
pub const DEFAULT_SHOTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub mode: Mode,
    /// Ancilla angles; used only by the quantum delayed-choice variant.
    pub alphas: Vec<f64>,
    pub phis: Vec<f64>,
    /// Depolarizing probability applied once after the circuit.
    pub noise_p: f64,
    /// Residual purity of the initial pseudopure state.
    pub purity: f64,
    pub sys: SpinSystem,
    /// Seed for the Wheeler variant's beam-splitter switch.
    pub rng_seed: u64,
    /// Shots per phase value for the Wheeler variant.
    pub n_shots: usize,
}

impl ExperimentConfig {
    /// Defaults: 21 phases, five ancilla angles for the quantum
    /// delayed-choice variant, no noise, unit purity.
    pub fn new(variant: Variant, mode: Mode) -> Self {
        let alphas = match variant {
            Variant::QuantumDelayed => alpha_grid(DEFAULT_ALPHA_STEPS),
            _ => Vec::new(),
        };
        ExperimentConfig {
            variant,
            mode,
            alphas,
            phis: phi_grid(DEFAULT_PHI_STEPS),
            noise_p: 0.0,
            purity: 1.0,
            sys: SpinSystem::default(),
            rng_seed: 0,
            n_shots: DEFAULT_SHOTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.phis.is_empty() {
            return Err(Error::invalid("phase list is empty"));
        }
        if let Some(bad) = self.phis.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::invalid(format!("phases must be finite and non-negative, got {bad}")));
        }
        if let Some(bad) = self.alphas.iter().find(|a| !a.is_finite()) {
            return Err(Error::invalid(format!("ancilla angles must be finite, got {bad}")));
        }
        match (self.variant, self.alphas.is_empty()) {
            (Variant::QuantumDelayed, true) => {
                return Err(Error::invalid("the quantum delayed-choice variant needs ancilla angles"))
            }
            (Variant::Open | Variant::Closed | Variant::Wheeler, false) => {
                return Err(Error::invalid(format!(
                    "ancilla angles only apply to the quantum delayed-choice variant, not {}",
                    self.variant.name()
                )))
            }
            _ => {}
        }
        if !(0.0..=1.0).contains(&self.noise_p) {
            return Err(Error::invalid(format!("noise probability must lie in [0, 1], got {}", self.noise_p)));
        }
        if !(self.purity > 0.0 && self.purity <= 1.0) {
            return Err(Error::invalid(format!("purity must lie in (0, 1], got {}", self.purity)));
        }
        if self.variant == Variant::Wheeler && self.n_shots == 0 {
            return Err(Error::invalid("the Wheeler variant needs at least one shot"));
        }
        self.sys.validate()
    }

    fn c3_tolerance(&self) -> f64 {
        if self.noise_p > 0.0 {
            C3_TOL_NOISY
        } else {
            C3_TOL_NOISELESS
        }
    }
}

/// One evaluated grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    /// `None` for the single-qubit variants.
    pub alpha: Option<f64>,
    pub phi: f64,
    /// Detector D0 intensity.
    pub s0: f64,
    /// Detector D1 intensity.
    pub s1: f64,
    pub target_lines: Option<SpectrumLines>,
    pub ancilla_lines: Option<SpectrumLines>,
    /// `|00>` population reconstructed from all four lines.
    pub population_00: Option<f64>,
    /// Noiseless closed-form prediction for `s0`.
    pub theory_s0: f64,
    /// Largest elementwise deviation of the reduced target state from the
    /// predicted which-path mixture, before dephasing.
    pub reduced_state_defect: Option<f64>,
}

impl SweepPoint {
    fn single(phi: f64, s0: f64, theory_s0: f64) -> Self {
        SweepPoint {
            alpha: None,
            phi,
            s0,
            s1: 1.0 - s0,
            target_lines: None,
            ancilla_lines: None,
            population_00: None,
            theory_s0,
            reduced_state_defect: None,
        }
    }
}

/// Receives every intermediate state of a pipeline together with a stage name.
pub trait StageObserver {
    fn observe(&mut self, stage: &'static str, rho: &DensityOperator);
}

impl<F: FnMut(&'static str, &DensityOperator)> StageObserver for F {
    fn observe(&mut self, stage: &'static str, rho: &DensityOperator) {
        self(stage, rho)
    }
}

struct Ignore;

impl StageObserver for Ignore {
    fn observe(&mut self, _: &'static str, _: &DensityOperator) {}
}

/// `1/2 cos²α + cos²(φ/2) sin²α`.
pub fn theory_s0(alpha: f64, phi: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let half = (phi / 2.0).cos();
    0.5 * ca * ca + half * half * sa * sa
}

/// Noiseless D0 intensity for any variant; `alpha` is ignored except for
/// the quantum delayed-choice variant.
pub fn theory_s0_for(variant: Variant, alpha: f64, phi: f64) -> f64 {
    let wave = (phi / 2.0).cos().powi(2);
    match variant {
        Variant::Open => 0.5,
        Variant::Closed => wave,
        Variant::Wheeler => 0.5 * (0.5 + wave),
        Variant::QuantumDelayed => theory_s0(alpha, phi),
    }
}

/// Noiseless visibility for any variant (`sin²α` for quantum delayed choice).
pub fn theory_visibility(variant: Variant, alpha: f64) -> f64 {
    match variant {
        Variant::Open => 0.0,
        Variant::Closed => 1.0,
        Variant::Wheeler => 0.5,
        Variant::QuantumDelayed => alpha.sin().powi(2),
    }
}

/// Reduced target state `cos²α |ψp><ψp| + sin²α |ψw><ψw|` with
/// `|ψp> = (|0> + e^{iφ}|1>)/√2` and `|ψw> = cos(φ/2)|0> - i sin(φ/2)|1>`.
pub fn theory_reduced_state(alpha: f64, phi: f64) -> DensityOperator {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let psi_p = [Complex64::new(s, 0.0), Complex64::from_polar(s, phi)];
    let (sh, ch) = (phi / 2.0).sin_cos();
    let psi_w = [Complex64::new(ch, 0.0), Complex64::new(0.0, -sh)];
    let (sa, ca) = alpha.sin_cos();
    let particle = ComplexMatrix::outer(&psi_p, &psi_p).expect("2-vectors");
    let wave = ComplexMatrix::outer(&psi_w, &psi_w).expect("2-vectors");
    DensityOperator::from_matrix_unchecked(particle.scale_real(ca * ca) + wave.scale_real(sa * sa))
}

/// Visibility `(max - min) / (max + min)` over the sampled curve.
///
/// Intensities down to `-1e-12` are accepted as rounding noise and treated
/// as zero.
pub fn visibility(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::invalid("visibility of an empty curve"));
    }
    if let Some(&(phi, s)) = curve.iter().find(|(_, s)| !s.is_finite() || *s < -1e-12) {
        return Err(Error::invalid(format!("negative or non-finite intensity {s} at phi = {phi}")));
    }
    let (lo, hi) = curve
        .iter()
        .map(|&(_, s)| s.max(0.0))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
    if hi + lo == 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((hi - lo) / (hi + lo))
}

/// Applies the phase shifter to the target of a two-spin state.
fn shift_phase(rho: &DensityOperator, phi: f64, cfg: &ExperimentConfig) -> Result<DensityOperator> {
    match cfg.mode {
        Mode::IdealGate => apply_unitary(rho, &embed(&phase_gate(phi)?, Qubit::Target)?),
        Mode::PulseSequence => echo_phase_shift(rho, &cfg.sys, phi),
    }
}

/// Target state after the first beam splitter and the phase shifter. In
/// pulse mode the ancilla rides along, maximally mixed.
fn single_qubit_prefix(phi: f64, cfg: &ExperimentConfig, obs: &mut dyn StageObserver) -> Result<DensityOperator> {
    let start = pseudopure_state(1, cfg.purity, 0)?;
    obs.observe("prepare", &start);
    match cfg.mode {
        Mode::IdealGate => {
            let split = apply_unitary(&start, &hadamard())?;
            obs.observe("bs1", &split);
            let shifted = apply_unitary(&split, &phase_gate(phi)?)?;
            obs.observe("phase", &shifted);
            Ok(shifted)
        }
        Mode::PulseSequence => {
            let pair = tensor_density(&start, &DensityOperator::maximally_mixed(2))?;
            let split = apply_unitary(&pair, &embed(&hadamard(), Qubit::Target)?)?;
            obs.observe("bs1", &split);
            let shifted = shift_phase(&split, phi, cfg)?;
            obs.observe("phase", &shifted);
            Ok(shifted)
        }
    }
}

/// Second beam splitter on the target, for either representation.
fn second_splitter(rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() == 2 {
        apply_unitary(rho, &hadamard())
    } else {
        apply_unitary(rho, &embed(&hadamard(), Qubit::Target)?)
    }
}

/// Noise, gradient and detection for a single-qubit run; returns D0.
fn single_qubit_readout(rho: &DensityOperator, cfg: &ExperimentConfig, obs: &mut dyn StageObserver) -> Result<f64> {
    let target = if rho.dim() == 4 {
        let reduced = partial_trace_ancilla(rho)?;
        obs.observe("trace-ancilla", &reduced);
        reduced
    } else {
        *rho
    };
    let noisy = depolarize(&target, cfg.noise_p)?;
    obs.observe("noise", &noisy);
    let dephased = pfg_dephase(&noisy);
    obs.observe("gradient", &dephased);
    let c = read_single_signal(&dephased)? / single_reference_normalization(cfg.purity)?;
    Ok(0.5 + c)
}

/// Open interferometer: no second beam splitter.
pub fn run_open(phi: f64, cfg: &ExperimentConfig) -> Result<SweepPoint> {
    run_open_observed(phi, cfg, &mut Ignore)
}

pub fn run_open_observed(phi: f64, cfg: &ExperimentConfig, obs: &mut dyn StageObserver) -> Result<SweepPoint> {
    let shifted = single_qubit_prefix(phi, cfg, obs)?;
    let s0 = single_qubit_readout(&shifted, cfg, obs)?;
    Ok(SweepPoint::single(phi, s0, theory_s0_for(Variant::Open, 0.0, phi)))
}

/// Closed interferometer: second beam splitter always present.
pub fn run_closed(phi: f64, cfg: &ExperimentConfig) -> Result<SweepPoint> {
    run_closed_observed(phi, cfg, &mut Ignore)
}

pub fn run_closed_observed(phi: f64, cfg: &ExperimentConfig, obs: &mut dyn StageObserver) -> Result<SweepPoint> {
    let shifted = single_qubit_prefix(phi, cfg, obs)?;
    let recombined = second_splitter(&shifted)?;
    obs.observe("bs2", &recombined);
    let s0 = single_qubit_readout(&recombined, cfg, obs)?;
    Ok(SweepPoint::single(phi, s0, theory_s0_for(Variant::Closed, 0.0, phi)))
}

/// Wheeler's delayed choice: each shot flips a fair coin, seeded from
/// `cfg.rng_seed`, to decide on the second beam splitter after the photon
/// has passed the first one. Reports the shot-averaged ensemble D0 signal.
pub fn run_wheeler(phi: f64, cfg: &ExperimentConfig, n_shots: usize) -> Result<SweepPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    run_wheeler_with(phi, cfg, n_shots, || rng.gen_bool(0.5))
}

/// [`run_wheeler`] with an explicit switch; `insert_splitter` returning
/// `true` closes the interferometer for that shot.
pub fn run_wheeler_with(
    phi: f64,
    cfg: &ExperimentConfig,
    n_shots: usize,
    insert_splitter: impl FnMut() -> bool,
) -> Result<SweepPoint> {
    run_wheeler_observed(phi, cfg, n_shots, insert_splitter, &mut Ignore)
}

pub fn run_wheeler_observed(
    phi: f64,
    cfg: &ExperimentConfig,
    n_shots: usize,
    mut insert_splitter: impl FnMut() -> bool,
    obs: &mut dyn StageObserver,
) -> Result<SweepPoint> {
    if n_shots == 0 {
        return Err(Error::invalid("the Wheeler variant needs at least one shot"));
    }
    // The choice happens after BS1 and the phase shifter, so both branches
    // share this state.
    let shifted = single_qubit_prefix(phi, cfg, obs)?;
    let open = single_qubit_readout(&shifted, cfg, obs)?;
    let recombined = second_splitter(&shifted)?;
    obs.observe("bs2", &recombined);
    let closed = single_qubit_readout(&recombined, cfg, obs)?;

    let closed_shots = (0..n_shots).filter(|_| insert_splitter()).count();
    let open_shots = n_shots - closed_shots;
    let s0 = (closed_shots as f64 * closed + open_shots as f64 * open) / n_shots as f64;
    Ok(SweepPoint::single(phi, s0, theory_s0_for(Variant::Wheeler, 0.0, phi)))
}

/// Quantum delayed choice: the second beam splitter is a controlled
/// Hadamard whose control is an ancilla prepared by `Y_α`.
///
/// `s0` is the target-qubit D0 intensity reconstructed from the target
/// doublet; `population_00` is the `|00>` population reconstructed from all
/// four lines.
pub fn run_quantum_delayed(alpha: f64, phi: f64, cfg: &ExperimentConfig) -> Result<SweepPoint> {
    run_quantum_delayed_observed(alpha, phi, cfg, &mut Ignore)
}

pub fn run_quantum_delayed_observed(
    alpha: f64,
    phi: f64,
    cfg: &ExperimentConfig,
    obs: &mut dyn StageObserver,
) -> Result<SweepPoint> {
    let start = pseudopure_state(2, cfg.purity, 0)?;
    obs.observe("prepare", &start);
    let prepared = apply_unitary(&start, &embed(&y_rotation(alpha)?, Qubit::Ancilla)?)?;
    obs.observe("ancilla", &prepared);
    let split = apply_unitary(&prepared, &embed(&hadamard(), Qubit::Target)?)?;
    obs.observe("bs1", &split);
    let shifted = shift_phase(&split, phi, cfg)?;
    obs.observe("phase", &shifted);
    let entangled = apply_unitary(&shifted, &controlled_hadamard())?;
    obs.observe("controlled-bs2", &entangled);

    let reduced = partial_trace_ancilla(&entangled)?;
    let predicted = theory_reduced_state(alpha, phi).matrix().scale_real(cfg.purity)
        + DensityOperator::maximally_mixed(2).matrix().scale_real(1.0 - cfg.purity);
    let reduced_state_defect = reduced.matrix().max_abs_diff(&predicted);

    let noisy = depolarize(&entangled, cfg.noise_p)?;
    obs.observe("noise", &noisy);
    let dephased = pfg_dephase(&noisy);
    obs.observe("gradient", &dephased);

    let target_lines = read_spectrum(&dephased, Qubit::Target)?
        .with_normalization(reference_normalization(Qubit::Target, cfg.purity)?);
    let ancilla_lines = read_spectrum(&dephased, Qubit::Ancilla)?
        .with_normalization(reference_normalization(Qubit::Ancilla, cfg.purity)?);
    let population_00 = reconstruct_population_with_tolerance(&target_lines, &ancilla_lines, cfg.c3_tolerance())?;
    let s0 = reconstruct_target_population(&target_lines)?;

    Ok(SweepPoint {
        alpha: Some(alpha),
        phi,
        s0,
        s1: 1.0 - s0,
        target_lines: Some(target_lines),
        ancilla_lines: Some(ancilla_lines),
        population_00: Some(population_00),
        theory_s0: theory_s0(alpha, phi),
        reduced_state_defect: Some(reduced_state_defect),
    })
}

/// Full sweep result, row-major in α then φ.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub points: Vec<SweepPoint>,
    /// One entry per row: the row's α (if any) and its visibility.
    pub visibility_by_alpha: Vec<(Option<f64>, f64)>,
    pub max_abs_error_vs_theory: f64,
}

impl SweepResult {
    /// Points of row `row`, ordered by φ.
    pub fn row(&self, row: usize) -> &[SweepPoint] {
        let n = self.config.phis.len();
        &self.points[row * n..(row + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[SweepPoint]> {
        self.points.chunks(self.config.phis.len())
    }
}

/// Coordinates of the sweep grid, row-major in α then φ.
pub fn grid(cfg: &ExperimentConfig) -> Vec<(Option<f64>, f64)> {
    let alphas: Vec<Option<f64>> = if cfg.variant == Variant::QuantumDelayed {
        cfg.alphas.iter().copied().map(Some).collect()
    } else {
        alloc::vec![None]
    };
    alphas
        .into_iter()
        .flat_map(|a| cfg.phis.iter().map(move |&phi| (a, phi)))
        .collect()
}

/// Evaluates grid point `index` of [`grid`]. Pure in `(cfg, index)`: the
/// Wheeler coin stream is derived from the seed and the index.
pub fn evaluate_point(cfg: &ExperimentConfig, index: usize) -> Result<SweepPoint> {
    let n_phi = cfg.phis.len();
    let phi = cfg.phis[index % n_phi];
    match cfg.variant {
        Variant::Open => run_open(phi, cfg),
        Variant::Closed => run_closed(phi, cfg),
        Variant::Wheeler => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream(index as u64);
            run_wheeler_with(phi, cfg, cfg.n_shots, || rng.gen_bool(0.5))
        }
        Variant::QuantumDelayed => run_quantum_delayed(cfg.alphas[index / n_phi], phi, cfg),
    }
}

/// Collects per-point outcomes (in grid order) into a [`SweepResult`].
pub fn assemble(cfg: &ExperimentConfig, outcomes: Vec<Result<SweepPoint>>) -> Result<SweepResult> {
    let coords = grid(cfg);
    assert_eq!(coords.len(), outcomes.len(), "one outcome per grid point");
    let mut points = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for ((alpha, phi), outcome) in coords.into_iter().zip(outcomes) {
        match outcome {
            Ok(p) => points.push(p),
            Err(e) => failures.push(PointFailure { alpha, phi, error: Box::new(e) }),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Sweep(failures));
    }

    let mut visibility_by_alpha = Vec::new();
    for row in points.chunks(cfg.phis.len()) {
        let curve: Vec<(f64, f64)> = row.iter().map(|p| (p.phi, p.s0)).collect();
        visibility_by_alpha.push((row[0].alpha, visibility(&curve)?));
    }
    let max_abs_error_vs_theory = points
        .iter()
        .map(|p| (p.s0 - p.theory_s0).abs())
        .fold(0.0, f64::max);
    Ok(SweepResult {
        config: cfg.clone(),
        points,
        visibility_by_alpha,
        max_abs_error_vs_theory,
    })
}

/// Evaluates every grid point in order.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let outcomes = (0..grid(cfg).len()).map(|i| evaluate_point(cfg, i)).collect();
    assemble(cfg, outcomes)
}
