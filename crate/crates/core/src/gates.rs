//! Closed-form gates: beam splitter (Hadamard), phase shifter, ancilla
//! preparation, controlled Hadamard and rf pulses.
//!
//! Two rotation conventions coexist. [`y_rotation`] is full-angle,
//! `exp(-i α σ_y)`, so that `y_rotation(α)|0> = cos α|0> + sin α|1>`.
//! [`rf_pulse`] and [`rotation`] follow NMR nomenclature and are half-angle,
//! `exp(-i θ/2 σ)`, so a "π pulse" inverts a spin.

use alloc::format;

use num_complex::Complex64;
// Test builds link std, whose inherent float methods shadow the trait.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{tensor_gates, ComplexMatrix, GateMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Rotation axis of an rf pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// Which spin a single-qubit operation addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qubit {
    /// The interfering qubit (first tensor factor).
    Target,
    /// The qubit controlling the second beam splitter (second tensor factor).
    Ancilla,
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_rows2([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    ComplexMatrix::from_rows2([[ZERO, -i], [i, ZERO]])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::invalid(format!("{name} must be finite, got {value}")));
    }
    Ok(())
}

/// 50:50 beam splitter, `(1/√2)[[1, 1], [1, -1]]`.
pub fn hadamard() -> GateMatrix {
    let s = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    GateMatrix::from_matrix_unchecked(ComplexMatrix::from_rows2([[s, s], [s, -s]]))
}

/// Phase shifter `diag(1, e^{iφ})`.
pub fn phase_gate(phi: f64) -> Result<GateMatrix> {
    check_finite("phi", phi)?;
    Ok(GateMatrix::from_matrix_unchecked(ComplexMatrix::from_rows2([
        [ONE, ZERO],
        [ZERO, Complex64::from_polar(1.0, phi)],
    ])))
}

/// Ancilla preparation `exp(-i α σ_y)` (full-angle).
pub fn y_rotation(alpha: f64) -> Result<GateMatrix> {
    check_finite("alpha", alpha)?;
    let (s, c) = alpha.sin_cos();
    Ok(GateMatrix::from_matrix_unchecked(ComplexMatrix::from_rows2([
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ])))
}

/// Hadamard on the target when the ancilla is `|1>`, identity when it is `|0>`:
/// `I ⊗ |0><0| + H ⊗ |1><1|`.
pub fn controlled_hadamard() -> GateMatrix {
    let h = hadamard();
    let mut m = ComplexMatrix::zeros(4);
    for t_row in 0..2 {
        for t_col in 0..2 {
            // ancilla |0> block: identity on the target
            if t_row == t_col {
                m[(2 * t_row, 2 * t_col)] = ONE;
            }
            // ancilla |1> block: Hadamard on the target
            m[(2 * t_row + 1, 2 * t_col + 1)] = h.matrix()[(t_row, t_col)];
        }
    }
    GateMatrix::from_matrix_unchecked(m)
}

/// Single-spin rotation `exp(-i θ/2 σ_axis)` (half-angle).
pub fn rotation(angle: f64, axis: Axis) -> Result<GateMatrix> {
    check_finite("pulse angle", angle)?;
    let (s, c) = (angle / 2.0).sin_cos();
    let sigma = match axis {
        Axis::X => sigma_x(),
        Axis::Y => sigma_y(),
    };
    let m = ComplexMatrix::identity(2).scale_real(c) + sigma.scale(Complex64::new(0.0, -s));
    Ok(GateMatrix::from_matrix_unchecked(m))
}

/// Embeds a single-qubit gate on `qubit`, identity on the other spin.
pub fn embed(gate: &GateMatrix, qubit: Qubit) -> Result<GateMatrix> {
    let id = GateMatrix::from_matrix_unchecked(ComplexMatrix::identity(2));
    match qubit {
        Qubit::Target => tensor_gates(gate, &id),
        Qubit::Ancilla => tensor_gates(&id, gate),
    }
}

/// Hard rf pulse of `angle` about `axis` applied to one spin of the pair.
pub fn rf_pulse(angle: f64, axis: Axis, qubit: Qubit) -> Result<GateMatrix> {
    embed(&rotation(angle, axis)?, qubit)
}

/// Removes the global phase: the first entry with modulus above `1e-12`
/// becomes real and positive.
pub fn canonicalize_phase(m: &ComplexMatrix) -> ComplexMatrix {
    match m.entries().iter().find(|v| v.norm() > 1e-12) {
        Some(pivot) => m.scale(pivot.conj() / pivot.norm()),
        None => *m,
    }
}

/// Whether `a = e^{iθ} b` for some θ, elementwise within `tol`.
pub fn equal_up_to_global_phase(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.dim() == b.dim() && canonicalize_phase(a).max_abs_diff(&canonicalize_phase(b)) <= tol
}

/// Ket counterpart of [`canonicalize_phase`].
pub fn canonicalize_ket_phase(psi: &[Complex64]) -> alloc::vec::Vec<Complex64> {
    match psi.iter().find(|v| v.norm() > 1e-12) {
        Some(pivot) => {
            let phase = pivot.conj() / pivot.norm();
            psi.iter().map(|v| v * phase).collect()
        }
        None => psi.to_vec(),
    }
}
