#![no_std]
//! Two-qubit density-matrix simulation of Mach-Zehnder interferometers:
//! open, closed, Wheeler delayed-choice and quantum delayed-choice setups,
//! either with ideal gates or with an NMR pulse-level phase shifter.
//!
//! The crate needs only `alloc`. IO, the command line and parallel sweeps
//! live in the `mzsim` crate.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod experiments;
pub mod gates;
pub mod linalg;
pub mod nmr;

pub use error::{Error, PointFailure, Result};
pub use experiments::{
    run_closed, run_open, run_quantum_delayed, run_wheeler, sweep, theory_s0, visibility,
    ExperimentConfig, Mode, SweepPoint, SweepResult, Variant,
};
pub use gates::{Axis, Qubit};
pub use linalg::{ComplexMatrix, DensityOperator, GateMatrix};
pub use nmr::{DiagonalCoefficients, PulseEvent, SpectrumLines, SpinSystem};
