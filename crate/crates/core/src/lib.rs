//! Even/odd classification of two-bit Boolean functions on a two-spin NMR
//! register.
//!
//! A function `f: {0,1}² → {0,1}` is *even* when it outputs 1 on an even
//! number of inputs and *odd* otherwise. Classically this takes four queries.
//! Here it takes two calls to the phase oracle `U_f = diag((-1)^f(x))`,
//! sandwiched between pseudo-Hadamard pulses. Even functions leave only
//! single-quantum coherence, odd ones only double-quantum coherence, so one
//! free-induction decay distinguishes them.
//!
//! Modules:
//! - [`qmat`]: small fixed-size complex matrices.
//! - [`boolfun`]: functions, parities and the sixteen oracle matrices.
//! - [`evenodd`]: the ideal gate sequence on deviation density matrices.
//! - [`coherence`]: coherence orders, FID simulation and spectra.
//! - [`pulse`]: pulse programs for every gate, with propagator checks.
//! - [`verify`]: grouped self-checks with optional fault injection.
//! - [`cli`]: subcommand implementations behind the `evenodd` binary.

pub mod boolfun;
pub mod cli;
pub mod coherence;
pub mod error;
pub mod evenodd;
pub mod pulse;
pub mod qmat;
pub mod verify;

pub use boolfun::{catalog, parity, BoolFn2, Parity, UfCatalogEntry};
pub use coherence::{Acquisition, LineSpectrum, SpinSystemParams};
pub use error::{Error, Result};
pub use evenodd::{run_sequence, DeviationDensity, InitialState, Target};
pub use pulse::{compile_gate, Frame, Gate, PulseProgram};
