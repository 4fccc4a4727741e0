//! Simulator for a three-level Λ system driven by a strong coupling field and
//! probed on the adjacent leg, focused on the phase-controlled response of
//! the field-free a→b transition: gain, absorption, dispersion, and the
//! time-domain spectra of its coherence.
//!
//! Everything is expressed in units of the |c⟩→|b⟩ decay rate γ_cb (ħ = 1).
//!
//! ## Modules
//!
//! - [`model`] — parameters, Hamiltonian, Lindblad dissipator, Liouvillian.
//! - [`analytic`] — dressed states and closed-form weak-probe coherences;
//!   the oracles for the numerical solvers.
//! - [`steady`] — exact steady state by direct linear solve, coherence and
//!   population extraction.
//! - [`dynamics`] — adaptive master-equation integration and FFT spectra of
//!   the a→b coherence with peak detection.
//! - [`scan`] — parallel, deterministic sweeps over probe detuning and
//!   relative phase.
//! - [`cli`] — run configuration, figure presets, CSV/JSON serialization.
//!
//! ## Examples
//!
//! One runnable example per capability:
//!
//! ```bash
//! cargo run --release -p lambda-sim --example steady_state
//! cargo run --release -p lambda-sim --example detuning_sweep
//! cargo run --release -p lambda-sim --example phase_map
//! cargo run --release -p lambda-sim --example dressed_analysis
//! cargo run --release -p lambda-sim --example absorption_spectrum
//! cargo run --release -p lambda-sim --example strong_probe
//! ```
//!
//! The `lambda-sim` binary exposes the same capabilities as subcommands
//! (`steady`, `sweep`, `map`, `spectrum`, `dressed`, `strong-probe`,
//! `preset <id>`).

pub mod analytic;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod scan;
pub mod steady;

pub use analytic::{
    dressed_states, generalized_rabi, rho_ab_dressed, rho_ab_weak, rho_ac_dressed, rho_ac_weak,
    Branch, CoherenceValue, DressedPair,
};
pub use dynamics::{
    evolve, evolve_from, find_peaks, spectrum, InitialState, Peak, Spectrum, SpectrumOptions,
    Trajectory, WindowKind,
};
pub use error::{Error, Result};
pub use model::{
    build_hamiltonian, build_liouvillian, validate_params, ComplexMatrix3, Superoperator,
    SystemParams,
};
pub use scan::{
    default_detuning_grid, default_phase_grid, map_phase_detuning, strong_probe_suite,
    sweep_detuning, Grid1D, ScanPoint, ScanRecord, ScanTable,
};
pub use steady::{
    coherence, populations, residual, steady_state, steady_state_of, CoherencePair, Populations,
    SteadyStateResult,
};
