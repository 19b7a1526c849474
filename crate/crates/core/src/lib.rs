//! Classical analog emulation of a single qubit.
//!
//! A "cqubit" is a normalized two-amplitude state whose real and imaginary
//! parts ride on four real voltage channels. This crate provides:
//!
//! * [`signal`]: renormalization, analytic sinusoid carriers and their
//!   quadrature, and the amplitude that completes a real channel to unit norm.
//! * [`state`]: cqubit parameters, the four-channel decomposition,
//!   probabilities, global phase and the Bloch map.
//! * [`gate`]: Hadamard, Pauli-X and conditional phase-shift gates on the
//!   channels, with a 2×2 complex matrix oracle to check them against.
//! * [`netlist`]: ideal adder/subtractor/divider netlists realizing the same
//!   gates, resistor design and tolerance perturbation.
//! * [`dsl`]: the `.cq` program text format and its compilation to either
//!   backend.

pub mod dsl;
pub mod gate;
pub mod netlist;
pub mod signal;
pub mod state;

pub use dsl::{compile, format, parse, Backend, CompiledPipeline, NetlistOptions, ParseDiagnostic, Program};
pub use gate::{apply_gate, apply_pipeline, matrix_of, oracle_apply, GateMatrix, GateOp};
pub use netlist::{
    build_hadamard_netlist, build_rphi_netlist, build_x_netlist, design_divider, divider_ratio, perturb_resistors,
    simulate_netlist, DividerDesign, Netlist,
};
pub use signal::{ComplexValue, SampledWaveform, SignalRange, Sinusoid};
pub use state::{amplitudes, channels_at, quad_of, ChannelQuad, ChannelQuadWave, CqubitParams};
