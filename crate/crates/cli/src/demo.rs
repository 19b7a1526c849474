//! The two built-in reference experiments: a Hadamard on `cos ωt|0⟩ +
//! sin ωt|1⟩`, and the π/4 phase gate on a carrier with φ = β = π/2, both at
//! 1 GHz.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use cqubit::dsl::Program;
use cqubit::gate::GateOp;
use cqubit::state::{ChannelQuad, CqubitParams};

/// 2π · 1 GHz.
pub const DEMO_OMEGA: f64 = 2.0 * PI * 1e9;

pub fn hadamard_demo_program() -> Program {
    let init = CqubitParams::new(DEMO_OMEGA, 0.0, 0.0, 0.0).expect("valid demo parameters");
    Program::new(init, vec![GateOp::Hadamard])
}

/// Expected Hadamard output at `t`.
pub fn hadamard_closed_form(t: f64) -> ChannelQuad {
    let wt = DEMO_OMEGA * t;
    ChannelQuad::new(
        FRAC_1_SQRT_2 * (wt.cos() + wt.sin()),
        0.0,
        FRAC_1_SQRT_2 * (wt.cos() - wt.sin()),
        0.0,
    )
}

pub fn rphi_demo_program() -> Program {
    let init = CqubitParams::new(DEMO_OMEGA, FRAC_PI_2, 0.0, FRAC_PI_2).expect("valid demo parameters");
    Program::new(init, vec![GateOp::RPhi(FRAC_PI_4)])
}

/// Expected phase-gate output at `t`; the |0⟩ pair is the untouched input
/// `cos(ωt + π/2)`.
pub fn rphi_closed_form(t: f64) -> ChannelQuad {
    let theta = DEMO_OMEGA * t + FRAC_PI_2;
    let s = theta.sin();
    ChannelQuad::new(theta.cos(), 0.0, -FRAC_1_SQRT_2 * s, FRAC_1_SQRT_2 * s)
}
