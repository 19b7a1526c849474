//! Single-cqubit gates acting directly on the four channels.
//!
//! Each gate has two independent realizations: a real-arithmetic channel map
//! (the form an analog circuit computes) and a 2×2 complex matrix. The
//! matrix route, [`oracle_apply`], exists to check the channel route.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use thiserror::Error;

use crate::signal::{exact_cos_sin, wrap_phase, ComplexValue};
use crate::state::{ChannelQuad, ChannelQuadWave};

/// Unitarity tolerance for [`oracle_apply`].
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("matrix is not unitary: max |U†U - I| = {0:e}")]
    NotUnitary(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Hadamard,
    PauliX,
    /// Conditional phase shift `diag(1, e^{iφ})`; φ in `[0, 2π)`.
    RPhi(f64),
}

impl GateOp {
    /// Phase gate with its angle reduced into `[0, 2π)`.
    pub fn rphi(phi: f64) -> Self {
        GateOp::RPhi(wrap_phase(phi))
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::Hadamard => f.write_str("H"),
            GateOp::PauliX => f.write_str("X"),
            GateOp::RPhi(phi) => write!(f, "RPHI({phi})"),
        }
    }
}

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateMatrix(pub [[ComplexValue; 2]; 2]);

impl GateMatrix {
    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        GateMatrix([[one, zero], [zero, one]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        GateMatrix([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = (self.adjoint() * *self).0;
        let id = GateMatrix::identity().0;
        let mut err: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                err = err.max((p[i][j] - id[i][j]).norm());
            }
        }
        err
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }
}

impl Mul for GateMatrix {
    type Output = GateMatrix;

    fn mul(self, rhs: GateMatrix) -> GateMatrix {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        GateMatrix(out)
    }
}

/// Hadamard on channels: sums and differences of the |0⟩ and |1⟩ pairs,
/// scaled by 1/√2.
pub fn hadamard_channels(q: &ChannelQuad) -> ChannelQuad {
    ChannelQuad::new(
        FRAC_1_SQRT_2 * (q.c0_re + q.c1_re),
        FRAC_1_SQRT_2 * (q.c0_im + q.c1_im),
        FRAC_1_SQRT_2 * (q.c0_re - q.c1_re),
        FRAC_1_SQRT_2 * (q.c0_im - q.c1_im),
    )
}

/// Pauli-X on channels: swap the |0⟩ and |1⟩ pairs.
pub fn x_channels(q: &ChannelQuad) -> ChannelQuad {
    ChannelQuad::new(q.c1_re, q.c1_im, q.c0_re, q.c0_im)
}

/// Conditional phase shift on channels: rotate the |1⟩ pair by `phi_gate`,
/// leave the |0⟩ pair untouched.
pub fn rphi_channels(q: &ChannelQuad, phi_gate: f64) -> ChannelQuad {
    let (c, s) = exact_cos_sin(phi_gate);
    ChannelQuad::new(q.c0_re, q.c0_im, c * q.c1_re - s * q.c1_im, c * q.c1_im + s * q.c1_re)
}

pub fn matrix_of(g: GateOp) -> GateMatrix {
    let r = |re: f64| Complex64::new(re, 0.0);
    match g {
        GateOp::Hadamard => {
            let h = FRAC_1_SQRT_2;
            GateMatrix([[r(h), r(h)], [r(h), r(-h)]])
        }
        GateOp::PauliX => GateMatrix([[r(0.0), r(1.0)], [r(1.0), r(0.0)]]),
        GateOp::RPhi(phi) => {
            let (c, s) = exact_cos_sin(phi);
            GateMatrix([[r(1.0), r(0.0)], [r(0.0), Complex64::new(c, s)]])
        }
    }
}

/// Matrix-vector product `m · (a, b)ᵀ`.
pub fn oracle_apply(
    m: &GateMatrix,
    a: ComplexValue,
    b: ComplexValue,
) -> Result<(ComplexValue, ComplexValue), GateError> {
    let err = m.unitarity_error();
    if err > UNITARY_TOL {
        return Err(GateError::NotUnitary(err));
    }
    let rows = &m.0;
    Ok((rows[0][0] * a + rows[0][1] * b, rows[1][0] * a + rows[1][1] * b))
}

pub fn apply_gate(q: &ChannelQuad, g: GateOp) -> ChannelQuad {
    match g {
        GateOp::Hadamard => hadamard_channels(q),
        GateOp::PauliX => x_channels(q),
        GateOp::RPhi(phi) => rphi_channels(q, phi),
    }
}

/// Apply `gates` in order; the first gate acts first.
pub fn apply_pipeline(q: &ChannelQuad, gates: &[GateOp]) -> ChannelQuad {
    gates.iter().fold(*q, |acc, &g| apply_gate(&acc, g))
}

/// Matrix of the whole pipeline: `M_n ⋯ M_2 M_1` for gates `[g_1, …, g_n]`.
pub fn pipeline_matrix(gates: &[GateOp]) -> GateMatrix {
    gates.iter().fold(GateMatrix::identity(), |acc, &g| matrix_of(g) * acc)
}

/// Sample-wise [`apply_pipeline`] over a wave.
pub fn apply_pipeline_wave(wave: &ChannelQuadWave, gates: &[GateOp]) -> ChannelQuadWave {
    wave.map(|q| apply_pipeline(&q, gates))
}
