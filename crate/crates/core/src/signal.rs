//! Real and complex signal primitives.
//!
//! Everything downstream works on dimensionless signals in `[-1, 1]`. Raw
//! voltages are brought into that domain with [`renormalize`], carriers are
//! modelled analytically as [`Sinusoid`]s, and the complex amplitude that
//! accompanies a real channel value is produced by [`quantum_component`].

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used for state amplitudes.
pub type ComplexValue = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("value {value} lies outside the domain [{min}, {max}]")]
    OutOfDomain { value: f64, min: f64, max: f64 },
    #[error("invalid signal range: f_max ({f_max}) must exceed f_min ({f_min})")]
    InvalidRange { f_min: f64, f_max: f64 },
    #[error("invalid sinusoid: {0}")]
    InvalidSinusoid(&'static str),
    #[error("invalid sample grid: {0}")]
    InvalidGrid(&'static str),
}

/// Reduce an angle into `[0, 2π)`.
pub fn wrap_phase(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `(cos θ, sin θ)` with exact results when `θ` is the nearest double to a
/// multiple of π/2.
///
/// `f64::cos(FRAC_PI_2)` is `6.1e-17`, not zero; snapping keeps quadrant
/// angles such as β = π/2 from leaking residue into channels that must be
/// identically zero.
pub fn exact_cos_sin(angle: f64) -> (f64, f64) {
    let quarter_turns = angle / FRAC_PI_2;
    let nearest = quarter_turns.round();
    let slack = 4.0 * f64::EPSILON * nearest.abs().max(1.0);
    if (quarter_turns - nearest).abs() <= slack {
        match nearest.rem_euclid(4.0) as u8 {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        (angle.cos(), angle.sin())
    }
}

/// Analytic carrier `amplitude · sin(ω t + φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid {
    amplitude: f64,
    omega: f64,
    varphi: f64,
}

impl Sinusoid {
    /// Build a carrier. The initial phase is reduced into `[0, 2π)`.
    pub fn new(amplitude: f64, omega: f64, varphi: f64) -> Result<Self, SignalError> {
        if !amplitude.is_finite() || !(0.0..=1.0).contains(&amplitude) {
            return Err(SignalError::InvalidSinusoid("amplitude must lie in [0, 1]"));
        }
        if !omega.is_finite() || omega < 0.0 {
            return Err(SignalError::InvalidSinusoid("omega must be finite and non-negative"));
        }
        if !varphi.is_finite() {
            return Err(SignalError::InvalidSinusoid("varphi must be finite"));
        }
        Ok(Self {
            amplitude,
            omega: omega + 0.0,
            varphi: wrap_phase(varphi),
        })
    }

    /// Unit-amplitude carrier.
    pub fn unit(omega: f64, varphi: f64) -> Result<Self, SignalError> {
        Self::new(1.0, omega, varphi)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn varphi(&self) -> f64 {
        self.varphi
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (self.omega * t + self.varphi).sin()
    }
}

/// Voltage interval a raw signal is known to occupy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalRange {
    f_min: f64,
    f_max: f64,
}

impl SignalRange {
    pub fn new(f_min: f64, f_max: f64) -> Result<Self, SignalError> {
        if !f_min.is_finite() || !f_max.is_finite() || f_max <= f_min {
            return Err(SignalError::InvalidRange { f_min, f_max });
        }
        Ok(Self { f_min, f_max })
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }
}

/// Uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
}

impl SampledWaveform {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self, SignalError> {
        if !t0.is_finite() {
            return Err(SignalError::InvalidGrid("t0 must be finite"));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(SignalError::InvalidGrid("dt must be positive"));
        }
        if values.is_empty() {
            return Err(SignalError::InvalidGrid("waveform must hold at least one sample"));
        }
        Ok(Self { t0, dt, values })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of sample `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Map a raw value from `range` onto `[-1, 1]`.
///
/// Values outside the range are rejected rather than clamped.
pub fn renormalize(s: f64, range: &SignalRange) -> Result<f64, SignalError> {
    if !(range.f_min..=range.f_max).contains(&s) {
        return Err(SignalError::OutOfDomain {
            value: s,
            min: range.f_min,
            max: range.f_max,
        });
    }
    // same as (2s − (f_max + f_min)) / (f_max − f_min), arranged so the
    // endpoints land on ∓1 exactly
    Ok(((s - range.f_min) - (range.f_max - s)) / (range.f_max - range.f_min))
}

/// Sample `s` at `t0 + k·dt` for `k = 0..n`.
pub fn sample_sinusoid(s: &Sinusoid, t0: f64, dt: f64, n: usize) -> Result<SampledWaveform, SignalError> {
    if n == 0 {
        return Err(SignalError::InvalidGrid("at least one sample is required"));
    }
    let values = (0..n).map(|k| s.eval(t0 + k as f64 * dt)).collect();
    SampledWaveform::new(t0, dt, values)
}

/// The cosine companion of a sine carrier: evaluates to
/// `amplitude · cos(ω t + φ)`.
pub fn quadrature(s: &Sinusoid) -> Sinusoid {
    Sinusoid {
        amplitude: s.amplitude,
        omega: s.omega,
        varphi: wrap_phase(s.varphi + FRAC_PI_2),
    }
}

/// Sign choice for the square-root branch of [`quantum_component`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Complex amplitude `±e^{-iφ}·√(1 − s_cl²)` paired with a real channel
/// value so that the two together have unit norm.
pub fn quantum_component(s_cl: f64, branch: Branch, phi_az: f64) -> Result<ComplexValue, SignalError> {
    if !(-1.0..=1.0).contains(&s_cl) {
        return Err(SignalError::OutOfDomain {
            value: s_cl,
            min: -1.0,
            max: 1.0,
        });
    }
    let modulus = branch.sign() * (1.0 - s_cl * s_cl).sqrt();
    let (c, s) = exact_cos_sin(phi_az);
    Ok(ComplexValue::new(modulus * c, -modulus * s))
}

/// `true` iff `| |c0|² + |c1|² − 1 | ≤ tol`.
pub fn check_normalization(c0: ComplexValue, c1: ComplexValue, tol: f64) -> bool {
    (c0.norm_sqr() + c1.norm_sqr() - 1.0).abs() <= tol
}
