//! The four-channel cqubit state.
//!
//! A cqubit `e^{iα} cos(ωt+φ)|0⟩ + e^{iβ} sin(ωt+φ)|1⟩` is carried on four
//! real signals, the real and imaginary parts of each amplitude. Gates and
//! netlists consume and produce [`ChannelQuad`] samples (one instant) or
//! [`ChannelQuadWave`]s (a uniform time grid).

use num_complex::Complex64;
use thiserror::Error;

use crate::signal::{exact_cos_sin, wrap_phase, ComplexValue, SampledWaveform, SignalError, Sinusoid};

/// Tolerance on `|norm − 1|` accepted by probability and Bloch extraction.
pub const NORMALIZATION_TOL: f64 = 1e-9;

const AMPLITUDE_TOL: f64 = 1e-12;
const PHASE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("carrier amplitude must be 1 to encode a cqubit, got {0}")]
    NotNormalizedCarrier(f64),
    #[error("state is not normalized: |norm - 1| = {0:e}")]
    NotNormalized(f64),
    #[error("global phase is undefined for the zero vector")]
    UndefinedPhase,
    #[error("invalid cqubit parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("channel waveforms do not share one time grid")]
    GridMismatch,
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Parameters `(ω, φ, α, β)` of a sinusoidal cqubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqubitParams {
    omega: f64,
    varphi: f64,
    alpha: f64,
    beta: f64,
}

impl CqubitParams {
    /// Phases are reduced into `[0, 2π)`; `omega` must be finite and
    /// non-negative.
    pub fn new(omega: f64, varphi: f64, alpha: f64, beta: f64) -> Result<Self, StateError> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(StateError::InvalidParameter("omega must be finite and non-negative"));
        }
        if ![varphi, alpha, beta].iter().all(|v| v.is_finite()) {
            return Err(StateError::InvalidParameter("phases must be finite"));
        }
        Ok(Self {
            omega: omega + 0.0,
            varphi: wrap_phase(varphi),
            alpha: wrap_phase(alpha),
            beta: wrap_phase(beta),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn varphi(&self) -> f64 {
        self.varphi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Relative phase `(β − α) mod 2π`.
    pub fn phi_az(&self) -> f64 {
        wrap_phase(self.beta - self.alpha)
    }

    /// The carrier `sin(ωt + φ)` this cqubit was built from.
    pub fn carrier(&self) -> Sinusoid {
        Sinusoid::unit(self.omega, self.varphi).expect("params already validated")
    }
}

/// Encode a unit-amplitude carrier `sin(ωt + φ)` with amplitude phases α, β.
pub fn from_classical(carrier: &Sinusoid, alpha: f64, beta: f64) -> Result<CqubitParams, StateError> {
    if (carrier.amplitude() - 1.0).abs() > AMPLITUDE_TOL {
        return Err(StateError::NotNormalizedCarrier(carrier.amplitude()));
    }
    CqubitParams::new(carrier.omega(), carrier.varphi(), alpha, beta)
}

/// Instantaneous values of the four channels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelQuad {
    pub c0_re: f64,
    pub c0_im: f64,
    pub c1_re: f64,
    pub c1_im: f64,
}

impl ChannelQuad {
    pub const fn new(c0_re: f64, c0_im: f64, c1_re: f64, c1_im: f64) -> Self {
        Self {
            c0_re,
            c0_im,
            c1_re,
            c1_im,
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.c0_re, self.c0_im, self.c1_re, self.c1_im]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Sum of squared channel values.
    pub fn norm_sqr(&self) -> f64 {
        self.c0_re * self.c0_re + self.c0_im * self.c0_im + self.c1_re * self.c1_re + self.c1_im * self.c1_im
    }

    pub fn scale(self, k: f64) -> Self {
        Self::from_array(self.to_array().map(|v| k * v))
    }

    /// Largest component-wise absolute difference.
    pub fn max_abs_diff(&self, other: &ChannelQuad) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn check_normalized(&self) -> Result<(), StateError> {
        let err = (self.norm_sqr() - 1.0).abs();
        if err <= NORMALIZATION_TOL {
            Ok(())
        } else {
            Err(StateError::NotNormalized(err))
        }
    }
}

/// Channel values of `p` at time `t`.
pub fn channels_at(p: &CqubitParams, t: f64) -> ChannelQuad {
    let theta = p.omega * t + p.varphi;
    let (cos_wt, sin_wt) = (theta.cos(), theta.sin());
    let (cos_a, sin_a) = exact_cos_sin(p.alpha);
    let (cos_b, sin_b) = exact_cos_sin(p.beta);
    ChannelQuad::new(cos_a * cos_wt, sin_a * cos_wt, cos_b * sin_wt, sin_b * sin_wt)
}

/// Pack the channels into the `|0⟩` and `|1⟩` amplitudes.
pub fn amplitudes(q: &ChannelQuad) -> (ComplexValue, ComplexValue) {
    (Complex64::new(q.c0_re, q.c0_im), Complex64::new(q.c1_re, q.c1_im))
}

/// Inverse of [`amplitudes`].
pub fn quad_of(a: ComplexValue, b: ComplexValue) -> ChannelQuad {
    ChannelQuad::new(a.re, a.im, b.re, b.im)
}

fn check_amplitudes(a: ComplexValue, b: ComplexValue) -> Result<(), StateError> {
    let err = (a.norm_sqr() + b.norm_sqr() - 1.0).abs();
    if err <= NORMALIZATION_TOL {
        Ok(())
    } else {
        Err(StateError::NotNormalized(err))
    }
}

/// Rotate both amplitudes so that `b` is real and non-negative, or `a`
/// when `b` vanishes.
pub fn remove_global_phase(a: ComplexValue, b: ComplexValue) -> Result<(ComplexValue, ComplexValue), StateError> {
    let reference = if b.norm() > PHASE_EPS {
        b
    } else if a.norm() > PHASE_EPS {
        a
    } else {
        return Err(StateError::UndefinedPhase);
    };
    check_amplitudes(a, b)?;
    let unit = reference / reference.norm();
    let rotor = unit.conj();
    let (mut a2, mut b2) = (a * rotor, b * rotor);
    // the reference amplitude is real by construction
    if b.norm() > PHASE_EPS {
        b2 = Complex64::new(b.norm(), 0.0);
    } else {
        a2 = Complex64::new(a.norm(), 0.0);
    }
    Ok((a2, b2))
}

/// Probability of the `|1⟩` outcome.
pub fn prob_one(q: &ChannelQuad) -> Result<f64, StateError> {
    q.check_normalized()?;
    Ok((q.c1_re * q.c1_re + q.c1_im * q.c1_im).clamp(0.0, 1.0))
}

/// Probability of the `|0⟩` outcome.
pub fn prob_zero(q: &ChannelQuad) -> Result<f64, StateError> {
    prob_one(q).map(|p| 1.0 - p)
}

/// Bloch-sphere coordinates `(x, y, z)`.
pub fn bloch_vector(a: ComplexValue, b: ComplexValue) -> Result<(f64, f64, f64), StateError> {
    check_amplitudes(a, b)?;
    let cross = a.conj() * b;
    Ok((2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()))
}

/// Four channel waveforms on one shared time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelQuadWave {
    channels: [SampledWaveform; 4],
}

impl ChannelQuadWave {
    pub fn new(channels: [SampledWaveform; 4]) -> Result<Self, StateError> {
        let first = &channels[0];
        let same = channels
            .iter()
            .all(|c| c.t0() == first.t0() && c.dt() == first.dt() && c.len() == first.len());
        if !same {
            return Err(StateError::GridMismatch);
        }
        Ok(Self { channels })
    }

    /// Build a wave by evaluating `f` at `t0 + k·dt`, `k = 0..n`.
    pub fn from_fn(t0: f64, dt: f64, n: usize, mut f: impl FnMut(f64) -> ChannelQuad) -> Result<Self, StateError> {
        let samples: Vec<ChannelQuad> = (0..n).map(|k| f(t0 + k as f64 * dt)).collect();
        Self::from_samples(t0, dt, &samples)
    }

    pub fn from_samples(t0: f64, dt: f64, samples: &[ChannelQuad]) -> Result<Self, StateError> {
        let column = |i: usize| -> Result<SampledWaveform, StateError> {
            let values = samples.iter().map(|q| q.to_array()[i]).collect();
            Ok(SampledWaveform::new(t0, dt, values)?)
        };
        Ok(Self {
            channels: [column(0)?, column(1)?, column(2)?, column(3)?],
        })
    }

    /// Sample the cqubit `p` on a uniform grid.
    pub fn from_params(p: &CqubitParams, t0: f64, dt: f64, n: usize) -> Result<Self, StateError> {
        Self::from_fn(t0, dt, n, |t| channels_at(p, t))
    }

    pub fn t0(&self) -> f64 {
        self.channels[0].t0()
    }

    pub fn dt(&self) -> f64 {
        self.channels[0].dt()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels[0].is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.channels[0].time(k)
    }

    /// Channels in the order `c0_re, c0_im, c1_re, c1_im`.
    pub fn channels(&self) -> &[SampledWaveform; 4] {
        &self.channels
    }

    pub fn sample(&self, k: usize) -> ChannelQuad {
        ChannelQuad::new(
            self.channels[0].values()[k],
            self.channels[1].values()[k],
            self.channels[2].values()[k],
            self.channels[3].values()[k],
        )
    }

    pub fn samples(&self) -> impl Iterator<Item = ChannelQuad> + '_ {
        (0..self.len()).map(|k| self.sample(k))
    }

    /// Apply `f` to every sample, keeping the grid.
    pub fn map(&self, f: impl Fn(ChannelQuad) -> ChannelQuad) -> Self {
        let samples: Vec<ChannelQuad> = self.samples().map(f).collect();
        Self::from_samples(self.t0(), self.dt(), &samples).expect("grid copied from a valid wave")
    }

    /// Largest deviation over all samples and channels.
    pub fn max_abs_diff(&self, other: &ChannelQuadWave) -> f64 {
        self.samples()
            .zip(other.samples())
            .map(|(a, b)| a.max_abs_diff(&b))
            .fold(0.0, f64::max)
    }

    /// Largest `|norm − 1|` over the samples.
    pub fn max_norm_error(&self) -> f64 {
        self.samples().map(|q| (q.norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
    }
}
