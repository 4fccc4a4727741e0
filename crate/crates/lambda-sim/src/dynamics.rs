//! Time integration of the master equation and spectra of the a→b coherence.
//!
//! Trajectories come from an adaptive Dormand–Prince 5(4) integrator on the
//! vectorized master equation, with its standard quartic dense-output
//! interpolant used to resample onto a uniform grid. The spectrum is the
//! discrete Fourier transform of ρ_ab(t_k), with the frequency axis mapped to
//! offsets ν from the a→b transition frequency by
//!
//! ```text
//! ν = (Δ_P − Δ_L) − ω_dft
//! ```
//!
//! so that the steady (constant in the rotating frame) component of ρ_ab
//! lands at ν = Δ_P − Δ_L.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    build_liouvillian, density_matrix_defect, maximally_mixed, projector, unvectorize, vectorize,
    ComplexMatrix3, SystemParams, VecRho, IDX_A, IDX_B, IDX_C,
};
use crate::steady::{coherence, steady_state_of, CoherencePair};

/// Window applied before the discrete Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Rectangular,
    Hann,
}

impl WindowKind {
    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Rectangular => "rectangular",
            WindowKind::Hann => "hann",
        }
    }
}

impl std::str::FromStr for WindowKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rectangular" | "rect" => Ok(WindowKind::Rectangular),
            "hann" => Ok(WindowKind::Hann),
            other => Err(format!("unknown window `{other}` (rectangular|hann)")),
        }
    }
}

/// Named initial states for trajectory runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    A,
    B,
    C,
    Mixed,
}

impl InitialState {
    pub fn density_matrix(self) -> ComplexMatrix3 {
        match self {
            InitialState::A => projector(IDX_A),
            InitialState::B => projector(IDX_B),
            InitialState::C => projector(IDX_C),
            InitialState::Mixed => maximally_mixed(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            InitialState::A => "a",
            InitialState::B => "b",
            InitialState::C => "c",
            InitialState::Mixed => "mixed",
        }
    }
}

impl std::str::FromStr for InitialState {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "a" => Ok(InitialState::A),
            "b" => Ok(InitialState::B),
            "c" => Ok(InitialState::C),
            "mixed" => Ok(InitialState::Mixed),
            other => Err(format!("unknown initial state `{other}` (a|b|c|mixed)")),
        }
    }
}

/// Uniformly sampled density-matrix trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times, k·t_final/(N−1) for k = 0..N.
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix3>,
    pub params: SystemParams,
    pub initial_state: String,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn coherence_samples(&self, pair: CoherencePair) -> Vec<C64> {
        self.states
            .iter()
            .map(|rho| coherence(rho, pair).value)
            .collect()
    }

    pub fn last_state(&self) -> &ComplexMatrix3 {
        self.states
            .last()
            .expect("trajectory has at least two samples")
    }
}

// Dormand-Prince 5(4) tableau (stage times omitted: the system is autonomous).
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense-output coefficients
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn scaled(v: &VecRho, s: f64) -> VecRho {
    v * C64::from(s)
}

/// Integrates dρ/dt = unvec(L·vec ρ) from `rho0` to `t_final` with local
/// error at most `tol` per unit time, resampled onto `samples` uniform output
/// times (endpoints included) through the dense interpolant.
pub fn evolve(
    params: &SystemParams,
    rho0: &ComplexMatrix3,
    t_final: f64,
    tol: f64,
    samples: usize,
) -> Result<Trajectory> {
    evolve_labelled(params, rho0, t_final, tol, samples, "custom")
}

/// `evolve` from one of the named initial states.
pub fn evolve_from(
    params: &SystemParams,
    initial: InitialState,
    t_final: f64,
    tol: f64,
    samples: usize,
) -> Result<Trajectory> {
    evolve_labelled(
        params,
        &initial.density_matrix(),
        t_final,
        tol,
        samples,
        initial.label(),
    )
}

fn evolve_labelled(
    params: &SystemParams,
    rho0: &ComplexMatrix3,
    t_final: f64,
    tol: f64,
    samples: usize,
    label: &str,
) -> Result<Trajectory> {
    params.validate()?;
    if !t_final.is_finite() || t_final <= 0.0 {
        return Err(Error::InvalidInput {
            what: format!("t_final must be positive, got {t_final}"),
        });
    }
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::InvalidInput {
            what: format!("tol must lie in [1e-12, 1e-4], got {tol:e}"),
        });
    }
    if samples < 2 {
        return Err(Error::InvalidInput {
            what: format!("need at least 2 samples, got {samples}"),
        });
    }
    if let Some(defect) = density_matrix_defect(rho0, 1e-9, 1e-9, 1e-9) {
        return Err(Error::InvalidInput {
            what: format!("rho0 is not a density matrix: {defect}"),
        });
    }

    let l = build_liouvillian(params);
    let f = |y: &VecRho| l * y;

    let dt_out = t_final / (samples - 1) as f64;
    let mut times = Vec::with_capacity(samples);
    let mut states = Vec::with_capacity(samples);
    times.push(0.0);
    states.push(*rho0);

    let mut t = 0.0;
    let mut y = vectorize(rho0);
    let mut k1 = f(&y);
    let mut h = dt_out.min(1e-2);
    let h_min = 1e-12 * t_final.max(1.0);
    let check_tol = 100.0 * tol;
    let mut next = 1usize;

    while next < samples {
        if h < h_min {
            return Err(Error::StepFailure { t });
        }
        if h > t_final - t {
            h = t_final - t;
        }

        let k2 = f(&(y + scaled(&k1, A21 * h)));
        let k3 = f(&(y + scaled(&k1, A31 * h) + scaled(&k2, A32 * h)));
        let k4 = f(&(y + scaled(&k1, A41 * h) + scaled(&k2, A42 * h) + scaled(&k3, A43 * h)));
        let k5 = f(&(y
            + scaled(&k1, A51 * h)
            + scaled(&k2, A52 * h)
            + scaled(&k3, A53 * h)
            + scaled(&k4, A54 * h)));
        let k6 = f(&(y
            + scaled(&k1, A61 * h)
            + scaled(&k2, A62 * h)
            + scaled(&k3, A63 * h)
            + scaled(&k4, A64 * h)
            + scaled(&k5, A65 * h)));
        let y_new = y
            + scaled(&k1, B1 * h)
            + scaled(&k3, B3 * h)
            + scaled(&k4, B4 * h)
            + scaled(&k5, B5 * h)
            + scaled(&k6, B6 * h);
        let k7 = f(&y_new);

        let err_vec = scaled(&k1, E1 * h)
            + scaled(&k3, E3 * h)
            + scaled(&k4, E4 * h)
            + scaled(&k5, E5 * h)
            + scaled(&k6, E6 * h)
            + scaled(&k7, E7 * h);
        let mut err_acc = 0.0;
        for i in 0..9 {
            let scale = 1.0 + y[i].norm().max(y_new[i].norm());
            let e = err_vec[i].norm() / scale;
            err_acc += e * e;
        }
        let err_norm = (err_acc / 9.0).sqrt();
        let target = tol * h;

        if err_norm <= target {
            // accepted; emit all pending output samples inside (t, t+h]
            let ydiff = y_new - y;
            let bspl = scaled(&k1, h) - ydiff;
            let cont4 = ydiff - scaled(&k7, h) - bspl;
            let cont5 = scaled(
                &(scaled(&k1, D1)
                    + scaled(&k3, D3)
                    + scaled(&k4, D4)
                    + scaled(&k5, D5)
                    + scaled(&k6, D6)
                    + scaled(&k7, D7)),
                h,
            );
            while next < samples {
                let ts = if next == samples - 1 {
                    t_final
                } else {
                    next as f64 * dt_out
                };
                if ts > t + h * (1.0 + 1e-12) {
                    break;
                }
                let theta = ((ts - t) / h).clamp(0.0, 1.0);
                let inner = cont4 + scaled(&cont5, 1.0 - theta);
                let mid = bspl + scaled(&inner, theta);
                let yi = y + scaled(&(ydiff + scaled(&mid, 1.0 - theta)), theta);
                let rho_s = unvectorize(&yi);
                if let Some(defect) = density_matrix_defect(&rho_s, check_tol, check_tol, check_tol)
                {
                    return Err(Error::NonPhysicalState {
                        t: ts,
                        detail: defect,
                    });
                }
                times.push(ts);
                states.push(rho_s);
                next += 1;
            }
            t += h;
            y = y_new;
            k1 = k7; // first-same-as-last
            let factor = if err_norm == 0.0 {
                5.0
            } else {
                (0.9 * (target / err_norm).powf(0.25)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            // a non-finite error estimate (overflowing stages) also lands here
            let factor = if err_norm.is_finite() {
                (0.9 * (target / err_norm).powf(0.25)).clamp(0.2, 1.0)
            } else {
                0.2
            };
            h *= factor;
        }
    }

    Ok(Trajectory {
        times,
        states,
        params: *params,
        initial_state: label.to_string(),
    })
}

/// Spectrum options; the rectangular window is the default, Hann suppresses
/// leakage at the cost of attenuating early-time transients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub window: WindowKind,
    /// Subtract the steady-state value of ρ_ab before transforming, isolating
    /// the transient peaks.
    pub steady_subtract: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            window: WindowKind::Rectangular,
            steady_subtract: false,
        }
    }
}

/// Amplitude spectrum of ρ_ab(t) on the mapped frequency axis (see module
/// docs), ascending in ν.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Frequency offsets from the a→b transition frequency (units of γ_cb).
    pub nu: Vec<f64>,
    /// Complex transform values, ordered like `nu`.
    pub values: Vec<C64>,
    /// |values|.
    pub amplitude: Vec<f64>,
    /// Frequency-bin width 2π/(N·dt).
    pub resolution: f64,
    pub window: WindowKind,
    pub steady_subtracted: bool,
}

const MIN_SPECTRUM_SAMPLES: usize = 8;

pub fn spectrum(traj: &Trajectory, options: &SpectrumOptions) -> Result<Spectrum> {
    let n = traj.len();
    if n < MIN_SPECTRUM_SAMPLES {
        return Err(Error::TooFewSamples { n });
    }
    let dt = traj.dt();
    let mut sig = traj.coherence_samples(CoherencePair::Ab);
    if options.steady_subtract {
        let ss = steady_state_of(&traj.params)?;
        let ss_ab = coherence(&ss.rho, CoherencePair::Ab).value;
        for s in &mut sig {
            *s -= ss_ab;
        }
    }
    if options.window == WindowKind::Hann {
        for (k, s) in sig.iter_mut().enumerate() {
            *s *= C64::from(0.5 * (1.0 - (2.0 * PI * k as f64 / n as f64).cos()));
        }
    }

    FftPlanner::new().plan_fft_forward(n).process(&mut sig);

    let carrier = traj.params.delta_p - traj.params.delta_l;
    let d_omega = 2.0 * PI / (n as f64 * dt);
    let mut pairs: Vec<(f64, C64)> = sig
        .into_iter()
        .enumerate()
        .map(|(m, value)| {
            let m_signed = if m < n.div_ceil(2) {
                m as f64
            } else {
                m as f64 - n as f64
            };
            (carrier - m_signed * d_omega, value)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite frequencies"));

    let nu: Vec<f64> = pairs.iter().map(|(nu, _)| *nu).collect();
    let values: Vec<C64> = pairs.iter().map(|(_, v)| *v).collect();
    let amplitude: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    Ok(Spectrum {
        nu,
        values,
        amplitude,
        resolution: d_omega,
        window: options.window,
        steady_subtracted: options.steady_subtract,
    })
}

/// A spectral peak: parabolic sub-bin center, vertex height, and a full width
/// at half maximum estimated by linear interpolation (never below one bin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub nu_center: f64,
    pub height: f64,
    pub fwhm: f64,
}

/// Local maxima of the amplitude spectrum with topographic prominence at
/// least `min_prominence`, sorted by descending height.
pub fn find_peaks(spec: &Spectrum, min_prominence: f64) -> Vec<Peak> {
    let amp = &spec.amplitude;
    let n = amp.len();
    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        if !(amp[i] > amp[i - 1] && amp[i] > amp[i + 1]) {
            continue;
        }
        if prominence(amp, i) < min_prominence {
            continue;
        }

        let (am, a0, ap) = (amp[i - 1], amp[i], amp[i + 1]);
        let denom = am - 2.0 * a0 + ap;
        let delta = if denom.abs() > 0.0 {
            (0.5 * (am - ap) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        let step = spec.nu[i + 1] - spec.nu[i];
        let nu_center = spec.nu[i] + delta * step;
        let height = a0 - 0.25 * (am - ap) * delta;
        let fwhm = fwhm_estimate(spec, i, height).max(spec.resolution);
        peaks.push(Peak {
            nu_center,
            height,
            fwhm,
        });
    }
    peaks.sort_by(|a, b| b.height.partial_cmp(&a.height).expect("finite heights"));
    peaks
}

/// Height difference between `amp[i]` and the highest valley separating it
/// from higher terrain on either side.
fn prominence(amp: &[f64], i: usize) -> f64 {
    let mut left_min = amp[i];
    let mut j = i;
    loop {
        if j == 0 {
            break;
        }
        j -= 1;
        if amp[j] > amp[i] {
            break;
        }
        left_min = left_min.min(amp[j]);
    }
    let mut right_min = amp[i];
    let mut j = i;
    loop {
        if j == amp.len() - 1 {
            break;
        }
        j += 1;
        if amp[j] > amp[i] {
            break;
        }
        right_min = right_min.min(amp[j]);
    }
    amp[i] - left_min.max(right_min)
}

fn fwhm_estimate(spec: &Spectrum, i: usize, height: f64) -> f64 {
    let amp = &spec.amplitude;
    let nu = &spec.nu;
    let half = 0.5 * height;
    let n = amp.len();

    let mut j = i;
    while j > 0 && amp[j] > half {
        j -= 1;
    }
    let left = if amp[j] > half {
        nu[j]
    } else {
        let frac = (half - amp[j]) / (amp[j + 1] - amp[j]);
        nu[j] + frac * (nu[j + 1] - nu[j])
    };

    let mut j = i;
    while j < n - 1 && amp[j] > half {
        j += 1;
    }
    let right = if amp[j] > half {
        nu[j]
    } else {
        let frac = (half - amp[j]) / (amp[j - 1] - amp[j]);
        nu[j] - frac * (nu[j] - nu[j - 1])
    };

    right - left
}
