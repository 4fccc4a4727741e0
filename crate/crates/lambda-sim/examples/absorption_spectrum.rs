//! Time-domain spectra of the a->b coherence: integrate the master equation
//! from the probe-transition ground state, Fourier-transform rho_ab(t), and
//! locate the peaks.
//!
//! The frequency axis holds offsets nu from the a->b transition frequency,
//! mapped so the steady component lands at nu = delta_p - delta_l. Away from
//! the dressed resonance the spectrum shows that sharp two-photon line plus
//! the two Rabi sidebands at -/+ omega_l; on resonance (delta_p = -10) the
//! line coincides with a sideband and dominates by orders of magnitude.

use std::f64::consts::PI;

use lambda_sim::dynamics::{evolve_from, find_peaks, spectrum, InitialState, SpectrumOptions};
use lambda_sim::SystemParams;

// pi/64 keeps integer frequencies on DFT bins for power-of-two sample counts
const DT: f64 = PI / 64.0;
const SAMPLES: usize = 4096;

fn main() {
    for delta_p in [-20.0, -15.0, -10.0, 0.0] {
        let params = SystemParams {
            omega_p: 0.1,
            omega_l: 10.0,
            delta_p,
            ..SystemParams::default()
        };
        let t_final = DT * (SAMPLES - 1) as f64;
        let traj = evolve_from(&params, InitialState::A, t_final, 1e-9, SAMPLES)
            .expect("trajectory integrates");
        let spec = spectrum(&traj, &SpectrumOptions::default()).expect("spectrum");
        let peaks = find_peaks(&spec, 0.02);

        println!(
            "delta_p = {delta_p:+5.1}  (window {:.1}/gamma_cb, bin {:.5})",
            t_final, spec.resolution
        );
        for peak in peaks.iter().take(4) {
            println!(
                "    peak at nu = {:+9.4}   height {:10.3e}   fwhm {:.4}",
                peak.nu_center, peak.height, peak.fwhm
            );
        }
        println!();
    }

    println!("the sharp line is resolution limited: doubling the time window");
    println!("halves its measured width, so ideally it is a delta function —");
    println!("nothing broadens the field-free a->b transition in this model.");
}
