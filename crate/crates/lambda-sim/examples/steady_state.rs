//! Solve the exact steady state at a few probe detunings and print the
//! coherences and populations.
//!
//! The reference parameter set (drive 10, probe 0.37, both decay rates 1)
//! shows transparency on the probe transition at the bare two-photon
//! resonance and gain/absorption on the a->b transition at the dressed
//! resonances delta_p = -/+ omega_l.

use lambda_sim::steady::{coherence, populations, steady_state_of, CoherencePair};
use lambda_sim::SystemParams;

fn main() {
    let base = SystemParams {
        omega_p: 0.37,
        omega_l: 10.0,
        ..SystemParams::default()
    };

    println!(
        "  delta_p |        rho_ab        |        rho_ac        |  pop_a  pop_b  pop_c | residual"
    );
    println!(
        "  --------+----------------------+----------------------+----------------------+---------"
    );
    for delta_p in [-10.0, -5.0, 0.0, 5.0, 10.0] {
        let params = SystemParams { delta_p, ..base };
        let ss = steady_state_of(&params).expect("unique steady state");
        let ab = coherence(&ss.rho, CoherencePair::Ab).value;
        let ac = coherence(&ss.rho, CoherencePair::Ac).value;
        let pop = populations(&ss.rho);
        println!(
            "  {delta_p:+7.1} | {:+.6} {:+.6}i | {:+.6} {:+.6}i | {:.4} {:.4} {:.4} | {:.1e}",
            ab.re, ab.im, ac.re, ac.im, pop.a, pop.b, pop.c, ss.residual
        );
    }

    println!();
    println!("at delta_p = 0 the probe coherence vanishes (transparency) and");
    println!("rho_ab ~ -omega_p/omega_l = -0.037; at delta_p = -10/+10 the a->b");
    println!("transition shows gain (Im > 0) and absorption (Im < 0).");
}
