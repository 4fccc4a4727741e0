//! 2D map of the steady-state coherences over (probe detuning, relative
//! phase), rendered as a coarse ASCII sign map of Im rho_ab.
//!
//! Gain (`+`) on one dressed sideband is always paired with absorption (`-`)
//! on the other, and the pattern shifts with the relative phase; the probe
//! coherence rho_ac instead gains or absorbs on both sidebands together.

use std::f64::consts::PI;

use lambda_sim::scan::{map_phase_detuning, Grid1D};
use lambda_sim::SystemParams;

fn main() {
    let params = SystemParams {
        omega_p: 0.37,
        omega_l: 10.0,
        ..SystemParams::default()
    };
    let grid_dp = Grid1D::new(-20.0, 20.0, 41).expect("grid");
    let grid_phi = Grid1D::new(0.0, 2.0 * PI, 17).expect("grid");
    let table = map_phase_detuning(&params, &grid_dp, &grid_phi).expect("map runs");

    let records: Vec<_> = table.records().collect();
    let threshold = 0.05
        * records
            .iter()
            .map(|r| r.rho_ab.im.abs())
            .fold(0.0, f64::max);

    println!("Im rho_ab sign map (rows: delta_phi / pi, columns: delta_p in [-20, 20])");
    for i_phi in 0..grid_phi.points {
        let mut row = String::new();
        for i_dp in 0..grid_dp.points {
            let r = records[i_dp * grid_phi.points + i_phi];
            row.push(if r.rho_ab.im > threshold {
                '+'
            } else if r.rho_ab.im < -threshold {
                '-'
            } else {
                '.'
            });
        }
        println!("  {:>4.2} |{row}|", grid_phi.value(i_phi) / PI);
    }

    println!();
    println!(
        "map: {} points, {} failed, max residual {:.1e}",
        table.points.len(),
        table.failed_count(),
        table.max_residual()
    );
    println!("columns with strong response sit at delta_p = -/+ omega_l = -/+10;");
    println!("swapping the phase by pi flips every sign.");
}
