//! Localized virial identity I'' = 4P + R₁ + R₂ + R₃ checked against finite
//! differences of I, and the exterior-mass bound for a dispersing run.
//!
//! cargo run --release --example virial_monitor

use delta_nls::diagnostics::{exterior_mass_monitor, virial_second_difference};
use delta_nls::evolution::{evolve, EvolutionConfig};
use delta_nls::grid::{make_grid, Params};
use delta_nls::groundstate::GroundState;

fn main() -> delta_nls::Result<()> {
    let params = Params::new(-1.0, 7.0, 1.0)?;
    let grid = make_grid(40.0, 4097)?;
    let q = GroundState::delta(params)?.sample(grid);
    let cfg = EvolutionConfig { dt: 1e-3, t_max: 0.3, record_every: 10, virial_radius: Some(10.0), ..EvolutionConfig::default() };
    let rec = evolve(&q.scaled(1.05), &params, &cfg)?;
    println!("{:>7} {:>13} {:>13} {:>11} {:>11}", "t", "fd I''", "assembled", "4P", "R1");
    let fd = virial_second_difference(&rec)?;
    for (k, (t, a, b)) in fd.iter().enumerate().step_by(3) {
        let v = rec.samples[k + 1].virial.expect("recorded");
        println!("{t:>7.3} {a:>13.6} {b:>13.6} {:>11.4} {:>11.2e}", v.p_term, v.r1);
    }

    let run = evolve(&q.scaled(0.9), &params, &EvolutionConfig { t_max: 1.0, ..cfg })?;
    let m = exterior_mass_monitor(&run, 10.0, 0.1, None, 1e-3)?;
    println!(
        "\nexterior mass beyond R = {}: initial {:.3e}, window [0, {:.4}], max increase {:.3e}, holds {}",
        m.radius, m.initial_exterior_mass, m.window_end, m.max_increase, m.holds
    );
    Ok(())
}
