//! Dispersal below and blow-up above the delta soliton along λ Q_{ω,γ}.
//!
//! cargo run --release --example dichotomy_sweep

use delta_nls::classifier::classify_fixed_omega;
use delta_nls::evolution::{evolve, EvolutionConfig};
use delta_nls::grid::{make_grid, Params};
use delta_nls::groundstate::GroundState;

fn main() -> delta_nls::Result<()> {
    let params = Params::new(-1.0, 7.0, 1.0)?;
    let grid = make_grid(60.0, 4097)?;
    let q = GroundState::delta(params)?.sample(grid);
    let cfg = EvolutionConfig {
        dt: 2e-3,
        t_max: 50.0,
        adapt: true,
        sponge_width: 20.0,
        record_every: 10,
        ..EvolutionConfig::default()
    };
    for lambda in [0.8, 0.9, 1.1, 1.2] {
        let f = q.scaled(lambda);
        let region = classify_fixed_omega(&f, &params, true)?.region;
        let rec = evolve(&f, &params, &cfg)?;
        println!("lambda {lambda}: predicted {region:?}, observed {} at t = {:.3} ({})", rec.verdict.name(), rec.final_time(), rec.reason);
    }
    Ok(())
}
