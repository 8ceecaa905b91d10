//! Conservation along e^{iωt}Q_{ω,γ}, and how long the discrete standing
//! wave survives its own instability.
//!
//! cargo run --release --example standing_wave

use delta_nls::diagnostics::conservation_report;
use delta_nls::evolution::{evolve, EvolutionConfig};
use delta_nls::grid::{make_grid, Params};
use delta_nls::groundstate::GroundState;

fn main() -> delta_nls::Result<()> {
    let params = Params::new(-1.0, 7.0, 1.0)?;
    let grid = make_grid(40.0, 4097)?;
    let gs = GroundState::delta(params)?;
    let q = gs.sample(grid);
    let cfg = EvolutionConfig { dt: 1e-3, t_max: 10.0, record_every: 250, keep_snapshots: true, ..EvolutionConfig::default() };
    let rec = evolve(&q, &params, &cfg)?;
    let cons = conservation_report(&rec);
    println!("{:>7} {:>12} {:>12} {:>12}", "t", "mass drift", "energy", "| |u|-Q |");
    for (k, s) in rec.samples.iter().enumerate() {
        let dev = rec.snapshots[k].values().iter().zip(q.values()).map(|(u, q)| (u.norm() - q.re).abs()).fold(0.0, f64::max);
        println!("{:>7.3} {:>12.3e} {:>12.6} {:>12.3e}", s.time, cons.mass_drift[k], s.report.energy, dev);
    }
    println!("verdict {:?}: {}", rec.verdict, rec.reason);
    Ok(())
}
