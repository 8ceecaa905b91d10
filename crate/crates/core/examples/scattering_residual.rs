//! For small data e^{itH}u(t) settles down: successive differences of the
//! profile shrink as the solution disperses.
//!
//! cargo run --release --example scattering_residual

use delta_nls::evolution::{evolve, scattering_residual, EvolutionConfig};
use delta_nls::grid::{make_grid, Params};
use delta_nls::initial_data::{Family, InitialDataSpec};

fn main() -> delta_nls::Result<()> {
    let params = Params::new(-1.0, 7.0, 1.0)?;
    let grid = make_grid(80.0, 4097)?;
    let f = InitialDataSpec::new(Family::Gaussian { amplitude: 0.8, width: 1.0, center: 0.0, velocity: 0.0 }).build(grid, &params)?;
    let cfg = EvolutionConfig { dt: 2e-3, t_max: 6.0, record_every: 250, keep_snapshots: true, ..EvolutionConfig::default() };
    let rec = evolve(&f, &params, &cfg)?;
    let r = scattering_residual(&rec, &params)?;
    println!("{:>7} {:>12} {:>10}", "t", "residual", "max|u|");
    for (k, v) in r.iter().enumerate() {
        let s = &rec.samples[k + 1];
        println!("{:>7.2} {v:>12.4e} {:>10.4}", s.time, s.max_abs);
    }
    Ok(())
}
