//! The frequency-free test E(f)M(f)^σ < E₀(Q_{1,0})M(Q_{1,0})^σ, and the
//! frequency ω₀ at which the fixed-frequency test is sharpest.
//!
//! cargo run --release --example frequency_free_criterion

use delta_nls::classifier::{classify_fixed_omega, classify_frequency_free, threshold_margin_sweep, FrequencyFreeConstants};
use delta_nls::grid::{make_grid, Params};
use delta_nls::initial_data::random_battery;

fn main() -> delta_nls::Result<()> {
    let params = Params::new(-1.0, 7.0, 1.0)?;
    let c = FrequencyFreeConstants::compute(params.p)?;
    println!("sigma = {}, E0 M^sigma = {:.15}, closed form {:.15}", c.sigma, c.energy_mass_product, c.closed_form());

    let grid = make_grid(20.0, 2049)?;
    let omegas: Vec<f64> = (0..181).map(|k| 10f64.powf(-3.0 + 0.05 * k as f64)).collect();
    for spec in random_battery(&params, 7, 6) {
        let f = spec.build(grid, &params)?;
        let ff = classify_frequency_free(&f, &params)?;
        let fixed = classify_fixed_omega(&f, &params.with_omega(ff.omega), false)?;
        let sweep = threshold_margin_sweep(&f, &params, &omegas);
        let (k, _) = sweep.iter().enumerate().fold((0, f64::MIN), |b, (k, &m)| if m > b.1 { (k, m) } else { b });
        println!(
            "{:<48} omega0 {:>9.4} (sweep peak {:>9.4})  {:?} / {:?}",
            spec.label(),
            ff.omega,
            omegas[k],
            ff.region,
            fixed.region
        );
    }
    Ok(())
}
