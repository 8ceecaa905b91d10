//! Regions along the ray λ Q_{ω,γ}, and why the radial threshold matters.
//!
//! cargo run --release --example classify_scaling_ray

use delta_nls::classifier::classify_fixed_omega;
use delta_nls::grid::{make_grid, Params};
use delta_nls::groundstate::GroundState;
use delta_nls::initial_data::{Family, InitialDataSpec};

fn main() -> delta_nls::Result<()> {
    let params = Params::new(-1.0, 7.0, 1.0)?;
    let grid = make_grid(20.0, 4097)?;
    let q = GroundState::delta(params)?.sample(grid);
    println!("{:>6} {:>12} {:>12} {:>14} {:>14}", "lambda", "S", "P", "radial", "non-radial");
    for k in 0..=12 {
        let lambda = 0.7 + 0.05 * k as f64;
        let f = q.scaled(lambda);
        let rad = classify_fixed_omega(&f, &params, true)?;
        let non = classify_fixed_omega(&f, &params, false)?;
        println!(
            "{lambda:>6.2} {:>12.6} {:>12.4e} {:>14} {:>14}",
            rad.value,
            rad.p_value,
            format!("{:?}", rad.region),
            format!("{:?}", non.region)
        );
    }

    // a free soliton far from the origin sits just below n_ω; two of them
    // make even data with action near 2l_ω, above r_ω, so outside the radial
    // region although each bump alone is inside
    let y = 8.0;
    let f = InitialDataSpec::new(Family::TranslatedSoliton { y, omega: 1.0, lambda: 0.99 }).build(grid, &params)?;
    let c = classify_fixed_omega(&f, &params, false)?;
    println!("\n0.99 Q_(1,0)(x - {y}): S = {:.6}, threshold {:.6}, {:?}", c.value, c.threshold_used, c.region);
    let even = InitialDataSpec::new(Family::SumOfTranslates { y, omega: 1.0, lambda: 0.99 }).build(grid, &params)?;
    let c = classify_fixed_omega(&even, &params, true)?;
    println!("two bumps at +-{y}: S = {:.6}, radial threshold {:.6}, {:?}", c.value, c.threshold_used, c.region);
    Ok(())
}
