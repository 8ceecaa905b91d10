//! Ground-state profiles and the threshold structure l_ω = n_ω < r_ω < 2l_ω.
//!
//! cargo run --release --example ground_state_thresholds

use delta_nls::grid::{make_grid, Params};
use delta_nls::groundstate::{elliptic_residual, threshold_scaling_exponent, GroundState, Thresholds};

fn main() -> delta_nls::Result<()> {
    let p = 7.0;
    let e = threshold_scaling_exponent(p);
    let l1 = Thresholds::compute(Params::new(0.0, p, 1.0)?).l_omega;
    println!("l_1 = {l1:.15}, scaling exponent (p+3)/(2(p-1)) = {e}");
    println!("{:>6} {:>6} {:>14} {:>14} {:>8} {:>8}", "omega", "gamma", "l", "r", "r/l", "l/law");
    for &omega in &[0.25, 0.5, 1.0, 2.0, 4.0] {
        for &gamma in &[0.0, -0.5, -1.0] {
            let th = Thresholds::compute(Params::new(gamma, p, omega)?);
            let law = omega.powf(e) * l1;
            println!(
                "{omega:>6} {gamma:>6} {:>14.10} {:>14.10} {:>8.5} {:>8.5}{}",
                th.l_omega,
                th.r_omega,
                th.r_omega / th.l_omega,
                th.l_omega / law,
                if th.delta_soliton_exists { "" } else { "  (no delta soliton)" }
            );
        }
    }

    // the delta soliton solves the discrete elliptic problem to O(h)
    let params = Params::new(-1.0, p, 1.0)?;
    let gs = GroundState::delta(params)?;
    let i = gs.integrals();
    println!("\nQ_(1,-1): Q(0) = {:.10}, P = {:.2e}, I = {:.2e}", gs.value(0.0), i.virial(params), i.nehari(params));
    for n in [1025, 2049, 4097] {
        let r = elliptic_residual(&gs, make_grid(20.0, n)?, 1.0);
        println!("  h = {:.5}: node {:.3e}, away {:.3e}, jump {:.3e}", r.spacing, r.node, r.away, r.jump_defect);
    }
    Ok(())
}
