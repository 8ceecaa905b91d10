//! Classify-then-evolve over a small Gaussian grid, through the same code
//! path as `delta-nls campaign`. Pass a TOML file to use another grid, for
//! example `examples/configs/campaign_gaussian.toml`.
//!
//! cargo run --release --example campaign [-- CONFIG]

use std::process::ExitCode;

fn main() -> ExitCode {
    let config = std::env::args().nth(1);
    let out = std::env::temp_dir().join("delta-nls-campaign");
    let mut args = vec!["delta-nls".to_string(), "--out".into(), out.display().to_string()];
    match config {
        Some(c) => args.extend(["--config".into(), c]),
        None => {
            let path = out.join("small.toml");
            std::fs::create_dir_all(&out).expect("temp dir");
            std::fs::write(
                &path,
                "[grid]\nL = 60.0\nn = 2049\n\n[evolution]\ndt = 0.004\nt_max = 50.0\nadapt = true\nsponge_width = 20.0\n\n\
                 [campaign.grid]\nkind = \"gaussian_grid\"\namplitudes = [0.4, 2.0]\nwidths = [1.0, 1.5]\n",
            )
            .expect("write config");
            args.extend(["--config".into(), path.display().to_string()]);
        }
    }
    args.push("campaign".into());
    let code = delta_nls::cli::main_with(args);
    println!("rows in {}", out.join("campaign.csv").display());
    code
}
