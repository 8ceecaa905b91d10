//! The `delta-nls` command line: argument parsing, the five subcommands and
//! their file outputs.
//!
//! Exit codes: 0 for any completed run whatever its scientific verdict
//! (blow-up included), 1 when `verify` finds a failing criterion, 2 for
//! infrastructure failures (bad configuration, I/O, numerical overflow
//! without a blow-up trigger).

pub mod config;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::classifier::{
    classify_fixed_omega, classify_frequency_free, is_radial, ClassificationResult, Region,
};
use crate::diagnostics::conservation_report;
use crate::error::{Error, Result};
use crate::evolution::{evolve, TrajectoryRecord, Verdict};
use crate::functionals::scaling_derivative;
use crate::functionals::ScalingPair;
use crate::grid::GridFunction;
use crate::groundstate::{elliptic_residual, GroundState, Thresholds};
use crate::initial_data::InitialDataSpec;
use crate::verify::{run_verify, Profile};

pub use config::{CampaignConfig, CampaignGrid, ClassifyConfig, GridSpec, Overrides, RunConfig, Sweep, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "delta-nls", version, about = "Ground states, region classification and dynamics for the delta-potential NLS")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// Half-width L of the window [−L, L].
    #[arg(long = "grid-L", global = true)]
    pub grid_l: Option<f64>,
    /// Number of grid points (odd).
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            seed: self.seed,
            p: self.p,
            gamma: self.gamma,
            omega: self.omega,
            grid_l: self.grid_l,
            grid_n: self.grid_n,
            dt: self.dt,
            t_max: self.t_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// `Q_{ω,γ}` on the conservation benchmark grid.
    StandingWave,
    /// `1.1 Q_{ω,γ}` with the absorbing layer.
    Blowup,
    /// `0.9 Q_{ω,γ}` with the absorbing layer.
    Dispersing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Quick,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample Q and write thresholds and identity residuals.
    GroundState,
    /// Classify the initial data, or a λ-sweep of it.
    Classify {
        /// λ sweep as START:STOP:COUNT.
        #[arg(long)]
        sweep: Option<String>,
        /// Require and use the radial threshold.
        #[arg(long)]
        radial: bool,
    },
    /// Evolve the initial data and write the diagnostic series.
    Evolve {
        #[arg(long, value_enum)]
        preset: Option<Preset>,
    },
    /// Run the acceptance battery and write a JSON report.
    Verify {
        #[arg(long, value_enum)]
        profile: Option<ProfileArg>,
        /// Comma-separated criterion ids.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
        /// Reference-constant fixture (JSON).
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Classify then evolve every datum of a grid and cross-tabulate.
    Campaign,
}

/// What a finished command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Only `verify` sets this.
    pub failed: bool,
    pub summary: Vec<String>,
}

impl Outcome {
    fn new(files: Vec<PathBuf>, summary: Vec<String>) -> Self {
        Outcome { files, failed: false, summary }
    }
}

fn apply_preset(cfg: &mut RunConfig, preset: Preset) {
    let omega = cfg.params.omega;
    cfg.evolution.virial_radius = None;
    match preset {
        Preset::StandingWave => {
            cfg.initial = InitialDataSpec::scaled_soliton(1.0, omega);
            cfg.grid = GridSpec { half_width: 40.0, n_points: 8193 };
            cfg.evolution.dt = 1e-3;
            cfg.evolution.t_max = 10.0;
            cfg.evolution.adapt = false;
            cfg.evolution.sponge_width = 0.0;
            cfg.evolution.record_every = 10;
            cfg.evolution.virial_radius = Some(10.0);
        }
        Preset::Blowup | Preset::Dispersing => {
            let lambda = if preset == Preset::Blowup { 1.1 } else { 0.9 };
            cfg.initial = InitialDataSpec::scaled_soliton(lambda, omega);
            cfg.grid = GridSpec { half_width: 60.0, n_points: 4097 };
            cfg.evolution.dt = 2e-3;
            cfg.evolution.t_max = 50.0;
            cfg.evolution.adapt = true;
            cfg.evolution.sponge_width = 20.0;
            cfg.evolution.sponge_strength = 1.0;
            cfg.evolution.record_every = 10;
            cfg.evolution.virial_radius = Some(15.0);
        }
    }
}

/// Resolve the configuration for `cli`: defaults, then the config file,
/// then any preset, then flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Command::Evolve { preset: Some(p) } = &cli.command {
        apply_preset(&mut cfg, *p);
    }
    cfg.apply(&cli.common.overrides());
    match &cli.command {
        Command::Classify { sweep, radial } => {
            if let Some(s) = sweep {
                cfg.classify.lambda_sweep = Some(Sweep::parse(s)?);
            }
            if *radial {
                cfg.classify.radial = Some(true);
            }
        }
        Command::Verify { profile, criteria, fixture } => {
            if let Some(p) = profile {
                cfg.verify.profile = match p {
                    ProfileArg::Quick => Profile::Quick,
                    ProfileArg::Full => Profile::Full,
                };
            }
            if !criteria.is_empty() {
                cfg.verify.criteria = criteria.clone();
            }
            if fixture.is_some() {
                cfg.verify.fixture = fixture.clone();
            }
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::GroundState => cmd_ground_state(&cfg),
        Command::Classify { .. } => cmd_classify(&cfg),
        Command::Evolve { .. } => cmd_evolve(&cfg),
        Command::Verify { .. } => cmd_verify(&cfg),
        Command::Campaign => cmd_campaign(&cfg),
    }
}

/// Parse `args`, run, print the summary and map the result to an exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            for line in &out.summary {
                println!("{line}");
            }
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn region_name(r: Region) -> &'static str {
    match r {
        Region::ScatterPlus => "ScatterPlus",
        Region::BlowupMinus => "BlowupMinus",
        Region::AboveThreshold => "AboveThreshold",
    }
}

pub fn cmd_ground_state(cfg: &RunConfig) -> Result<Outcome> {
    let params = cfg.params;
    let grid = cfg.grid.build()?;
    let th = Thresholds::compute(params);
    let free = GroundState::free(params.omega, params.p);
    let delta = GroundState::delta(params).ok();
    let qf = free.sample(grid);
    let qd = delta.as_ref().map(|g| g.sample(grid));
    let rows: Vec<Vec<String>> = (0..grid.n_points())
        .map(|j| {
            vec![
                grid.x(j).to_string(),
                qf.values()[j].re.to_string(),
                qd.as_ref().map(|q| q.values()[j].re.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let csv = output::table_csv(&["x", "q_free", "q_delta"], &rows);

    let rel = |x: f64| x / th.l_omega;
    let mut summary = json!({
        "params": params,
        "grid": cfg.grid,
        "thresholds": th,
        "m_radial": th.m_omega(true),
        "m_nonradial": th.m_omega(false),
        "delta_soliton_exists": th.delta_soliton_exists,
        "flags": {
            "n_equals_l": rel(th.n_omega - th.l_omega).abs() <= 1e-8,
            "l_below_r": th.r_omega > th.l_omega,
            "r_below_2l": th.r_omega < 2.0 * th.l_omega,
            "r_equals_2l": rel(th.r_omega - 2.0 * th.l_omega).abs() <= 1e-8,
            "r_equals_l": rel(th.r_omega - th.l_omega).abs() <= 1e-8,
        },
        "free": {
            "integrals": free.integrals(),
            "action": free.action(),
        },
    });
    let mut lines = vec![format!(
        "l = {:.12}, n = {:.12}, r = {:.12}{}",
        th.l_omega,
        th.n_omega,
        th.r_omega,
        if th.delta_soliton_exists { "" } else { " (no delta soliton, r = 2l)" }
    )];
    match &delta {
        Some(gs) => {
            let i = gs.integrals();
            summary["delta"] = json!({
                "integrals": i,
                "action": i.action(params),
                "center_value": gs.value(0.0),
                "hump_radius": gs.hump_radius(),
                "identities": {
                    "virial": i.virial(params),
                    "nehari": i.nehari(params),
                },
                "discrete_residual": elliptic_residual(gs, grid, 1.0),
            });
        }
        None => {
            summary["delta"] = serde_json::Value::Null;
            summary["note"] = json!(format!(
                "no delta soliton: omega = {} <= gamma^2/2 = {}",
                params.omega,
                0.5 * params.gamma * params.gamma
            ));
            lines.push("no delta soliton for these parameters".into());
        }
    }
    let files = vec![
        output::write(&cfg.out, "ground_state.csv", &csv)?,
        output::write(&cfg.out, "ground_state.json", &output::json(&summary)?)?,
    ];
    Ok(Outcome::new(files, lines))
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub label: String,
    pub even: bool,
    pub fixed: ClassificationResult,
    pub radial: Option<ClassificationResult>,
    pub frequency_free: Option<ClassificationResult>,
    /// Fixed-frequency verdict at the frequency-free optimal `ω₀`.
    pub fixed_at_omega0: Option<ClassificationResult>,
    /// `∂_λ S_ω` along the virial scaling at `λ = 0`, a finite-difference
    /// check on `P(f)`.
    pub virial_scaling_derivative: f64,
}

fn classify_datum(f: &GridFunction, label: String, cfg: &RunConfig) -> Result<Classification> {
    let params = cfg.params;
    let even = is_radial(f);
    let want_radial = cfg.classify.radial.unwrap_or(even);
    let radial = if want_radial { Some(classify_fixed_omega(f, &params, true)?) } else { None };
    let fixed = classify_fixed_omega(f, &params, false)?;
    let (ff, at0) = if f.is_zero() {
        (None, None)
    } else {
        let ff = classify_frequency_free(f, &params)?;
        let at = classify_fixed_omega(f, &params.with_omega(ff.omega), false)?;
        (Some(ff), Some(at))
    };
    Ok(Classification {
        label,
        even,
        fixed,
        radial,
        frequency_free: ff,
        fixed_at_omega0: at0,
        virial_scaling_derivative: scaling_derivative(f, &params, &ScalingPair::virial()),
    })
}

impl Classification {
    /// Radial verdict when available, non-radial otherwise.
    pub fn primary(&self) -> &ClassificationResult {
        self.radial.as_ref().unwrap_or(&self.fixed)
    }
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid.build()?;
    let f = cfg.initial.build(grid, &cfg.params)?;
    let label = cfg.initial.label();
    let Some(sweep) = cfg.classify.lambda_sweep else {
        let c = classify_datum(&f, label, cfg)?;
        let line = format!("{}: {}", c.label, region_name(c.primary().region));
        let path = output::write(&cfg.out, "classification.json", &output::json(&json!({
            "params": cfg.params,
            "classification": c,
        }))?)?;
        return Ok(Outcome::new(vec![path], vec![line]));
    };
    let lambdas = sweep.values();
    let results: Vec<Classification> = lambdas
        .par_iter()
        .map(|&l| classify_datum(&f.scaled(l), format!("{l}*{label}"), cfg))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut flips = Vec::new();
    let mut ff_agree = 0usize;
    let mut ff_total = 0usize;
    for (k, (l, c)) in lambdas.iter().zip(&results).enumerate() {
        let p = c.primary();
        let ff = c.frequency_free.as_ref().map(|r| region_name(r.region)).unwrap_or("");
        let at0 = c.fixed_at_omega0.as_ref().map(|r| region_name(r.region)).unwrap_or("");
        if !ff.is_empty() {
            ff_total += 1;
            if ff == at0 {
                ff_agree += 1;
            }
        }
        rows.push(vec![
            l.to_string(),
            p.value.to_string(),
            p.margin.to_string(),
            p.p_value.to_string(),
            p.i_value.to_string(),
            region_name(c.fixed.region).to_string(),
            c.radial.as_ref().map(|r| region_name(r.region).to_string()).unwrap_or_default(),
            ff.to_string(),
            c.frequency_free.as_ref().map(|r| r.omega.to_string()).unwrap_or_default(),
            at0.to_string(),
        ]);
        if k > 0 && results[k - 1].primary().region != p.region {
            flips.push(json!({
                "between": [lambdas[k - 1], *l],
                "from": region_name(results[k - 1].primary().region),
                "to": region_name(p.region),
            }));
        }
    }
    let csv = output::table_csv(
        &[
            "lambda",
            "action",
            "margin",
            "virial_P",
            "nehari_I",
            "region_nonradial",
            "region_radial",
            "region_frequency_free",
            "omega0",
            "region_at_omega0",
        ],
        &rows,
    );
    let summary = json!({
        "params": cfg.params,
        "datum": label,
        "sweep": sweep,
        "radial": results.first().map(|c| c.radial.is_some()).unwrap_or(false),
        "flips": flips,
        "frequency_free_agreement": { "agree": ff_agree, "total": ff_total },
    });
    let lines = vec![format!(
        "{} values, {} verdict flip(s), frequency-free agrees with fixed-omega0 on {ff_agree}/{ff_total}",
        lambdas.len(),
        flips.len()
    )];
    let files = vec![
        output::write(&cfg.out, "classify_sweep.csv", &csv)?,
        output::write(&cfg.out, "classify_sweep.json", &output::json(&summary)?)?,
    ];
    Ok(Outcome::new(files, lines))
}

fn trajectory_summary(rec: &TrajectoryRecord, label: &str, predicted: &Classification) -> serde_json::Value {
    let cons = conservation_report(rec);
    json!({
        "datum": label,
        "params": rec.params,
        "grid": { "half_width": rec.grid.half_width(), "n_points": rec.grid.n_points() },
        "config": rec.config,
        "predicted_region": region_name(predicted.primary().region),
        "verdict": rec.verdict,
        "reason": rec.reason,
        "final_time": rec.final_time(),
        "total_steps": rec.total_steps,
        "samples": rec.samples.len(),
        "initial_gradient_norm": rec.initial_gradient_norm,
        "initial_max_abs": rec.initial_max_abs,
        "terminal_drift": rec.terminal,
        "max_relative_mass_drift": cons.max_mass_drift,
        "max_energy_drift": cons.max_energy_drift,
        "conservative": cons.conservative,
    })
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid.build()?;
    let u0 = cfg.initial.build(grid, &cfg.params)?;
    let label = cfg.initial.label();
    let predicted = classify_datum(&u0, label.clone(), cfg)?;
    match evolve(&u0, &cfg.params, &cfg.evolution) {
        Ok(rec) => {
            let summary = trajectory_summary(&rec, &label, &predicted);
            let files = vec![
                output::write(&cfg.out, "series.csv", &output::series_csv(&rec))?,
                output::write(&cfg.out, "evolve.json", &output::json(&summary)?)?,
            ];
            let line = format!("{label}: {} ({})", rec.verdict.name(), rec.reason);
            Ok(Outcome::new(files, vec![line]))
        }
        Err(Error::NumericalOverflow { time, step, partial }) => {
            // flush what was recorded, then report the failure
            let mut summary = trajectory_summary(&partial, &label, &predicted);
            summary["error"] = json!(format!("numerical overflow at t = {time} (step {step})"));
            output::write(&cfg.out, "series.csv", &output::series_csv(&partial))?;
            output::write(&cfg.out, "evolve.json", &output::json(&summary)?)?;
            Err(Error::NumericalOverflow { time, step, partial })
        }
        Err(e) => Err(e),
    }
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let opts = cfg.verify_options()?;
    let report = run_verify(&opts)?;
    let path = output::write(&cfg.out, "verify.json", &report.to_json()?)?;
    let mut lines: Vec<String> = report.criteria.iter().map(|c| c.summary_line()).collect();
    lines.push(format!("overall: {}", if report.passed { "PASS" } else { "FAIL" }));
    Ok(Outcome { files: vec![path], failed: !report.passed, summary: lines })
}

/// One campaign datum.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignRow {
    pub key: String,
    pub region: Option<String>,
    pub verdict: Option<String>,
    pub final_time: Option<f64>,
    /// `None` above threshold or on error.
    pub agreement: Option<bool>,
    pub error: Option<String>,
}

fn agrees(region: Region, verdict: &Verdict) -> Option<bool> {
    match region {
        Region::ScatterPlus => Some(*verdict == Verdict::Dispersed),
        Region::BlowupMinus => Some(matches!(verdict, Verdict::BlewUp { .. } | Verdict::NormGrowth)),
        Region::AboveThreshold => None,
    }
}

fn campaign_row(spec: &InitialDataSpec, cfg: &RunConfig) -> CampaignRow {
    let key = spec.label();
    let run = || -> Result<(Region, TrajectoryRecord)> {
        spec.validate(&cfg.params)?;
        let grid = cfg.grid.build()?;
        let u0 = spec.build(grid, &cfg.params)?;
        let region = classify_datum(&u0, key.clone(), cfg)?.primary().region;
        let rec = evolve(&u0, &cfg.params, &cfg.evolution)?;
        Ok((region, rec))
    };
    match run() {
        Ok((region, rec)) => CampaignRow {
            key,
            region: Some(region_name(region).into()),
            verdict: Some(rec.verdict.name().into()),
            final_time: Some(rec.final_time()),
            agreement: agrees(region, &rec.verdict),
            error: None,
        },
        Err(e) => CampaignRow { key, region: None, verdict: None, final_time: None, agreement: None, error: Some(e.to_string()) },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignSummary {
    pub rows: usize,
    pub errors: usize,
    pub below_threshold: usize,
    pub agreements: usize,
    pub agreement_rate: Option<f64>,
    /// ScatterPlus data that blew up; must be zero.
    pub scatter_predicted_blowups: usize,
    /// Verdicts of below-threshold disagreements.
    pub disagreement_verdicts: BTreeMap<String, usize>,
    /// `confusion[region][verdict]`.
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
}

pub fn summarize_campaign(rows: &[CampaignRow]) -> CampaignSummary {
    let mut s = CampaignSummary {
        rows: rows.len(),
        errors: 0,
        below_threshold: 0,
        agreements: 0,
        agreement_rate: None,
        scatter_predicted_blowups: 0,
        disagreement_verdicts: BTreeMap::new(),
        confusion: BTreeMap::new(),
    };
    for r in rows {
        let (Some(region), Some(verdict)) = (&r.region, &r.verdict) else {
            s.errors += 1;
            continue;
        };
        *s.confusion.entry(region.clone()).or_default().entry(verdict.clone()).or_default() += 1;
        if let Some(a) = r.agreement {
            s.below_threshold += 1;
            if a {
                s.agreements += 1;
            } else {
                *s.disagreement_verdicts.entry(verdict.clone()).or_default() += 1;
            }
        }
        if region == "ScatterPlus" && verdict == "BlewUp" {
            s.scatter_predicted_blowups += 1;
        }
    }
    if s.below_threshold > 0 {
        s.agreement_rate = Some(s.agreements as f64 / s.below_threshold as f64);
    }
    s
}

pub fn cmd_campaign(cfg: &RunConfig) -> Result<Outcome> {
    let specs = cfg.campaign.grid.specs();
    if specs.is_empty() {
        return Err(Error::config("campaign grid is empty"));
    }
    let mut rows: Vec<CampaignRow> = specs.par_iter().map(|s| campaign_row(s, cfg)).collect();
    rows.sort_by(|a, b| a.key.cmp(&b.key));
    let summary = summarize_campaign(&rows);
    let opt = |v: &Option<String>| v.clone().unwrap_or_default();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                format!("\"{}\"", r.key),
                opt(&r.region),
                opt(&r.verdict),
                r.final_time.map(|t| t.to_string()).unwrap_or_default(),
                r.agreement.map(|a| a.to_string()).unwrap_or_default(),
                r.error.as_ref().map(|e| format!("\"{}\"", e.replace('"', "'"))).unwrap_or_default(),
            ]
        })
        .collect();
    let csv = output::table_csv(&["key", "region", "verdict", "final_time", "agreement", "error"], &table);
    let json = output::json(&json!({
        "params": cfg.params,
        "grid": cfg.grid,
        "evolution": cfg.evolution,
        "summary": summary,
        "rows": rows,
    }))?;
    let lines = vec![format!(
        "{} data, {} below threshold, agreement {}, scatter-predicted blow-ups {}, errors {}",
        summary.rows,
        summary.below_threshold,
        summary.agreement_rate.map(|r| format!("{:.1}%", 100.0 * r)).unwrap_or_else(|| "n/a".into()),
        summary.scatter_predicted_blowups,
        summary.errors
    )];
    let files = vec![output::write(&cfg.out, "campaign.csv", &csv)?, output::write(&cfg.out, "campaign.json", &json)?];
    Ok(Outcome::new(files, lines))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("delta-nls").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_parse_after_subcommand() {
        let cli = parse(&["classify", "--gamma", "-0.5", "--grid-L", "20", "--grid-n", "801", "--sweep", "0.5:1.5:5"]);
        let cfg = resolve_config(&cli).unwrap();
        assert_eq!(cfg.params.gamma, -0.5);
        assert_eq!(cfg.grid, GridSpec { half_width: 20.0, n_points: 801 });
        assert_eq!(cfg.classify.lambda_sweep.unwrap().count, 5);
    }

    #[test]
    fn preset_then_flags() {
        let cli = parse(&["evolve", "--preset", "blowup", "--t-max", "1"]);
        let cfg = resolve_config(&cli).unwrap();
        assert_eq!(cfg.evolution.t_max, 1.0);
        assert!(cfg.evolution.adapt);
        assert_eq!(cfg.grid.half_width, 60.0);
    }

    #[test]
    fn agreement_rules() {
        assert_eq!(agrees(Region::ScatterPlus, &Verdict::Dispersed), Some(true));
        assert_eq!(agrees(Region::ScatterPlus, &Verdict::Inconclusive), Some(false));
        assert_eq!(agrees(Region::BlowupMinus, &Verdict::NormGrowth), Some(true));
        assert_eq!(agrees(Region::AboveThreshold, &Verdict::Dispersed), None);
    }

    #[test]
    fn summary_counts() {
        let row = |k: &str, r: &str, v: &str, a: Option<bool>| CampaignRow {
            key: k.into(),
            region: Some(r.into()),
            verdict: Some(v.into()),
            final_time: Some(1.0),
            agreement: a,
            error: None,
        };
        let rows = vec![
            row("a", "ScatterPlus", "Dispersed", Some(true)),
            row("b", "ScatterPlus", "Inconclusive", Some(false)),
            row("c", "AboveThreshold", "BlewUp", None),
            CampaignRow { key: "d".into(), region: None, verdict: None, final_time: None, agreement: None, error: Some("x".into()) },
        ];
        let s = summarize_campaign(&rows);
        assert_eq!((s.rows, s.errors, s.below_threshold, s.agreements), (4, 1, 2, 1));
        assert_eq!(s.agreement_rate, Some(0.5));
        assert_eq!(s.disagreement_verdicts.get("Inconclusive"), Some(&1));
        assert_eq!(s.scatter_predicted_blowups, 0);
    }
}
