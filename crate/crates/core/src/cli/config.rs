use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::grid::{make_grid, Grid, Params};
use crate::initial_data::{Family, InitialDataSpec};
use crate::verify::{Profile, ReferenceFixture, VerifyOptions, DEFAULT_SEED};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(alias = "L")]
    pub half_width: f64,
    #[serde(alias = "n")]
    pub n_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { half_width: 40.0, n_points: 8193 }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        make_grid(self.half_width, self.n_points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n).map(|k| self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64).collect(),
        }
    }

    /// `START:STOP:COUNT`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::config(format!("sweep must look like START:STOP:COUNT, got {text:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(Sweep {
            start: parts[0].trim().parse().map_err(|_| bad())?,
            stop: parts[1].trim().parse().map_err(|_| bad())?,
            count: parts[2].trim().parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    /// Classify `λ f` for each λ of the sweep instead of `f` alone.
    pub lambda_sweep: Option<Sweep>,
    /// Force the radial classification; errors on non-even data.
    pub radial: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub profile: Profile,
    pub criteria: Vec<u32>,
    /// JSON file with the reference constants; built-in values otherwise.
    pub fixture: Option<PathBuf>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { profile: Profile::Full, criteria: Vec::new(), fixture: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CampaignGrid {
    /// Centered Gaussians over amplitude × width.
    GaussianGrid { amplitudes: Vec<f64>, widths: Vec<f64> },
    /// `λ Q_{ω,γ}` for each λ.
    SolitonSweep { lambdas: Vec<f64>, omega: f64 },
    List { data: Vec<InitialDataSpec> },
}

impl Default for CampaignGrid {
    fn default() -> Self {
        CampaignGrid::GaussianGrid { amplitudes: vec![0.4, 0.6, 0.8, 1.0, 1.2], widths: vec![0.5, 0.75, 1.0, 1.5, 2.0] }
    }
}

impl CampaignGrid {
    pub fn specs(&self) -> Vec<InitialDataSpec> {
        match self {
            CampaignGrid::GaussianGrid { amplitudes, widths } => amplitudes
                .iter()
                .flat_map(|&a| {
                    widths.iter().map(move |&w| {
                        InitialDataSpec::new(Family::Gaussian { amplitude: a, width: w, center: 0.0, velocity: 0.0 })
                    })
                })
                .collect(),
            CampaignGrid::SolitonSweep { lambdas, omega } => {
                lambdas.iter().map(|&l| InitialDataSpec::scaled_soliton(l, *omega)).collect()
            }
            CampaignGrid::List { data } => data.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub grid: CampaignGrid,
}

/// Everything one invocation needs. Loaded from TOML, then overridden by
/// flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub params: Params,
    pub grid: GridSpec,
    pub evolution: EvolutionConfig,
    pub initial: InitialDataSpec,
    pub classify: ClassifyConfig,
    pub verify: VerifyConfig,
    pub campaign: CampaignConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            out: PathBuf::from("out"),
            params: Params { gamma: -1.0, p: 7.0, omega: 1.0 },
            grid: GridSpec::default(),
            evolution: EvolutionConfig::default(),
            initial: InitialDataSpec::scaled_soliton(1.0, 1.0),
            classify: ClassifyConfig::default(),
            verify: VerifyConfig::default(),
            campaign: CampaignConfig::default(),
        }
    }
}

/// Flags shared by every subcommand. Any that are set replace the config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub p: Option<f64>,
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
    pub grid_l: Option<f64>,
    pub grid_n: Option<usize>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("reading {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        // relative data paths are taken from the config's directory
        if let Family::Custom { path: p } = &mut cfg.initial.family {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.p {
            self.params.p = v;
        }
        if let Some(v) = o.gamma {
            self.params.gamma = v;
        }
        if let Some(v) = o.omega {
            self.params.omega = v;
        }
        if let Some(v) = o.grid_l {
            self.grid.half_width = v;
        }
        if let Some(v) = o.grid_n {
            self.grid.n_points = v;
        }
        if let Some(v) = o.dt {
            self.evolution.dt = v;
        }
        if let Some(v) = o.t_max {
            self.evolution.t_max = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let grid = self.grid.build()?;
        self.evolution.validate(&grid)?;
        self.initial.validate(&self.params)?;
        Ok(())
    }

    pub fn verify_options(&self) -> Result<VerifyOptions> {
        let fixture = match &self.verify.fixture {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::config(format!("reading fixture {}: {e}", p.display())))?;
                ReferenceFixture::from_json(&text)?
            }
            None => ReferenceFixture::default(),
        };
        Ok(VerifyOptions { profile: self.verify.profile, seed: self.seed, fixture, criteria: self.verify.criteria.clone() })
    }
}
