//! Families of initial data and seeded random batteries drawn from them.

use std::path::PathBuf;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{translate, Grid, GridFunction, Params};
use crate::groundstate::GroundState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Zero,
    /// `λ Q_{ω,γ_Q}`. `gamma_of_q` defaults to the run's γ.
    ScaledSoliton {
        lambda: f64,
        omega: f64,
        #[serde(default)]
        gamma_of_q: Option<f64>,
    },
    /// `a e^{-(x-c)²/w²} e^{ikx}`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        velocity: f64,
    },
    /// `λ Q_{ω,0}(x − y)`, snapped to the grid.
    TranslatedSoliton {
        y: f64,
        omega: f64,
        #[serde(default = "one")]
        lambda: f64,
    },
    /// `λ (Q_{ω,0}(x − y) + Q_{ω,0}(x + y))`.
    SumOfTranslates {
        y: f64,
        omega: f64,
        #[serde(default = "one")]
        lambda: f64,
    },
    /// Two- or three-column text file: `x re [im]`. Linearly resampled.
    Custom { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    #[serde(flatten)]
    pub family: Family,
    /// Replace `f` by `(f + Rf)/2`.
    #[serde(default)]
    pub evenized: bool,
}

impl InitialDataSpec {
    pub fn new(family: Family) -> Self {
        InitialDataSpec { family, evenized: false }
    }

    pub fn evenized(mut self) -> Self {
        self.evenized = true;
        self
    }

    pub fn scaled_soliton(lambda: f64, omega: f64) -> Self {
        Self::new(Family::ScaledSoliton { lambda, omega, gamma_of_q: None })
    }

    /// Short human-readable key, stable across runs.
    pub fn label(&self) -> String {
        let base = match &self.family {
            Family::Zero => "zero".to_string(),
            Family::ScaledSoliton { lambda, omega, gamma_of_q } => match gamma_of_q {
                Some(g) => format!("soliton(lambda={lambda},omega={omega},gamma={g})"),
                None => format!("soliton(lambda={lambda},omega={omega})"),
            },
            Family::Gaussian { amplitude, width, center, velocity } => {
                format!("gaussian(a={amplitude},w={width},c={center},k={velocity})")
            }
            Family::TranslatedSoliton { y, omega, lambda } => {
                format!("translated(y={y},omega={omega},lambda={lambda})")
            }
            Family::SumOfTranslates { y, omega, lambda } => {
                format!("two_bump(y={y},omega={omega},lambda={lambda})")
            }
            Family::Custom { path } => format!("custom({})", path.display()),
        };
        if self.evenized {
            format!("even:{base}")
        } else {
            base
        }
    }

    pub fn validate(&self, params: &Params) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be > 0, got {v}")))
            }
        };
        match &self.family {
            Family::Zero | Family::Custom { .. } => Ok(()),
            Family::ScaledSoliton { lambda, omega, gamma_of_q } => {
                positive("omega", *omega)?;
                if !lambda.is_finite() {
                    return Err(Error::config("lambda must be finite"));
                }
                let gamma = gamma_of_q.unwrap_or(params.gamma);
                if gamma > 0.0 {
                    return Err(Error::config("gamma_of_q must be <= 0"));
                }
                if !(Params { gamma, p: params.p, omega: *omega }).delta_soliton_exists() {
                    return Err(Error::config(format!(
                        "no delta soliton for omega = {omega}, gamma = {gamma}"
                    )));
                }
                Ok(())
            }
            Family::Gaussian { amplitude, width, center, velocity } => {
                positive("width", *width)?;
                if !(amplitude.is_finite() && center.is_finite() && velocity.is_finite()) {
                    return Err(Error::config("gaussian parameters must be finite"));
                }
                Ok(())
            }
            Family::TranslatedSoliton { y, omega, lambda }
            | Family::SumOfTranslates { y, omega, lambda } => {
                positive("omega", *omega)?;
                if !(y.is_finite() && lambda.is_finite()) {
                    return Err(Error::config("soliton parameters must be finite"));
                }
                Ok(())
            }
        }
    }

    pub fn build(&self, grid: Grid, params: &Params) -> Result<GridFunction> {
        self.validate(params)?;
        let f = match &self.family {
            Family::Zero => GridFunction::zeros(grid),
            Family::ScaledSoliton { lambda, omega, gamma_of_q } => {
                let gamma = gamma_of_q.unwrap_or(params.gamma);
                let gs = GroundState::delta(Params { gamma, p: params.p, omega: *omega })?;
                gs.sample(grid).scaled(*lambda)
            }
            Family::Gaussian { amplitude, width, center, velocity } => {
                GridFunction::from_fn(grid, |x| {
                    let d = (x - center) / width;
                    Complex64::from_polar(amplitude * (-d * d).exp(), velocity * x)
                })
            }
            Family::TranslatedSoliton { y, omega, lambda } => {
                let q = GroundState::free(*omega, params.p).sample(grid).scaled(*lambda);
                translate(&q, *y).0
            }
            Family::SumOfTranslates { y, omega, lambda } => {
                let gs = GroundState::free(*omega, params.p);
                GridFunction::from_real_fn(grid, |x| lambda * (gs.value(x - y) + gs.value(x + y)))
            }
            Family::Custom { path } => read_custom(path, grid)?,
        };
        Ok(if self.evenized { f.evenized() } else { f })
    }
}

fn read_custom(path: &std::path::Path, grid: Grid) -> Result<GridFunction> {
    let text = std::fs::read_to_string(path)?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<f64> = match line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::parse::<f64>)
            .collect()
        {
            Ok(c) => c,
            // header row
            Err(_) if xs.is_empty() => continue,
            Err(e) => {
                return Err(Error::config(format!("{}:{}: {e}", path.display(), line_no + 1)))
            }
        };
        if cols.len() < 2 {
            return Err(Error::config(format!("{}:{}: need x and re columns", path.display(), line_no + 1)));
        }
        xs.push(cols[0]);
        vs.push(Complex64::new(cols[1], cols.get(2).copied().unwrap_or(0.0)));
    }
    if xs.len() < 2 || xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(format!("{}: need at least two increasing x values", path.display())));
    }
    Ok(GridFunction::from_fn(grid, |x| {
        if x < xs[0] || x > xs[xs.len() - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
        let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
        vs[k - 1] * (1.0 - t) + vs[k] * t
    }))
}

/// Seeded draw of `count` specs from the parametric families. The same seed
/// always yields the same list.
pub fn random_battery(params: &Params, seed: u64, count: usize) -> Vec<InitialDataSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_spec(params, &mut rng)).collect()
}

fn random_spec(params: &Params, rng: &mut ChaCha8Rng) -> InitialDataSpec {
    let family = match rng.gen_range(0..4) {
        0 => Family::Gaussian {
            amplitude: rng.gen_range(0.2..1.6),
            width: rng.gen_range(0.3..2.0),
            center: rng.gen_range(-2.0..2.0),
            velocity: rng.gen_range(-1.0..1.0),
        },
        1 => {
            // keep clear of the existence line ω = γ²/2
            let floor = 0.5 * params.gamma * params.gamma * 1.2;
            Family::ScaledSoliton {
                lambda: rng.gen_range(0.3..1.4),
                omega: rng.gen_range(floor.max(0.3)..floor.max(0.3) + 1.5),
                gamma_of_q: None,
            }
        }
        2 => Family::TranslatedSoliton {
            y: rng.gen_range(-3.0..3.0),
            omega: rng.gen_range(0.5..2.0),
            lambda: rng.gen_range(0.3..1.2),
        },
        _ => Family::SumOfTranslates {
            y: rng.gen_range(1.0..4.0),
            omega: rng.gen_range(0.5..2.0),
            lambda: rng.gen_range(0.3..1.0),
        },
    };
    InitialDataSpec { family, evenized: rng.gen_bool(0.25) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn params() -> Params {
        Params { gamma: -1.0, p: 7.0, omega: 1.0 }
    }

    #[test]
    fn spec_round_trips_through_toml() {
        let spec = InitialDataSpec::scaled_soliton(0.9, 1.0).evenized();
        let text = toml::to_string(&spec).unwrap();
        let back: InitialDataSpec = toml::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let g: InitialDataSpec = toml::from_str("family = \"gaussian\"\namplitude = 1.0\nwidth = 2.0\n").unwrap();
        assert_eq!(g.family, Family::Gaussian { amplitude: 1.0, width: 2.0, center: 0.0, velocity: 0.0 });
    }

    #[test]
    fn builds_each_family() {
        let grid = make_grid(20.0, 801).unwrap();
        let specs = [
            InitialDataSpec::new(Family::Zero),
            InitialDataSpec::scaled_soliton(0.9, 1.0),
            InitialDataSpec::new(Family::Gaussian { amplitude: 1.0, width: 1.0, center: 1.0, velocity: 0.5 })
                .evenized(),
            InitialDataSpec::new(Family::TranslatedSoliton { y: 2.0, omega: 1.0, lambda: 1.0 }),
            InitialDataSpec::new(Family::SumOfTranslates { y: 3.0, omega: 1.0, lambda: 1.0 }),
        ];
        for s in &specs {
            let f = s.build(grid, &params()).unwrap();
            assert!(f.is_finite());
        }
        let even = specs[2].build(grid, &params()).unwrap();
        assert!(even.evenness_defect() < 1e-15);
        let two = specs[4].build(grid, &params()).unwrap();
        assert!(two.evenness_defect() < 1e-12);
    }

    #[test]
    fn rejects_missing_soliton() {
        let grid = make_grid(20.0, 801).unwrap();
        let spec = InitialDataSpec::scaled_soliton(1.0, 0.4);
        assert!(spec.build(grid, &params()).is_err());
    }

    #[test]
    fn custom_file_is_resampled() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "x,re,im\n-1,0,0\n0,1,0.5\n1,0,0\n").unwrap();
        let grid = make_grid(2.0, 9).unwrap();
        let f = InitialDataSpec::new(Family::Custom { path }).build(grid, &params()).unwrap();
        assert_eq!(f.center_value(), Complex64::new(1.0, 0.5));
        assert_eq!(f.values()[5], Complex64::new(0.5, 0.25));
        assert_eq!(f.values()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn battery_is_reproducible() {
        let a = random_battery(&params(), 42, 20);
        let b = random_battery(&params(), 42, 20);
        assert_eq!(a, b);
        assert_ne!(a, random_battery(&params(), 43, 20));
    }
}
