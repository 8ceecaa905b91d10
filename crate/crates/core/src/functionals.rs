//! Conserved and variational functionals of grid data, the `(α, β)` scaling
//! flow and its generator.
//!
//! Every functional is assembled from four discrete primitives: `‖f‖²`,
//! `‖∂f‖²`, `‖f‖^{p+1}_{p+1}` and `|f(0)|²`. Keeping them in one place makes
//! the algebraic identities between the functionals exact in floating point
//! up to the order of summation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{gradient_norm_sq, l2_norm_sq, lp_norm_pow, GridFunction, Params};
use num_complex::Complex64;

/// The four discrete primitives of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Primitives {
    pub l2_sq: f64,
    pub grad_sq: f64,
    pub lp_pow: f64,
    pub center_sq: f64,
}

impl Primitives {
    pub fn of(f: &GridFunction, p: f64) -> Self {
        Primitives {
            l2_sq: l2_norm_sq(f),
            grad_sq: gradient_norm_sq(f),
            lp_pow: lp_norm_pow(f, p + 1.0),
            center_sq: f.center_value().norm_sqr(),
        }
    }

    pub fn k(&self, params: &Params, sp: &ScalingPair) -> f64 {
        let Params { gamma, p, omega } = *params;
        let (a, b) = (sp.alpha, sp.beta);
        (2.0 * a - b) / 4.0 * self.grad_sq + omega * (2.0 * a + b) / 2.0 * self.l2_sq
            - gamma * a * self.center_sq
            - ((p + 1.0) * a + b) / (p + 1.0) * self.lp_pow
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub mass: f64,
    pub energy: f64,
    pub action: f64,
    pub virial: f64,
    pub nehari: f64,
    pub calh_norm_sq: f64,
    pub h_norm_sq: f64,
    pub center_value_sq: f64,
    pub gradient_norm_sq: f64,
    pub omega: f64,
}

pub fn evaluate(f: &GridFunction, params: &Params) -> FunctionalReport {
    report_from(&Primitives::of(f, params.p), params)
}

pub fn report_from(q: &Primitives, params: &Params) -> FunctionalReport {
    let Params { gamma, p, omega } = *params;
    let point = gamma * q.center_sq;
    let energy = 0.25 * q.grad_sq - 0.5 * point - q.lp_pow / (p + 1.0);
    let mass = 0.5 * q.l2_sq;
    FunctionalReport {
        mass,
        energy,
        action: energy + omega * mass,
        virial: 0.5 * q.grad_sq - 0.5 * point - (p - 1.0) / (2.0 * (p + 1.0)) * q.lp_pow,
        nehari: 0.5 * q.grad_sq - point + omega * q.l2_sq - q.lp_pow,
        calh_norm_sq: 0.25 * q.grad_sq + 0.5 * omega * q.l2_sq - 0.5 * point,
        h_norm_sq: 0.5 * q.grad_sq - point,
        center_value_sq: q.center_sq,
        gradient_norm_sq: q.grad_sq,
        omega,
    }
}

/// Exponents of the scaling `e^{αλ} f(e^{−βλ} x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPair {
    pub alpha: f64,
    pub beta: f64,
}

impl ScalingPair {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && 2.0 * alpha - beta >= 0.0 && 2.0 * alpha + beta >= 0.0) {
            return Err(Error::invalid(format!(
                "scaling pair needs alpha > 0, 2alpha - beta >= 0, 2alpha + beta >= 0; got ({alpha}, {beta})"
            )));
        }
        Ok(ScalingPair { alpha, beta })
    }

    /// `(1/2, −1)`, the L²-invariant scaling whose generator is `P`.
    pub fn virial() -> Self {
        ScalingPair { alpha: 0.5, beta: -1.0 }
    }

    /// `(1, 0)`, the amplitude scaling whose generator is `I_ω`.
    pub fn nehari() -> Self {
        ScalingPair { alpha: 1.0, beta: 0.0 }
    }

    pub fn mu_bar(&self) -> f64 {
        (2.0 * self.alpha - self.beta).max(2.0 * self.alpha + self.beta)
    }

    pub fn mu_underbar(&self) -> f64 {
        (2.0 * self.alpha - self.beta).min(2.0 * self.alpha + self.beta)
    }
}

/// The four pairs exercised by the test batteries.
pub fn standard_pairs() -> [ScalingPair; 4] {
    [
        ScalingPair::virial(),
        ScalingPair::nehari(),
        ScalingPair { alpha: 1.0, beta: 1.0 },
        ScalingPair { alpha: 1.0, beta: -2.0 },
    ]
}

pub fn k_functional(f: &GridFunction, params: &Params, sp: &ScalingPair) -> f64 {
    Primitives::of(f, params.p).k(params, sp)
}

pub fn j_functional(f: &GridFunction, params: &Params, sp: &ScalingPair) -> f64 {
    let q = Primitives::of(f, params.p);
    report_from(&q, params).action - q.k(params, sp) / sp.mu_bar()
}

/// Samples of `e^{αλ} f(e^{−βλ} x)`, by four-point cubic interpolation.
///
/// The stencil never straddles the origin, so data with a kink at `x = 0`
/// (such as delta ground states) is interpolated to full order on each side.
/// Points that map outside the window read as zero.
pub fn scale(f: &GridFunction, lambda: f64, sp: &ScalingPair) -> GridFunction {
    let amp = (sp.alpha * lambda).exp();
    let shrink = (-sp.beta * lambda).exp();
    let grid = *f.grid();
    let values = f.values();
    let j0 = grid.center_index() as i64;
    let n = grid.n_points() as i64;
    let at = |j: i64| -> Complex64 {
        if (0..n).contains(&j) {
            values[j as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let out = (0..grid.n_points())
        .map(|j| {
            let k = j as i64 - j0;
            if k == 0 {
                return values[j] * amp;
            }
            let s = k as f64 * shrink;
            let base = s.floor() as i64;
            let t = s - base as f64;
            if t == 0.0 {
                return at(base + j0) * amp;
            }
            // nodes base-1..base+2, shifted to stay on one side of 0
            let mut first = base - 1;
            if k > 0 && first < 0 {
                first = 0;
            }
            if k < 0 && first + 3 > 0 {
                first = -3;
            }
            let u = s - first as f64;
            let w = lagrange4(u);
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, wm) in w.iter().enumerate() {
                acc += at(first + m as i64 + j0) * *wm;
            }
            acc * amp
        })
        .collect();
    GridFunction::new(grid, out).expect("same grid")
}

/// Cubic Lagrange weights for nodes 0, 1, 2, 3 evaluated at `u`.
fn lagrange4(u: f64) -> [f64; 4] {
    let (a, b, c, d) = (u, u - 1.0, u - 2.0, u - 3.0);
    [-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0]
}

/// Squared L² mass of `f` that `scale(f, λ, sp)` pushes outside the window.
pub fn scale_truncation(f: &GridFunction, lambda: f64, sp: &ScalingPair) -> f64 {
    let grid = f.grid();
    let reach = grid.half_width() * (-sp.beta * lambda).exp();
    f.values()
        .iter()
        .enumerate()
        .filter(|(j, _)| grid.x(*j).abs() > reach)
        .map(|(j, v)| grid.weight(j) * v.norm_sqr())
        .sum()
}

/// Step of the central difference in [`scaling_derivative`].
pub const SCALING_STEP: f64 = 1e-5;

/// `∂_λ S_ω(f^{α,β}_λ)` at `λ = 0`, by central differences.
pub fn scaling_derivative(f: &GridFunction, params: &Params, sp: &ScalingPair) -> f64 {
    let e = SCALING_STEP;
    let plus = evaluate(&scale(f, e, sp), params).action;
    let minus = evaluate(&scale(f, -e, sp), params).action;
    (plus - minus) / (2.0 * e)
}

/// `σ = (p+3)/(p−5)`.
pub fn sigma(p: f64) -> Result<f64> {
    if !(p > 5.0) {
        return Err(Error::invalid(format!("sigma needs p > 5, got {p}")));
    }
    Ok((p + 3.0) / (p - 5.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Grid};
    use crate::groundstate::GroundState;
    use approx::assert_relative_eq;

    fn params() -> Params {
        Params { gamma: -1.0, p: 7.0, omega: 1.0 }
    }

    fn bump(grid: Grid) -> GridFunction {
        GridFunction::from_fn(grid, |x| {
            let g = (-(x - 0.3) * (x - 0.3) / 0.8).exp();
            Complex64::new(g * (0.7 * x).cos(), g * (0.7 * x).sin()) * 0.9
        })
    }

    #[test]
    fn zero_state_has_zero_functionals() {
        let g = make_grid(5.0, 101).unwrap();
        let r = evaluate(&GridFunction::zeros(g), &params());
        assert_eq!(r.mass, 0.0);
        assert_eq!(r.energy, 0.0);
        assert_eq!(r.action, 0.0);
        assert_eq!(r.virial, 0.0);
        assert_eq!(r.nehari, 0.0);
        let z = GridFunction::zeros(g);
        assert_eq!(j_functional(&z, &params(), &ScalingPair::virial()), 0.0);
        assert_eq!(scaling_derivative(&z, &params(), &ScalingPair::nehari()), 0.0);
    }

    #[test]
    fn k_reduces_to_p_and_i() {
        let g = make_grid(8.0, 801).unwrap();
        let f = bump(g);
        let r = evaluate(&f, &params());
        assert_relative_eq!(k_functional(&f, &params(), &ScalingPair::virial()), r.virial, max_relative = 1e-14);
        assert_relative_eq!(k_functional(&f, &params(), &ScalingPair::nehari()), r.nehari, max_relative = 1e-14);
        assert_eq!(r.action, r.energy + r.omega * r.mass);
    }

    #[test]
    fn scaling_pair_validation() {
        assert!(ScalingPair::new(0.5, -1.0).is_ok());
        assert!(ScalingPair::new(0.0, 0.0).is_err());
        assert!(ScalingPair::new(1.0, 3.0).is_err());
        let sp = ScalingPair::new(1.0, -2.0).unwrap();
        assert_eq!(sp.mu_bar(), 4.0);
        assert_eq!(sp.mu_underbar(), 0.0);
    }

    #[test]
    fn identity_scaling_and_mass_invariance() {
        let g = make_grid(12.0, 2401).unwrap();
        let f = bump(g);
        assert_eq!(scale(&f, 0.0, &ScalingPair::virial()), f);
        let m = l2_norm_sq(&f);
        for lambda in [-0.4, 0.3, 0.7] {
            let s = scale(&f, lambda, &ScalingPair::virial());
            assert!((l2_norm_sq(&s) - m).abs() < 1e-6, "lambda {lambda}");
        }
    }

    #[test]
    fn scaling_group_law() {
        let g = make_grid(12.0, 2401).unwrap();
        let f = bump(g);
        let sp = ScalingPair { alpha: 1.0, beta: 1.0 };
        let twice = scale(&scale(&f, 0.2, &sp), 0.15, &sp);
        let once = scale(&f, 0.35, &sp);
        assert!(twice.max_distance(&once) < 1e-6);
    }

    #[test]
    fn generator_matches_k() {
        let g = make_grid(12.0, 2401).unwrap();
        let f = bump(g);
        for sp in standard_pairs() {
            let k = k_functional(&f, &params(), &sp);
            let l = scaling_derivative(&f, &params(), &sp);
            assert!((k - l).abs() < 1e-4 * (1.0 + k.abs()), "{sp:?}: {k} vs {l}");
        }
    }

    #[test]
    fn ground_state_is_critical() {
        let g = make_grid(10.0, 8001).unwrap();
        let gs = GroundState::delta(params()).unwrap();
        let q = gs.sample(g);
        for sp in standard_pairs() {
            assert!(k_functional(&q, &params(), &sp).abs() < 1e-4);
            assert!(scaling_derivative(&q, &params(), &sp).abs() < 1e-4);
        }
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(7.0).unwrap(), 5.0);
        assert_eq!(sigma(9.0).unwrap(), 3.0);
        assert!(sigma(5.0).is_err());
        assert!(sigma(101.0).unwrap() < sigma(51.0).unwrap());
        assert!(sigma(1e6).unwrap() > 1.0);
    }
}
