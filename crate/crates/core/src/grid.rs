//! Uniform symmetric grids, sampled functions, discrete norms and the
//! point-interaction Hamiltonian.
//!
//! A [`Grid`] always has an odd number of nodes so that `x = 0` is a node.
//! Everything beyond `±L` is treated as zero (Dirichlet), and the boundary
//! nodes themselves are clamped to zero by [`apply_hamiltonian`] and by the
//! time integrator.
//!
//! Quadrature uses trapezoid weights. The discrete Hamiltonian is
//!
//! ```text
//! (H f)_j = -(f_{j+1} - 2 f_j + f_{j-1}) / (2h²) - (γ/h) [j = j0] f_{j0}
//! ```
//!
//! whose quadratic form is exactly `½ Σ |f_{j+1} - f_j|²/h - γ |f_{j0}|²`,
//! the discrete counterpart of `½‖∂ₓf‖² - γ|f(0)|²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters: coupling γ ≤ 0, power p > 5, frequency ω > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub gamma: f64,
    pub p: f64,
    pub omega: f64,
}

impl Params {
    pub fn new(gamma: f64, p: f64, omega: f64) -> Result<Self> {
        let params = Params { gamma, p, omega };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma <= 0.0) {
            return Err(Error::invalid(format!("gamma must be <= 0, got {}", self.gamma)));
        }
        if !(self.p > 5.0) {
            return Err(Error::invalid(format!("p must be > 5, got {}", self.p)));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::invalid(format!("omega must be > 0, got {}", self.omega)));
        }
        Ok(())
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Params { omega, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Params { gamma, ..self }
    }

    /// Whether the delta ground state `Q_{ω,γ}` exists (ω > γ²/2).
    pub fn delta_soliton_exists(&self) -> bool {
        self.omega > 0.5 * self.gamma * self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    n_points: usize,
    spacing: f64,
}

impl Grid {
    /// Grid on `[-L, L]` with `n_points` nodes (odd, at least 3).
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::invalid(format!("half width must be > 0, got {half_width}")));
        }
        if n_points < 3 || n_points % 2 == 0 {
            return Err(Error::invalid(format!(
                "n_points must be odd and >= 3, got {n_points}"
            )));
        }
        let spacing = 2.0 * half_width / (n_points - 1) as f64;
        Ok(Grid { half_width, n_points, spacing })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center_index(&self) -> usize {
        (self.n_points - 1) / 2
    }

    /// Node coordinate. Computed relative to the center so that the center
    /// node is exactly zero and the grid is exactly symmetric.
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.center_index() as f64) * self.spacing
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.x(j))
    }

    /// Trapezoid weight of node `j`.
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.n_points {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    /// Same window, half the spacing. Every node of `self` is a node of the
    /// refined grid.
    pub fn refined(&self) -> Grid {
        Grid::new(self.half_width, 2 * self.n_points - 1).expect("refining a valid grid")
    }

    /// Index of the node nearest to `x`, if inside the window.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let k = (x / self.spacing).round();
        let j = k + self.center_index() as f64;
        if j < 0.0 || j > (self.n_points - 1) as f64 {
            None
        } else {
            Some(j as usize)
        }
    }
}

/// `make_grid(L, n)`.
pub fn make_grid(half_width: f64, n_points: usize) -> Result<Grid> {
    Grid::new(half_width, n_points)
}

/// Complex samples, one per node of a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::invalid(format!(
                "expected {} samples, got {}",
                grid.n_points(),
                values.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction { grid, values: vec![Complex64::new(0.0, 0.0); grid.n_points()] }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let values = grid.nodes().map(&mut f).collect();
        GridFunction { grid, values }
    }

    pub fn from_real_fn(grid: Grid, mut f: impl FnMut(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn center_value(&self) -> Complex64 {
        self.values[self.grid.center_index()]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        GridFunction { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise sum. Panics if the grids differ.
    pub fn add(&self, other: &GridFunction) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        GridFunction { grid: self.grid, values }
    }

    pub fn sub(&self, other: &GridFunction) -> Self {
        self.add(&other.scaled(-1.0))
    }

    /// `max_j |f_j - g_j|`.
    pub fn max_distance(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `(f + Rf)/2`.
    pub fn evenized(&self) -> Self {
        let r = reflect(self);
        let values = self.values.iter().zip(&r.values).map(|(a, b)| 0.5 * (a + b)).collect();
        GridFunction { grid: self.grid, values }
    }

    /// `max |f - Rf|`.
    pub fn evenness_defect(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2).map(|j| (self.values[j] - self.values[n - 1 - j]).norm()).fold(0.0, f64::max)
    }

    /// Copy with the two boundary nodes set to zero.
    pub fn with_dirichlet_edges(&self) -> Self {
        let mut out = self.clone();
        let n = out.values.len();
        out.values[0] = Complex64::new(0.0, 0.0);
        out.values[n - 1] = Complex64::new(0.0, 0.0);
        out
    }

    /// Samples on another grid by linear interpolation, zero outside the
    /// source window.
    pub fn resample(&self, target: Grid) -> GridFunction {
        GridFunction::from_fn(target, |x| self.interpolate_linear(x))
    }

    fn interpolate_linear(&self, x: f64) -> Complex64 {
        let h = self.grid.spacing;
        let s = x / h + self.grid.center_index() as f64;
        let n = self.values.len();
        if s < 0.0 || s > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let j = (s.floor() as usize).min(n - 2);
        let t = s - j as f64;
        self.values[j] * (1.0 - t) + self.values[j + 1] * t
    }
}

/// `Σ_j w_j |f_j|²` with trapezoid weights.
pub fn l2_norm_sq(f: &GridFunction) -> f64 {
    f.values.iter().enumerate().map(|(j, v)| f.grid.weight(j) * v.norm_sqr()).sum()
}

/// `Σ_j w_j |f_j|^q`.
pub fn lp_norm_pow(f: &GridFunction, q: f64) -> f64 {
    f.values
        .iter()
        .enumerate()
        .map(|(j, v)| f.grid.weight(j) * abs_pow(v.norm_sqr(), q))
        .sum()
}

/// `|z|^q` given `|z|²`, with a fast path for even integer powers.
pub(crate) fn abs_pow(norm_sqr: f64, q: f64) -> f64 {
    let half = 0.5 * q;
    if half.fract() == 0.0 && half <= 16.0 {
        norm_sqr.powi(half as i32)
    } else {
        norm_sqr.powf(half)
    }
}

pub(crate) fn max_abs_values(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).sqrt()
}

/// `Σ_j |f_{j+1} - f_j|² / h` over forward differences.
pub fn gradient_norm_sq(f: &GridFunction) -> f64 {
    let h = f.grid.spacing;
    f.values.windows(2).map(|w| (w[1] - w[0]).norm_sqr()).sum::<f64>() / h
}

/// Trapezoid inner product `Σ_j w_j conj(f_j) g_j`.
pub fn inner(f: &GridFunction, g: &GridFunction) -> Complex64 {
    assert_eq!(f.grid, g.grid, "grid mismatch");
    f.values
        .iter()
        .zip(&g.values)
        .enumerate()
        .map(|(j, (a, b))| a.conj() * b * f.grid.weight(j))
        .sum()
}

/// Discrete `H_γ f` with the point interaction folded into the center row.
/// Boundary nodes are Dirichlet: their input values are ignored and their
/// output is zero.
pub fn apply_hamiltonian(f: &GridFunction, gamma: f64) -> GridFunction {
    let n = f.values.len();
    let h = f.grid.spacing;
    let c = 1.0 / (2.0 * h * h);
    let v = &f.values;
    let zero = Complex64::new(0.0, 0.0);
    let at = |j: usize| if j == 0 || j == n - 1 { zero } else { v[j] };
    let mut out = vec![zero; n];
    for j in 1..n - 1 {
        out[j] = -(at(j + 1) - 2.0 * v[j] + at(j - 1)) * c;
    }
    let j0 = f.grid.center_index();
    out[j0] -= v[j0] * (gamma / h);
    GridFunction { grid: f.grid, values: out }
}

/// `τ_y f(x) = f(x - y)`, with `y` snapped to the nearest multiple of `h`.
/// Returns the shifted function and the snap distance (snapped − requested).
pub fn translate(f: &GridFunction, y: f64) -> (GridFunction, f64) {
    let h = f.grid.spacing;
    let k = (y / h).round() as i64;
    let snap = k as f64 * h - y;
    let n = f.values.len() as i64;
    let values = (0..n)
        .map(|j| {
            let src = j - k;
            if (0..n).contains(&src) {
                f.values[src as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    (GridFunction { grid: f.grid, values }, snap)
}

/// `R f(x) = f(-x)`.
pub fn reflect(f: &GridFunction) -> GridFunction {
    let mut values = f.values.clone();
    values.reverse();
    GridFunction { grid: f.grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_function(grid: Grid, rng: &mut impl Rng) -> GridFunction {
        GridFunction::from_fn(grid, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn grid_examples() {
        let g = make_grid(10.0, 5).unwrap();
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec![-10.0, -5.0, 0.0, 5.0, 10.0]);
        assert_eq!(g.spacing(), 5.0);
        let g = make_grid(1.0, 3).unwrap();
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(g.spacing(), 1.0);
        let g = make_grid(40.0, 8193).unwrap();
        assert_relative_eq!(g.spacing(), 80.0 / 8192.0);
        assert_eq!(g.x(g.center_index()), 0.0);
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(matches!(make_grid(1.0, 4), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(0.0, 5), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(-1.0, 5), Err(Error::InvalidArgument(_))));
        assert!(make_grid(1.0, 1).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(-1.0, 7.0, 1.0).is_ok());
        assert!(Params::new(0.5, 7.0, 1.0).is_err());
        assert!(Params::new(-1.0, 5.0, 1.0).is_err());
        assert!(Params::new(-1.0, 7.0, 0.0).is_err());
    }

    #[test]
    fn norms_of_trivial_functions() {
        let g = make_grid(1.0, 3).unwrap();
        let zero = GridFunction::zeros(g);
        assert_eq!(l2_norm_sq(&zero), 0.0);
        assert_eq!(lp_norm_pow(&zero, 8.0), 0.0);
        assert_eq!(gradient_norm_sq(&zero), 0.0);

        let spike = GridFunction::from_real_fn(g, |x| if x == 0.0 { 1.0 } else { 0.0 });
        assert_eq!(l2_norm_sq(&spike), 1.0);

        // constant 1 on [-1, 1]: trapezoid weights integrate exactly
        let g = make_grid(1.0, 201).unwrap();
        let one = GridFunction::from_real_fn(g, |_| 1.0);
        assert_relative_eq!(lp_norm_pow(&one, 4.0), 2.0, epsilon = 1e-12);
        assert_eq!(gradient_norm_sq(&one), 0.0);
    }

    #[test]
    fn gradient_of_sine_matches_analytic_integral() {
        // sin(kx) on [-π, π] with k = 1: ∫cos² = π
        let g = make_grid(std::f64::consts::PI, 20001).unwrap();
        let f = GridFunction::from_real_fn(g, f64::sin);
        assert!((gradient_norm_sq(&f) - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn hamiltonian_on_sine_is_half_k_squared() {
        let l = 10.0;
        let g = make_grid(l, 4001).unwrap();
        let k = 3.0 * std::f64::consts::PI / l;
        let f = GridFunction::from_real_fn(g, |x| (k * x).sin());
        let hf = apply_hamiltonian(&f, 0.0);
        let err = (1..g.n_points() - 1)
            .map(|j| (hf.values()[j] - f.values()[j] * (0.5 * k * k)).norm())
            .fold(0.0, f64::max);
        // O(h²) with h = 5e-3
        assert!(err < 1e-4, "err = {err}");
        assert!(apply_hamiltonian(&GridFunction::zeros(g), -1.0).is_zero());
    }

    #[test]
    fn hamiltonian_is_symmetric_and_nonnegative() {
        let g = make_grid(5.0, 101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for gamma in [0.0, -0.3, -2.0] {
            for _ in 0..20 {
                let f = random_function(g, &mut rng);
                let u = random_function(g, &mut rng);
                let a = inner(&f, &apply_hamiltonian(&u, gamma));
                let b = inner(&apply_hamiltonian(&f, gamma), &u);
                let scale = a.norm().max(1.0);
                assert!((a - b).norm() <= 1e-12 * scale);
                let q = inner(&f, &apply_hamiltonian(&f, gamma)).re;
                assert!(q >= -1e-12 * l2_norm_sq(&f));
            }
        }
    }

    #[test]
    fn quadratic_form_matches_gradient_and_center_term() {
        let g = make_grid(4.0, 81).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_function(g, &mut rng).with_dirichlet_edges();
        let gamma = -0.7;
        let q = inner(&f, &apply_hamiltonian(&f, gamma)).re;
        let expected = 0.5 * gradient_norm_sq(&f) - gamma * f.center_value().norm_sqr();
        assert_relative_eq!(q, expected, max_relative = 1e-12);
    }

    #[test]
    fn translate_and_reflect() {
        let g = make_grid(20.0, 401).unwrap();
        let f = GridFunction::from_real_fn(g, |x| (-(x - 1.0) * (x - 1.0)).exp());
        let (same, snap) = translate(&f, 0.0);
        assert_eq!(same, f);
        assert_eq!(snap, 0.0);

        let (shifted, snap) = translate(&f, 3.0);
        assert!(snap.abs() < 1e-12);
        let (back, _) = translate(&shifted, -3.0);
        assert!(back.max_distance(&f) < 1e-15);
        assert!((l2_norm_sq(&shifted) - l2_norm_sq(&f)).abs() < 1e-12);

        // 0.26 snaps to 0.3 on h = 0.1
        let (_, snap) = translate(&f, 0.26);
        assert_relative_eq!(snap, 0.04, epsilon = 1e-12);

        let even = GridFunction::from_real_fn(g, |x| (-x * x).exp());
        assert_eq!(reflect(&even), even);
        assert_eq!(reflect(&reflect(&f)), f);
    }

    #[test]
    fn reflection_commutes_with_hamiltonian() {
        let g = make_grid(3.0, 61).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_function(g, &mut rng);
        let a = reflect(&apply_hamiltonian(&f, -1.3));
        let b = apply_hamiltonian(&reflect(&f), -1.3);
        assert!(a.max_distance(&b) < 1e-12);
    }

    #[test]
    fn trapezoid_converges_at_second_order() {
        // ∫_{-1}^{1} cos²(πx/2)·... use a function whose endpoint derivative
        // does not vanish, so trapezoid is genuinely O(h²).
        let exact = 2.0 * (1.0f64).sinh(); // ∫ e^x over [-1, 1]
        let errs: Vec<f64> = [51usize, 101, 201]
            .iter()
            .map(|&n| {
                let g = make_grid(1.0, n).unwrap();
                let f = GridFunction::from_real_fn(g, |x| (0.5 * x).exp());
                (l2_norm_sq(&f) - exact).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.9, "order = {order}");
        }
    }
}
