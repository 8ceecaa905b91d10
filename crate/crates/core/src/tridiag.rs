//! Crank–Nicolson (Cayley) propagator for the discrete Hamiltonian.
//!
//! One linear substep of length `s` solves
//! `(1 + i s H/2) u⁺ = (1 − i s H/2) u` on the interior nodes; the two
//! boundary nodes stay at zero. The factorization depends only on `s`, so it
//! is computed once and reused until the step size changes.

use num_complex::Complex64;

use crate::grid::Grid;

#[derive(Debug, Clone)]
pub(crate) struct CayleyPropagator {
    step: f64,
    gamma: f64,
    grid: Grid,
    /// `i s/2 · (−1/(2h²))`, the constant off-diagonal of `1 + i s H/2`.
    off: Complex64,
    /// Diagonal of the left-hand matrix, per interior node.
    diag: Vec<Complex64>,
    /// Thomas-algorithm modified super-diagonal.
    c_prime: Vec<Complex64>,
    /// Reciprocal pivots.
    inv_pivot: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl CayleyPropagator {
    pub fn new(grid: Grid, gamma: f64, step: f64) -> Self {
        let h = grid.spacing();
        let n = grid.n_points();
        let m = n - 2;
        let half = Complex64::new(0.0, 0.5 * step);
        let off = half * (-1.0 / (2.0 * h * h));
        let j0 = grid.center_index();
        let diag: Vec<Complex64> = (1..n - 1)
            .map(|j| {
                let mut d = 1.0 / (h * h);
                if j == j0 {
                    d -= gamma / h;
                }
                Complex64::new(1.0, 0.0) + half * d
            })
            .collect();
        let mut c_prime = vec![Complex64::new(0.0, 0.0); m];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); m];
        let mut prev = Complex64::new(0.0, 0.0);
        for k in 0..m {
            let pivot = diag[k] - off * prev;
            inv_pivot[k] = 1.0 / pivot;
            c_prime[k] = off * inv_pivot[k];
            prev = c_prime[k];
        }
        CayleyPropagator {
            step,
            gamma,
            grid,
            off,
            diag,
            c_prime,
            inv_pivot,
            scratch: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    pub fn matches(&self, grid: &Grid, gamma: f64, step: f64) -> bool {
        self.step == step && self.gamma == gamma && self.grid == *grid
    }

    /// Apply one substep in place. `u` has one entry per grid node.
    pub fn apply(&mut self, u: &mut [Complex64]) {
        let n = u.len();
        debug_assert_eq!(n, self.grid.n_points());
        let m = n - 2;
        let zero = Complex64::new(0.0, 0.0);
        u[0] = zero;
        u[n - 1] = zero;
        // right-hand side (1 − i s H/2) u = conj-structured: 2u − (1 + i s H/2) u
        let off = self.off;
        let rhs = &mut self.scratch;
        for k in 0..m {
            let j = k + 1;
            let left = (self.diag[k] * u[j]) + off * (u[j - 1] + u[j + 1]);
            rhs[k] = 2.0 * u[j] - left;
        }
        // forward sweep
        let mut prev = zero;
        for k in 0..m {
            let d = (rhs[k] - off * prev) * self.inv_pivot[k];
            rhs[k] = d;
            prev = d;
        }
        // back substitution
        let mut next = zero;
        for k in (0..m).rev() {
            let x = rhs[k] - self.c_prime[k] * next;
            u[k + 1] = x;
            next = x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{apply_hamiltonian, l2_norm_sq, GridFunction};

    #[test]
    fn solves_the_cayley_system() {
        let grid = Grid::new(5.0, 101).unwrap();
        let gamma = -0.8;
        let s = 0.05;
        let u0 = GridFunction::from_fn(grid, |x| Complex64::new((-x * x).exp(), 0.3 * x * (-x * x).exp()))
            .with_dirichlet_edges();
        let mut prop = CayleyPropagator::new(grid, gamma, s);
        let mut u = u0.values().to_vec();
        prop.apply(&mut u);
        let u1 = GridFunction::new(grid, u).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let lhs = u1.add(&apply_hamiltonian(&u1, gamma).map(|v| v * i * (0.5 * s)));
        let rhs = u0.sub(&apply_hamiltonian(&u0, gamma).map(|v| v * i * (0.5 * s)));
        let interior = (1..grid.n_points() - 1)
            .map(|j| (lhs.values()[j] - rhs.values()[j]).norm())
            .fold(0.0, f64::max);
        assert!(interior < 1e-13, "residual {interior}");
        let drift = (l2_norm_sq(&u1) - l2_norm_sq(&u0)).abs() / l2_norm_sq(&u0);
        assert!(drift < 1e-14);
    }

    #[test]
    fn negative_step_inverts_positive_step() {
        let grid = Grid::new(5.0, 201).unwrap();
        let u0 = GridFunction::from_real_fn(grid, |x| (-(x - 0.5) * (x - 0.5)).exp()).with_dirichlet_edges();
        let mut fwd = CayleyPropagator::new(grid, -1.0, 0.01);
        let mut bwd = CayleyPropagator::new(grid, -1.0, -0.01);
        let mut u = u0.values().to_vec();
        fwd.apply(&mut u);
        bwd.apply(&mut u);
        let back = GridFunction::new(grid, u).unwrap();
        assert!(back.max_distance(&u0) < 1e-13);
    }
}
