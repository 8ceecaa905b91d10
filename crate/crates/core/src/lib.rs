//! Numerical laboratory for the focusing, mass-supercritical NLS with a
//! repulsive point interaction on the line,
//!
//! ```text
//! i u_t + ½ u_xx + γ δ₀ u + |u|^{p−1} u = 0,    γ ≤ 0,  p > 5.
//! ```
//!
//! The crate computes ground states and their action thresholds, classifies
//! initial data into the scattering and blow-up regions below threshold, and
//! checks the predictions dynamically with a mass-conserving split-step
//! integrator and virial diagnostics.
//!
//! Modules, bottom up:
//!
//! - [`grid`]: uniform symmetric grids, discrete norms, the Hamiltonian `H_γ`.
//! - [`groundstate`]: closed-form `Q_{ω,γ}` and the thresholds `l_ω`, `n_ω`, `r_ω`.
//! - [`functionals`]: `M`, `E`, `S_ω`, `P`, `I_ω`, `K^{α,β}`, `J^{α,β}` and the scaling flow.
//! - [`classifier`]: fixed-frequency, radial and frequency-free region tests.
//! - [`evolution`]: Strang splitting with Crank–Nicolson, verdicts, scattering residual.
//! - [`diagnostics`]: virial weights and identity, exterior mass, drift reports.
//! - [`verify`]: the acceptance battery as a deterministic JSON report.
//! - [`cli`]: configuration, subcommands and file output for the `delta-nls` binary.
//!
//! Each capability has a runnable example under `examples/`:
//!
//! | example | shows |
//! |---|---|
//! | `ground_state_thresholds` | profiles, threshold structure, scaling law |
//! | `classify_scaling_ray` | regions along `λ Q_{ω,γ}`, radial vs non-radial |
//! | `frequency_free_criterion` | `E M^σ` test and the optimal frequency |
//! | `standing_wave` | conservation and phase of `e^{iωt}Q` |
//! | `dichotomy_sweep` | dispersal below, blow-up above the soliton |
//! | `virial_monitor` | virial identity and exterior-mass bound |
//! | `scattering_residual` | Cauchy decay of `e^{itH}u(t)` for small data |
//! | `campaign` | classify-then-evolve sweep with a confusion table |

// `!(x > 0.0)` is how validation rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod functionals;
pub mod grid;
pub mod groundstate;
pub mod initial_data;
mod quadrature;
mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction, Params};
