//! Localized virial instrumentation, exterior mass and conservation reports.
//!
//! For a radial weight `φ(|x|)` and `I(t) = ∫φ|u|²`,
//!
//! ```text
//! I'  = Im ∫ ∂ₓ(φ) ū ∂ₓu
//! I'' = ∫φ''|∂ₓu|² − γφ''(0)|u(0)|² − ((p−1)/(p+1))∫φ''|u|^{p+1} − ¼∫φ⁗|u|²
//!     = 4P(u) + R₁ + R₂ + R₃
//! ```
//!
//! with `R₁ = ∫(φ''−2)|∂ₓu|²`, `R₂ = −((p−1)/(p+1))∫(φ''−2)|u|^{p+1}` and
//! `R₃ = −¼∫φ⁗|u|²`, all supported where `φ` is not `r²`.
//!
//! The cutoff weight is `r²` on `[0, R]`, a degree-8 polynomial on
//! `[R, 2R]` whose second derivative never exceeds 2, and a constant plateau
//! beyond `2R`. That keeps `R₁ ≤ 0` exactly. A weight that returns to zero
//! at `2R` cannot also satisfy `φ'' ≤ 2`, so the plateau is the closest
//! admissible shape; its measured constants are carried in
//! [`MeasuredBounds`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::TrajectoryRecord;
use crate::grid::{abs_pow, Grid, GridFunction, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `r²` on `[0, R]`, blended to a plateau on `[R, 2R]`.
    QuadraticCutoff,
    /// 0 on `[0, R/2]`, 1 on `[R, ∞)`, quintic smoothstep between.
    ExteriorStep,
}

/// `φ''` on the blend interval in the variable `s = (r − R)/R`.
/// Equal to `2(1 − S₅(s)) − 420 s³(1 − s)³`, with `S₅` the quintic smoothstep.
const CUTOFF_G: [f64; 7] = [2.0, 0.0, 0.0, -440.0, 1290.0, -1272.0, 420.0];

fn poly(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * s + k)
}

/// `[φ, φ', φ'', φ⁗]` at radius `r ≥ 0`.
pub fn weight_values(kind: WeightKind, radius: f64, r: f64) -> [f64; 4] {
    let big_r = radius;
    match kind {
        WeightKind::QuadraticCutoff => {
            if r <= big_r {
                return [r * r, 2.0 * r, 2.0, 0.0];
            }
            let s = ((r - big_r) / big_r).min(1.0);
            // ψ' = 2 + ∫g, ψ = 1 + 2s + ∫∫g
            let mut d1 = [0.0; 8];
            let mut d0 = [0.0; 9];
            d1[0] = 2.0;
            d0[0] = 1.0;
            d0[1] = 2.0;
            for (k, &c) in CUTOFF_G.iter().enumerate() {
                d1[k + 1] = c / (k + 1) as f64;
                d0[k + 2] = c / ((k + 1) * (k + 2)) as f64;
            }
            if r >= 2.0 * big_r {
                return [big_r * big_r * poly(&d0, 1.0), 0.0, 0.0, 0.0];
            }
            let g2: Vec<f64> = (2..CUTOFF_G.len()).map(|k| CUTOFF_G[k] * (k * (k - 1)) as f64).collect();
            [
                big_r * big_r * poly(&d0, s),
                big_r * poly(&d1, s),
                poly(&CUTOFF_G, s),
                poly(&g2, s) / (big_r * big_r),
            ]
        }
        WeightKind::ExteriorStep => {
            let half = 0.5 * big_r;
            if r <= half {
                return [0.0, 0.0, 0.0, 0.0];
            }
            if r >= big_r {
                return [1.0, 0.0, 0.0, 0.0];
            }
            let t = (r - half) / half;
            let k = 1.0 / half;
            [
                t * t * t * (10.0 - 15.0 * t + 6.0 * t * t),
                30.0 * t * t * (1.0 - t) * (1.0 - t) * k,
                60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) * k * k,
                (720.0 * t - 360.0) * k.powi(4),
            ]
        }
    }
}

/// Constants of a weight measured on a fine radial sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredBounds {
    pub sup_abs_phi2: f64,
    pub max_phi2: f64,
    pub min_phi2: f64,
    /// `sup|φ⁗| · R²`.
    pub sup_abs_phi4_r2: f64,
    /// `sup φ/r²` over `r > 0`.
    pub sup_phi_over_r2: f64,
    /// `sup φ' · R`.
    pub sup_phi1_r: f64,
    pub min_phi: f64,
    pub max_phi: f64,
}

fn measure(kind: WeightKind, radius: f64) -> MeasuredBounds {
    let n = 60_000;
    let mut b = MeasuredBounds {
        sup_abs_phi2: 0.0,
        max_phi2: f64::NEG_INFINITY,
        min_phi2: f64::INFINITY,
        sup_abs_phi4_r2: 0.0,
        sup_phi_over_r2: 0.0,
        sup_phi1_r: f64::NEG_INFINITY,
        min_phi: f64::INFINITY,
        max_phi: f64::NEG_INFINITY,
    };
    for i in 0..=n {
        let r = 3.0 * radius * i as f64 / n as f64;
        let [f, d1, d2, d4] = weight_values(kind, radius, r);
        b.sup_abs_phi2 = b.sup_abs_phi2.max(d2.abs());
        b.max_phi2 = b.max_phi2.max(d2);
        b.min_phi2 = b.min_phi2.min(d2);
        b.sup_abs_phi4_r2 = b.sup_abs_phi4_r2.max(d4.abs() * radius * radius);
        if r > 0.0 {
            b.sup_phi_over_r2 = b.sup_phi_over_r2.max(f / (r * r));
        }
        b.sup_phi1_r = b.sup_phi1_r.max(d1 * radius);
        b.min_phi = b.min_phi.min(f);
        b.max_phi = b.max_phi.max(f);
    }
    b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirialWeight {
    pub radius: f64,
    pub kind: WeightKind,
    pub grid: Grid,
    /// `φ(|x_j|)` at the nodes.
    pub phi: Vec<f64>,
    /// `φ'(|x_j|)`.
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub phi4: Vec<f64>,
    /// `φ''(|x|)` at the cell midpoints.
    pub phi2_mid: Vec<f64>,
    /// `∂ₓ[φ(|x|)] = sgn(x)φ'(|x|)` at the cell midpoints.
    pub dphi_mid: Vec<f64>,
    pub measured_bounds: MeasuredBounds,
}

pub fn build_virial_weight(grid: &Grid, radius: f64, kind: WeightKind) -> Result<VirialWeight> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("weight radius must be > 0, got {radius}")));
    }
    if 2.0 * radius > grid.half_width() {
        return Err(Error::DomainTooSmall { required: 2.0 * radius, available: grid.half_width() });
    }
    let n = grid.n_points();
    let mut phi = Vec::with_capacity(n);
    let mut phi1 = Vec::with_capacity(n);
    let mut phi2 = Vec::with_capacity(n);
    let mut phi4 = Vec::with_capacity(n);
    for x in grid.nodes() {
        let [a, b, c, d] = weight_values(kind, radius, x.abs());
        phi.push(a);
        phi1.push(b);
        phi2.push(c);
        phi4.push(d);
    }
    let h = grid.spacing();
    let mut phi2_mid = Vec::with_capacity(n - 1);
    let mut dphi_mid = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let xm = grid.x(j) + 0.5 * h;
        let [_, d1, d2, _] = weight_values(kind, radius, xm.abs());
        phi2_mid.push(d2);
        dphi_mid.push(xm.signum() * d1);
    }
    Ok(VirialWeight {
        radius,
        kind,
        grid: *grid,
        phi,
        phi1,
        phi2,
        phi4,
        phi2_mid,
        dphi_mid,
        measured_bounds: measure(kind, radius),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirialReport {
    pub i: f64,
    pub i_prime: f64,
    pub i_double_prime: f64,
    /// `4P(u)`.
    pub p_term: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    /// `−γ(φ''(0) − 2)|u(0)|²`, zero for a weight that is `r²` near 0.
    pub delta_boundary: f64,
    /// `−2γ Re{φ'(0) u(0) ∂ₓū(0)}`, identically zero since `φ'(0) = 0`.
    pub delta_derivative: f64,
    /// `I'' − (4P + R₁ + R₂ + R₃ + delta terms)`.
    pub residual: f64,
}

pub fn virial_report(u: &GridFunction, w: &VirialWeight, params: &Params) -> VirialReport {
    let grid = u.grid();
    assert_eq!(*grid, w.grid, "weight built for another grid");
    let Params { gamma, p, .. } = *params;
    let v = u.values();
    let h = grid.spacing();
    let n = v.len();
    let j0 = grid.center_index();
    let c_nl = (p - 1.0) / (p + 1.0);

    let mut i = 0.0;
    let mut lp = 0.0;
    let mut r2 = 0.0;
    let mut r3 = 0.0;
    let mut weighted_lp = 0.0;
    let mut weighted_l2_4 = 0.0;
    for j in 0..n {
        let wj = grid.weight(j);
        let m = v[j].norm_sqr();
        let q = abs_pow(m, p + 1.0);
        i += wj * w.phi[j] * m;
        lp += wj * q;
        weighted_lp += wj * w.phi2[j] * q;
        weighted_l2_4 += wj * w.phi4[j] * m;
        r2 += wj * (w.phi2[j] - 2.0) * q;
        r3 += wj * w.phi4[j] * m;
    }
    r2 *= -c_nl;
    r3 *= -0.25;

    let mut i_prime = 0.0;
    let mut grad = 0.0;
    let mut weighted_grad = 0.0;
    let mut r1 = 0.0;
    for j in 0..n - 1 {
        let d = v[j + 1] - v[j];
        let g = d.norm_sqr() / h;
        grad += g;
        weighted_grad += w.phi2_mid[j] * g;
        r1 += (w.phi2_mid[j] - 2.0) * g;
        i_prime += w.dphi_mid[j] * (v[j].conj() * v[j + 1]).im;
    }

    let u0 = v[j0];
    let phi2_0 = w.phi2[j0];
    let phi1_0 = w.phi1[j0];
    let du0 = (v[j0 + 1] - v[j0 - 1]) / (2.0 * h);
    let delta_derivative = -2.0 * gamma * (phi1_0 * u0 * du0.conj()).re;
    let delta_boundary = -gamma * (phi2_0 - 2.0) * u0.norm_sqr();
    let center = gamma * u0.norm_sqr();

    let i_double_prime = weighted_grad - phi2_0 * center - c_nl * weighted_lp - 0.25 * weighted_l2_4 + delta_derivative;
    let p_term = 4.0 * (0.5 * grad - 0.5 * center - (p - 1.0) / (2.0 * (p + 1.0)) * lp);
    let residual = i_double_prime - (p_term + r1 + r2 + r3 + delta_boundary + delta_derivative);
    VirialReport {
        i,
        i_prime,
        i_double_prime,
        p_term,
        r1,
        r2,
        r3,
        delta_boundary,
        delta_derivative,
        residual,
    }
}

/// `Σ_{|x_j| > R} w_j |u_j|²`.
pub fn exterior_mass(u: &GridFunction, radius: f64) -> f64 {
    let grid = u.grid();
    u.values()
        .iter()
        .enumerate()
        .filter(|(j, _)| grid.x(*j).abs() > radius)
        .map(|(j, v)| grid.weight(j) * v.norm_sqr())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorMassReport {
    pub radius: f64,
    pub eta0: f64,
    pub c0: f64,
    /// `η₀R/(8M(u)C₀)`.
    pub window_end: f64,
    pub initial_exterior_mass: f64,
    pub samples_checked: usize,
    pub samples_excluded: usize,
    /// Largest `ext(t) − ext(0)` inside the window.
    pub max_increase: f64,
    /// Largest amount by which `ext(t)` exceeds `ext(0) + η₀`; zero when
    /// the bound holds outright.
    pub max_slack: f64,
    pub holds: bool,
}

/// Exterior mass stays within `η₀` of its initial value for
/// `t ≤ η₀R/(8M C₀)`. Without `c0`, `C₀` is the sup of `‖∂u‖²` over the
/// window it defines.
pub fn exterior_mass_monitor(traj: &TrajectoryRecord, radius: f64, eta0: f64, c0: Option<f64>, slack: f64) -> Result<ExteriorMassReport> {
    if traj.samples.is_empty() {
        return Err(Error::invalid("empty trajectory"));
    }
    let exterior: Vec<f64> = if traj.snapshots.len() == traj.samples.len() {
        traj.snapshots.iter().map(|u| exterior_mass(u, radius)).collect()
    } else if traj.config.virial_radius == Some(radius) {
        traj.samples.iter().map(|s| s.exterior_mass.expect("recorded with radius")).collect()
    } else {
        return Err(Error::config(
            "exterior mass at this radius needs snapshots or a run recorded with the same virial_radius",
        ));
    };
    let mass = traj.samples[0].report.mass;
    let horizon = |c: f64| if mass > 0.0 && c > 0.0 { eta0 * radius / (8.0 * mass * c) } else { f64::INFINITY };
    let c0 = match c0 {
        Some(c) => c,
        None => {
            // smallest C₀ that bounds ‖∂u‖² on its own window
            let mut run = 0.0f64;
            for s in &traj.samples {
                let next = run.max(s.report.gradient_norm_sq);
                if s.time > horizon(next) {
                    break;
                }
                run = next;
            }
            run
        }
    };
    let window_end = horizon(c0);
    let e0 = exterior[0];
    let mut out = ExteriorMassReport {
        radius,
        eta0,
        c0,
        window_end,
        initial_exterior_mass: e0,
        samples_checked: 0,
        samples_excluded: 0,
        max_increase: 0.0,
        max_slack: 0.0,
        holds: true,
    };
    for (s, &e) in traj.samples.iter().zip(&exterior) {
        if s.time > window_end {
            out.samples_excluded += 1;
            continue;
        }
        out.samples_checked += 1;
        out.max_increase = out.max_increase.max(e - e0);
        out.max_slack = out.max_slack.max(e - (e0 + eta0));
    }
    out.holds = out.max_slack <= slack;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub times: Vec<f64>,
    pub mass_drift: Vec<f64>,
    pub energy_drift: Vec<f64>,
    pub max_mass_drift: f64,
    pub max_energy_drift: f64,
    /// False when the run used the sponge; drifts are then informational.
    pub conservative: bool,
}

pub fn conservation_report(traj: &TrajectoryRecord) -> ConservationReport {
    let m0 = traj.samples.first().map_or(0.0, |s| s.report.mass);
    let e0 = traj.samples.first().map_or(0.0, |s| s.report.energy);
    let mass_drift: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| if m0 > 0.0 { (s.report.mass - m0).abs() / m0 } else { s.report.mass.abs() })
        .collect();
    let energy_drift: Vec<f64> = traj.samples.iter().map(|s| (s.report.energy - e0).abs() / (e0.abs() + 1.0)).collect();
    ConservationReport {
        times: traj.times(),
        max_mass_drift: mass_drift.iter().copied().fold(0.0, f64::max),
        max_energy_drift: energy_drift.iter().copied().fold(0.0, f64::max),
        mass_drift,
        energy_drift,
        conservative: !traj.sponge_enabled(),
    }
}

/// Second differences of `I` at interior samples of a uniformly sampled
/// trajectory, paired with the assembled `I''` there.
pub fn virial_second_difference(traj: &TrajectoryRecord) -> Result<Vec<(f64, f64, f64)>> {
    let s = &traj.samples;
    let mut out = Vec::new();
    for k in 1..s.len().saturating_sub(1) {
        let (a, b, c) = (&s[k - 1], &s[k], &s[k + 1]);
        let (va, vb, vc) = match (a.virial, b.virial, c.virial) {
            (Some(x), Some(y), Some(z)) => (x, y, z),
            _ => return Err(Error::config("trajectory was recorded without virial_radius")),
        };
        let d1 = b.time - a.time;
        let d2 = c.time - b.time;
        if ((d1 - d2) / d1).abs() > 1e-9 {
            continue;
        }
        let fd = (va.i - 2.0 * vb.i + vc.i) / (d1 * d2);
        out.push((b.time, fd, vb.i_double_prime));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::groundstate::GroundState;
    use num_complex::Complex64;

    #[test]
    fn cutoff_weight_shape() {
        let r = 5.0;
        assert_eq!(weight_values(WeightKind::QuadraticCutoff, r, 0.0), [0.0, 0.0, 2.0, 0.0]);
        let at_2r = weight_values(WeightKind::QuadraticCutoff, r, 2.0 * r);
        assert!(at_2r[1].abs() < 1e-12 && at_2r[2].abs() < 1e-12 && at_2r[3].abs() < 1e-12);
        let far = weight_values(WeightKind::QuadraticCutoff, r, 3.0 * r);
        assert_eq!(&far[1..], &[0.0, 0.0, 0.0]);
        assert!((far[0] - at_2r[0]).abs() < 1e-12);
        // continuity of φ, φ' at R
        let inside = weight_values(WeightKind::QuadraticCutoff, r, r);
        let outside = weight_values(WeightKind::QuadraticCutoff, r, r * (1.0 + 1e-12));
        assert!((inside[0] - outside[0]).abs() < 1e-9);
        assert!((inside[1] - outside[1]).abs() < 1e-9);
    }

    #[test]
    fn cutoff_weight_bounds() {
        let b = measure(WeightKind::QuadraticCutoff, 4.0);
        assert!(b.max_phi2 <= 2.0 + 1e-12);
        assert!(b.min_phi >= 0.0);
        assert!(b.sup_phi_over_r2 <= 1.0 + 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for kind in [WeightKind::QuadraticCutoff, WeightKind::ExteriorStep] {
            let big_r = 3.0;
            for r in [1.7, 3.4, 4.5, 5.9] {
                let e = 1e-5;
                let f = |x| weight_values(kind, big_r, x);
                let d1 = (f(r + e)[0] - f(r - e)[0]) / (2.0 * e);
                let d2 = (f(r + e)[1] - f(r - e)[1]) / (2.0 * e);
                assert!((d1 - f(r)[1]).abs() < 1e-6, "{kind:?} r={r}");
                assert!((d2 - f(r)[2]).abs() < 1e-6, "{kind:?} r={r}");
                let e = 1e-3;
                let d4 = (f(r + e)[2] - 2.0 * f(r)[2] + f(r - e)[2]) / (e * e);
                assert!((d4 - f(r)[3]).abs() < 1e-3 * (1.0 + f(r)[3].abs()), "{kind:?} r={r}");
            }
        }
    }

    #[test]
    fn exterior_step_slope() {
        let g = make_grid(20.0, 4001).unwrap();
        let w = build_virial_weight(&g, 8.0, WeightKind::ExteriorStep).unwrap();
        assert!(w.phi1.iter().all(|&d| d <= 4.0 / 8.0));
        assert!(w.measured_bounds.sup_phi1_r <= 4.0);
        assert!(w.phi.iter().all(|&f| (0.0..=1.0).contains(&f)));
    }

    #[test]
    fn rejects_small_window() {
        let g = make_grid(10.0, 101).unwrap();
        assert!(matches!(
            build_virial_weight(&g, 6.0, WeightKind::QuadraticCutoff),
            Err(Error::DomainTooSmall { .. })
        ));
    }

    #[test]
    fn remainders_vanish_inside_radius() {
        let g = make_grid(20.0, 2001).unwrap();
        let w = build_virial_weight(&g, 8.0, WeightKind::QuadraticCutoff).unwrap();
        let u = GridFunction::from_fn(g, |x| {
            if x.abs() < 7.0 {
                Complex64::new((1.0 - x * x / 49.0).powi(3), 0.1 * x)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let prm = Params { gamma: -1.0, p: 7.0, omega: 1.0 };
        let r = virial_report(&u, &w, &prm);
        assert_eq!(r.r1, 0.0);
        assert_eq!(r.r2, 0.0);
        assert_eq!(r.r3, 0.0);
        assert_eq!(r.delta_derivative, 0.0);
        assert!(r.residual.abs() < 1e-12 * (1.0 + r.p_term.abs()));
    }

    #[test]
    fn ground_state_virial_is_small() {
        let g = make_grid(40.0, 16001).unwrap();
        let prm = Params { gamma: -1.0, p: 7.0, omega: 1.0 };
        let q = GroundState::delta(prm).unwrap().sample(g);
        let w = build_virial_weight(&g, 10.0, WeightKind::QuadraticCutoff).unwrap();
        let r = virial_report(&q, &w, &prm);
        assert!(r.i_double_prime.abs() < 1e-4, "{r:?}");
        assert!(r.r1 <= 0.0);
    }

    #[test]
    fn exterior_mass_examples() {
        let g = make_grid(20.0, 4001).unwrap();
        let q = GroundState::free(1.0, 7.0).sample(g);
        assert!(exterior_mass(&q, 10.0) < 1e-8);
        let c = GridFunction::from_real_fn(g, |_| 0.5);
        // c²·L, up to the node at exactly |x| = R being excluded
        assert!((exterior_mass(&c, 10.0) - 0.25 * 20.0).abs() <= 0.25 * g.spacing() + 1e-12);
        let mut prev = f64::INFINITY;
        for r in [1.0, 2.0, 5.0, 9.0] {
            let e = exterior_mass(&c, r);
            assert!(e <= prev);
            prev = e;
        }
    }
}
