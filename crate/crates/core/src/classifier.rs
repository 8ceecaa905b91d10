//! Region classification of initial data below the ground-state thresholds.
//!
//! At fixed frequency a state lies below threshold when `S_ω(f) < m_ω`, with
//! `m_ω = n_ω` in general and `m_ω = r_ω` for even data. Below threshold
//! the sign of `P` picks the scattering side (`P ≥ 0`) or the blow-up side.
//! The frequency-free test compares `E(f) M(f)^σ` with the same product for
//! the free ground state `Q_{1,0}`, and is equivalent to the fixed-frequency
//! test at the optimal frequency `ω₀(f)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{report_from, sigma, FunctionalReport, Primitives, ScalingPair};
use crate::grid::{GridFunction, Params};
use crate::groundstate::{threshold_l, threshold_scaling_exponent, GroundState, Thresholds};

/// Relative size below which a functional value counts as zero, and so on
/// the nonnegative side.
pub const SIGN_TIE_TOLERANCE: f64 = 1e-10;

/// Max-norm tolerance for treating grid data as even.
pub const RADIAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    ScatterPlus,
    BlowupMinus,
    AboveThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    FixedOmega { omega: f64 },
    FrequencyFree,
    Radial { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    NonNegative,
    Negative,
}

impl Sign {
    /// Sign with the tie rule `|value| ≤ 1e-10·scale ⇒ NonNegative`.
    pub fn of(value: f64, scale: f64) -> Sign {
        if value >= 0.0 || value.abs() <= SIGN_TIE_TOLERANCE * scale.abs() {
            Sign::NonNegative
        } else {
            Sign::Negative
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub region: Region,
    pub mode: Mode,
    pub threshold_used: f64,
    /// `S_ω(f)` at fixed frequency, `E(f)M(f)^σ` in frequency-free mode.
    pub value: f64,
    pub margin: f64,
    pub p_value: f64,
    pub p_sign: Sign,
    pub i_value: f64,
    pub i_sign: Sign,
    /// Frequency at which `S_ω` and `I_ω` were evaluated.
    pub omega: f64,
}

fn region_for(margin: f64, p_sign: Sign) -> Region {
    if margin > 0.0 {
        match p_sign {
            Sign::NonNegative => Region::ScatterPlus,
            Sign::Negative => Region::BlowupMinus,
        }
    } else {
        Region::AboveThreshold
    }
}

fn check_radial(f: &GridFunction) -> Result<()> {
    let defect = f.evenness_defect();
    if defect > RADIAL_TOLERANCE {
        return Err(Error::SymmetryViolation { max_defect: defect, tolerance: RADIAL_TOLERANCE });
    }
    Ok(())
}

pub fn is_radial(f: &GridFunction) -> bool {
    f.evenness_defect() <= RADIAL_TOLERANCE
}

/// Fixed-frequency classification against `n_ω`, or `r_ω` when `radial`.
pub fn classify_fixed_omega(f: &GridFunction, params: &Params, radial: bool) -> Result<ClassificationResult> {
    let thresholds = Thresholds::compute(*params);
    classify_fixed_omega_with(f, params, radial, &thresholds)
}

/// As [`classify_fixed_omega`] with precomputed thresholds.
pub fn classify_fixed_omega_with(
    f: &GridFunction,
    params: &Params,
    radial: bool,
    thresholds: &Thresholds,
) -> Result<ClassificationResult> {
    if radial {
        check_radial(f)?;
    }
    let q = Primitives::of(f, params.p);
    Ok(classify_primitives(&q, params, radial, thresholds))
}

fn classify_primitives(q: &Primitives, params: &Params, radial: bool, thresholds: &Thresholds) -> ClassificationResult {
    let r = report_from(q, params);
    let threshold = thresholds.m_omega(radial);
    let margin = threshold - r.action;
    let p_sign = Sign::of(r.virial, r.calh_norm_sq);
    ClassificationResult {
        region: region_for(margin, p_sign),
        mode: if radial {
            Mode::Radial { omega: params.omega }
        } else {
            Mode::FixedOmega { omega: params.omega }
        },
        threshold_used: threshold,
        value: r.action,
        margin,
        p_value: r.virial,
        p_sign,
        i_value: r.nehari,
        i_sign: Sign::of(r.nehari, r.calh_norm_sq),
        omega: params.omega,
    }
}

/// Potential-free reference quantities at `ω = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyFreeConstants {
    pub p: f64,
    pub sigma: f64,
    /// `l_1 = S_{1,0}(Q_{1,0})`.
    pub l1: f64,
    /// `E₀(Q_{1,0}) M(Q_{1,0})^σ`.
    pub energy_mass_product: f64,
}

impl FrequencyFreeConstants {
    pub fn compute(p: f64) -> Result<Self> {
        let sigma = sigma(p)?;
        let free = Params { gamma: 0.0, p, omega: 1.0 };
        let i = GroundState::free(1.0, p).integrals();
        Ok(FrequencyFreeConstants {
            p,
            sigma,
            l1: i.action(free),
            energy_mass_product: i.energy(free) * i.mass().powf(sigma),
        })
    }

    /// `((p−5)/(p+3)) (a l_1)^{2(p−1)/(p−5)}` with `a = (p+3)/(2(p−1))`,
    /// the closed form the product must equal.
    pub fn closed_form(&self) -> f64 {
        let p = self.p;
        let a = threshold_scaling_exponent(p);
        (p - 5.0) / (p + 3.0) * (a * self.l1).powf(2.0 * (p - 1.0) / (p - 5.0))
    }

    /// `ω₀ = (M / (a l_1))^{−2(p−1)/(p−5)}`.
    pub fn optimal_omega(&self, mass: f64) -> f64 {
        let p = self.p;
        let a = threshold_scaling_exponent(p);
        (mass / (a * self.l1)).powf(-2.0 * (p - 1.0) / (p - 5.0))
    }
}

/// The frequency that maximizes `l_ω − S_ω(f)`.
pub fn optimal_omega(f: &GridFunction, params: &Params) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::invalid("optimal omega is undefined for zero data"));
    }
    let c = FrequencyFreeConstants::compute(params.p)?;
    let mass = 0.5 * crate::grid::l2_norm_sq(f);
    Ok(c.optimal_omega(mass))
}

/// Frequency-free classification by `E M^σ` against `E₀(Q_{1,0})M(Q_{1,0})^σ`.
pub fn classify_frequency_free(f: &GridFunction, params: &Params) -> Result<ClassificationResult> {
    let c = FrequencyFreeConstants::compute(params.p)?;
    Ok(classify_frequency_free_with(f, params, &c))
}

pub fn classify_frequency_free_with(
    f: &GridFunction,
    params: &Params,
    constants: &FrequencyFreeConstants,
) -> ClassificationResult {
    let q = Primitives::of(f, params.p);
    let mass = 0.5 * q.l2_sq;
    let omega = if mass > 0.0 { constants.optimal_omega(mass) } else { params.omega };
    let r = report_from(&q, &params.with_omega(omega));
    let value = r.energy * mass.powf(constants.sigma);
    let threshold = constants.energy_mass_product;
    let margin = threshold - value;
    let p_sign = Sign::of(r.virial, r.calh_norm_sq);
    ClassificationResult {
        region: region_for(margin, p_sign),
        mode: Mode::FrequencyFree,
        threshold_used: threshold,
        value,
        margin,
        p_value: r.virial,
        p_sign,
        i_value: r.nehari,
        i_sign: Sign::of(r.nehari, r.calh_norm_sq),
        omega,
    }
}

/// `K^{α,β}(f)` for one scaling pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSign {
    pub pair: ScalingPair,
    pub k: f64,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignEquivalenceReport {
    /// True when `S_ω(f) ≥ m_ω`; nothing was checked.
    pub skipped: bool,
    pub action: f64,
    pub threshold: f64,
    pub signs: Vec<PairSign>,
    /// All pairs share one sign class (vacuously true when skipped).
    pub consistent: bool,
}

/// Below threshold, the sign class of `K^{α,β}(f)` must not depend on the
/// scaling pair.
pub fn sign_equivalence_check(
    f: &GridFunction,
    params: &Params,
    pairs: &[ScalingPair],
    radial: bool,
) -> Result<SignEquivalenceReport> {
    let thresholds = Thresholds::compute(*params);
    sign_equivalence_check_with(f, params, pairs, radial, &thresholds)
}

pub fn sign_equivalence_check_with(
    f: &GridFunction,
    params: &Params,
    pairs: &[ScalingPair],
    radial: bool,
    thresholds: &Thresholds,
) -> Result<SignEquivalenceReport> {
    if radial {
        check_radial(f)?;
    }
    let q = Primitives::of(f, params.p);
    let r = report_from(&q, params);
    let threshold = thresholds.m_omega(radial);
    if r.action >= threshold {
        return Ok(SignEquivalenceReport {
            skipped: true,
            action: r.action,
            threshold,
            signs: Vec::new(),
            consistent: true,
        });
    }
    let signs: Vec<PairSign> = pairs
        .iter()
        .map(|sp| {
            let k = q.k(params, sp);
            PairSign { pair: *sp, k, sign: Sign::of(k, r.calh_norm_sq) }
        })
        .collect();
    let consistent = signs.windows(2).all(|w| w[0].sign == w[1].sign);
    Ok(SignEquivalenceReport { skipped: false, action: r.action, threshold, signs, consistent })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapBranch {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PGapReport {
    pub skipped: bool,
    pub action: f64,
    pub threshold: f64,
    pub virial: f64,
    pub calh_norm_sq: f64,
    /// `δ = (p−5)/(p+3)`.
    pub delta: f64,
    pub branch: Option<GapBranch>,
    /// The dichotomy holds with the nominal `δ`.
    pub holds: bool,
    /// `P/‖f‖²_𝓗` when the positive branch misses with the nominal `δ`.
    pub empirical_delta: Option<f64>,
    /// A miss severe enough to count as a failure: the negative branch
    /// missing, or an empirical `δ` below a tenth of the nominal one.
    pub hard_failure: bool,
}

/// `P ≥ min{2(m_ω − S_ω), δ‖f‖²_𝓗}` or `P ≤ −2(m_ω − S_ω)` below threshold.
pub fn p_gap_check(f: &GridFunction, params: &Params, radial: bool) -> Result<PGapReport> {
    let thresholds = Thresholds::compute(*params);
    p_gap_check_with(f, params, radial, &thresholds)
}

pub fn p_gap_check_with(
    f: &GridFunction,
    params: &Params,
    radial: bool,
    thresholds: &Thresholds,
) -> Result<PGapReport> {
    if radial {
        check_radial(f)?;
    }
    let r: FunctionalReport = report_from(&Primitives::of(f, params.p), params);
    let threshold = thresholds.m_omega(radial);
    let delta = (params.p - 5.0) / (params.p + 3.0);
    let mut out = PGapReport {
        skipped: true,
        action: r.action,
        threshold,
        virial: r.virial,
        calh_norm_sq: r.calh_norm_sq,
        delta,
        branch: None,
        holds: true,
        empirical_delta: None,
        hard_failure: false,
    };
    if r.action >= threshold {
        return Ok(out);
    }
    out.skipped = false;
    let gap = threshold - r.action;
    match Sign::of(r.virial, r.calh_norm_sq) {
        Sign::NonNegative => {
            out.branch = Some(GapBranch::Positive);
            let bound = (2.0 * gap).min(delta * r.calh_norm_sq);
            if r.virial < bound {
                out.holds = false;
                let emp = if r.calh_norm_sq > 0.0 { r.virial / r.calh_norm_sq } else { 0.0 };
                out.empirical_delta = Some(emp);
                out.hard_failure = emp < 0.1 * delta;
            }
        }
        Sign::Negative => {
            out.branch = Some(GapBranch::Negative);
            if r.virial > -2.0 * gap {
                out.holds = false;
                out.hard_failure = true;
            }
        }
    }
    Ok(out)
}

/// `l_ω − S_ω(f)` for a frequency sweep, used to cross-check [`optimal_omega`].
pub fn threshold_margin_sweep(f: &GridFunction, params: &Params, omegas: &[f64]) -> Vec<f64> {
    let q = Primitives::of(f, params.p);
    let l1 = threshold_l(1.0, params.p);
    let a = threshold_scaling_exponent(params.p);
    omegas
        .iter()
        .map(|&w| w.powf(a) * l1 - report_from(&q, &params.with_omega(w)).action)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Grid};
    use approx::assert_relative_eq;

    fn params() -> Params {
        Params { gamma: -1.0, p: 7.0, omega: 1.0 }
    }

    fn grid() -> Grid {
        make_grid(20.0, 8001).unwrap()
    }

    fn soliton(lambda: f64) -> GridFunction {
        GroundState::delta(params()).unwrap().sample(grid()).scaled(lambda)
    }

    #[test]
    fn scaled_soliton_regions() {
        let r = classify_fixed_omega(&soliton(0.9), &params(), true).unwrap();
        assert_eq!(r.region, Region::ScatterPlus);
        assert_eq!(r.i_sign, Sign::NonNegative);
        let r = classify_fixed_omega(&soliton(1.1), &params(), true).unwrap();
        assert_eq!(r.region, Region::BlowupMinus);
        let tiny = soliton(1e-4);
        assert_eq!(classify_fixed_omega(&tiny, &params(), false).unwrap().region, Region::ScatterPlus);
    }

    #[test]
    fn radial_flag_rejects_odd_data() {
        let f = GridFunction::from_real_fn(grid(), |x| x * (-x * x).exp());
        let err = classify_fixed_omega(&f, &params(), true).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation { .. }));
    }

    #[test]
    fn radial_threshold_is_larger() {
        // λ slightly below 1: S between n_ω and r_ω
        let f = soliton(0.97);
        let non_radial = classify_fixed_omega(&f, &params(), false).unwrap();
        let radial = classify_fixed_omega(&f, &params(), true).unwrap();
        assert_eq!(non_radial.region, Region::AboveThreshold);
        assert_eq!(radial.region, Region::ScatterPlus);
    }

    #[test]
    fn zero_data_is_scatter_plus() {
        let z = GridFunction::zeros(grid());
        assert_eq!(classify_frequency_free(&z, &params()).unwrap().region, Region::ScatterPlus);
        assert!(optimal_omega(&z, &params()).is_err());
    }

    #[test]
    fn optimal_omega_power_law() {
        let c = FrequencyFreeConstants::compute(7.0).unwrap();
        let a = threshold_scaling_exponent(7.0);
        assert_relative_eq!(c.optimal_omega(a * c.l1), 1.0, max_relative = 1e-14);
        let ratio = c.optimal_omega(2.0 * a * c.l1) / c.optimal_omega(a * c.l1);
        assert_relative_eq!(ratio, 1.0 / 64.0, max_relative = 1e-13);
    }

    #[test]
    fn frequency_free_constant_closed_form() {
        let c = FrequencyFreeConstants::compute(7.0).unwrap();
        assert_relative_eq!(c.energy_mass_product, c.closed_form(), max_relative = 1e-12);
        assert_relative_eq!(c.energy_mass_product, 0.047_501_414_182_844_69, max_relative = 1e-12);
    }

    #[test]
    fn sign_equivalence_on_soliton_scalings() {
        let pairs = crate::functionals::standard_pairs();
        let r = sign_equivalence_check(&soliton(0.9), &params(), &pairs, true).unwrap();
        assert!(!r.skipped && r.consistent);
        assert!(r.signs.iter().all(|s| s.sign == Sign::NonNegative));
        let r = sign_equivalence_check(&soliton(1.1), &params(), &pairs, true).unwrap();
        assert!(!r.skipped && r.consistent);
        assert!(r.signs.iter().all(|s| s.sign == Sign::Negative));
        let r = sign_equivalence_check(&soliton(1.0), &params(), &pairs, false).unwrap();
        assert!(r.skipped);
    }

    #[test]
    fn p_gap_on_soliton_scalings() {
        for lambda in [0.5, 0.9, 1.1, 1.3] {
            let r = p_gap_check(&soliton(lambda), &params(), true).unwrap();
            assert!(!r.skipped, "lambda {lambda}");
            assert!(r.holds, "lambda {lambda}: {r:?}");
        }
    }
}
