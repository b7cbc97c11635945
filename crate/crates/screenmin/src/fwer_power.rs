//! Finite-sample FWER of the screen-then-test procedure at a fixed
//! selection threshold, its expected-size plug-in approximation, and the
//! probability of rejecting a false union hypothesis.

use crate::error::{Error, Result};
use crate::probmodel::AltModel;
use crate::screening::{
    cond_max_cdf, expected_selected, selected_size_pmf, size_pmf_for_counts, HypothesisMix,
    PairType, EXACT_PMF_CAP,
};

/// Everything worth knowing about one selection threshold: the FWER bound,
/// its plug-in approximation, the power, and the expected selected size.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPowerReport {
    pub c: f64,
    pub alpha: f64,
    /// Exact-distribution upper bound; `None` above the exact-pmf cap.
    pub fwer_bound: Option<f64>,
    /// Expected-size plug-in approximation of the bound.
    pub fwer_approx: f64,
    /// Probability of rejecting a false union hypothesis.
    pub power: f64,
    pub expected_selected: f64,
    /// False when the size cap forced the power onto the plug-in path.
    pub exact: bool,
}

impl ErrorPowerReport {
    /// Evaluate all threshold diagnostics at once. Uses the exact
    /// selected-size distribution when `m` permits, the expected-size
    /// plug-in otherwise.
    pub fn evaluate(
        c: f64,
        alpha: f64,
        mix: &HypothesisMix,
        model: &AltModel,
        m: usize,
    ) -> Result<Self> {
        let exact = m <= EXACT_PMF_CAP;
        let fwer_bound = if exact {
            Some(fwer_upper_bound(c, alpha, mix, model, m)?)
        } else {
            None
        };
        Ok(Self {
            c,
            alpha,
            fwer_bound,
            fwer_approx: fwer_approx(c, alpha, mix, model, m)?,
            power: power_unconditional(c, alpha, mix, model, m)?,
            expected_selected: expected_selected(c, mix, model, m)?,
            exact,
        })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "alpha",
            bounds: "(0, 1)",
            value: alpha,
        })
    }
}

// 1 - (1 - per)^count for a real count, via expm1/ln_1p.
#[inline]
fn prob_any(per: f64, count: f64) -> f64 {
    if per >= 1.0 {
        1.0
    } else {
        -(count * (-per).ln_1p()).exp_m1()
    }
}

/// Upper bound on the familywise error rate of the fixed-threshold
/// procedure: the expectation over the selected-set size of
/// `1 - (1 - P0(α/s, c))^s` on `s > 0`, where `P0` is the conditional
/// null CDF of a one-non-null pair.
///
/// The bound treats every selected hypothesis as if it were one-non-null;
/// it is the exact FWER precisely when the family is all one-non-null
/// pairs. A family with no true union hypotheses cannot produce a false
/// rejection, so the bound is reported as zero there.
pub fn fwer_upper_bound(
    c: f64,
    alpha: f64,
    mix: &HypothesisMix,
    model: &AltModel,
    m: usize,
) -> Result<f64> {
    check_alpha(alpha)?;
    if mix.pi0() + mix.pi1() == 0.0 {
        return Ok(0.0);
    }
    let dist = selected_size_pmf(c, mix, model, m)?;
    let mut acc = 0.0;
    for (s, &w) in dist.pmf().iter().enumerate().skip(1) {
        if w == 0.0 {
            continue;
        }
        let p0 = cond_max_cdf(alpha / s as f64, c, PairType::OneNonNull, model)?;
        acc += w * prob_any(p0, s as f64);
    }
    Ok(acc)
}

/// Expected-size plug-in approximation of the FWER bound:
/// `1 - (1 - P0(α/E|S(c)|, c))^{E|S(c)|}` with the real-valued exponent
/// used as-is. When the implied testing threshold `α/E|S(c)|` reaches 1,
/// every selected true hypothesis is rejected and the value is 1.
pub fn fwer_approx(
    c: f64,
    alpha: f64,
    mix: &HypothesisMix,
    model: &AltModel,
    m: usize,
) -> Result<f64> {
    check_alpha(alpha)?;
    let e = expected_selected(c, mix, model, m)?;
    if e <= 0.0 {
        return Err(Error::NothingSelected { c });
    }
    let u = alpha / e;
    if u >= 1.0 {
        return Ok(1.0);
    }
    let p0 = cond_max_cdf(u, c, PairType::OneNonNull, model)?;
    Ok(prob_any(p0, e))
}

/// Probability that a false union hypothesis is selected and then passes
/// the Bonferroni test, for a selected-set size of `s`:
/// `F1(c)F2(α/s) + F2(c)F1(α/s) - F1(c)F2(c)` when `c·s ≤ α`, and
/// `F1(α/s)F2(α/s)` when `c·s > α`; zero when nothing is selected.
pub fn rejection_prob_conditional(
    s: usize,
    c: f64,
    alpha: f64,
    model: &AltModel,
) -> Result<f64> {
    check_alpha(alpha)?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain {
            name: "c",
            bounds: "(0, 1)",
            value: c,
        });
    }
    if s == 0 {
        return Ok(0.0);
    }
    rejection_prob_at(s as f64, c, alpha, model)
}

// Same rejection probability with a real-valued size (plug-in path).
fn rejection_prob_at(s: f64, c: f64, alpha: f64, model: &AltModel) -> Result<f64> {
    if s <= 0.0 {
        return Ok(0.0);
    }
    let x = (alpha / s).min(1.0);
    let f1c = model.cdf1(c)?;
    let f2c = model.cdf2(c)?;
    let f1x = model.cdf1(x)?;
    let f2x = model.cdf2(x)?;
    if c * s <= alpha {
        Ok(f1c * f2x + f2c * f1x - f1c * f2c)
    } else {
        Ok(f1x * f2x)
    }
}

/// Probability of rejecting a designated false union hypothesis under the
/// fixed-threshold procedure.
///
/// The designated pair contributes one to the selected-set size whenever it
/// is rejected, so the expectation runs over the selected count among the
/// other `m - 1` pairs: `E_K[ r(1 + K) ]` with `r` the conditional
/// rejection probability. For a single both-non-null pair this collapses to
/// the joint probability `Pr(min ≤ c, max ≤ α)`. Above the exact-pmf cap
/// the expected size is plugged in instead. Zero when the family holds no
/// both-non-null pairs.
pub fn power_unconditional(
    c: f64,
    alpha: f64,
    mix: &HypothesisMix,
    model: &AltModel,
    m: usize,
) -> Result<f64> {
    check_alpha(alpha)?;
    if mix.pi2() == 0.0 {
        return Ok(0.0);
    }
    if m > EXACT_PMF_CAP {
        let e = expected_selected(c, mix, model, m)?;
        return rejection_prob_at(e, c, alpha, model);
    }
    let (m0, m1, m2) = mix.type_counts(m);
    if m2 == 0 {
        return Ok(0.0);
    }
    let others = size_pmf_for_counts(c, (m0, m1, m2 - 1), model)?;
    let mut acc = 0.0;
    for (k, &w) in others.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        acc += w * rejection_prob_at((k + 1) as f64, c, alpha, model)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probmodel::alt_cdf;

    fn snr(s: f64) -> AltModel {
        AltModel::new(s).unwrap()
    }

    fn one_nonnull() -> HypothesisMix {
        HypothesisMix::pure(PairType::OneNonNull)
    }

    #[test]
    fn exact_fwer_of_the_ten_pair_family() {
        // all pairs one-non-null, snr 2, default threshold: the bound is
        // the exact FWER and exceeds the nominal level
        let fwer = fwer_upper_bound(0.005, 0.05, &one_nonnull(), &snr(2.0), 10).unwrap();
        assert!((fwer - 0.0545208432196668).abs() <= 1e-9);
        assert!(fwer > 0.05);
    }

    #[test]
    fn bound_is_zero_without_true_union_hypotheses() {
        let mix = HypothesisMix::pure(PairType::BothNonNull);
        let fwer = fwer_upper_bound(0.01, 0.05, &mix, &snr(2.0), 25).unwrap();
        assert_eq!(fwer, 0.0);
    }

    #[test]
    fn bound_at_m_one_equals_joint_cdf() {
        // single pair: Pr(min ≤ c, max ≤ α) = cF(α) + αF(c) - cF(c)
        let (c, alpha) = (0.005, 0.05);
        let model = snr(2.0);
        let fwer = fwer_upper_bound(c, alpha, &one_nonnull(), &model, 1).unwrap();
        let fc = alt_cdf(c, &model).unwrap();
        let fa = alt_cdf(alpha, &model).unwrap();
        let joint = c * fa + alpha * fc - c * fc;
        assert!((fwer - joint).abs() <= 1e-14);
    }

    #[test]
    fn approx_tracks_the_exact_bound() {
        let approx = fwer_approx(0.005, 0.05, &one_nonnull(), &snr(2.0), 10).unwrap();
        assert!((approx - 0.0569995833255961).abs() <= 1e-9);
        assert!((approx - 0.0545208432196668).abs() <= 0.01);
    }

    #[test]
    fn approx_reduces_to_p0_at_unit_expected_size() {
        // both-null family of two with c(2-c) = 1/2 makes E|S| exactly 1
        let c = 1.0 - 0.5_f64.sqrt();
        let mix = HypothesisMix::pure(PairType::BothNull);
        let model = AltModel::null();
        let e = expected_selected(c, &mix, &model, 2).unwrap();
        assert!((e - 1.0).abs() <= 1e-12);
        let approx = fwer_approx(c, 0.05, &mix, &model, 2).unwrap();
        let p0 = cond_max_cdf(0.05, c, PairType::OneNonNull, &model).unwrap();
        assert!((approx - p0).abs() <= 1e-12);
    }

    #[test]
    fn approx_rejects_zero_threshold() {
        let err = fwer_approx(0.0, 0.05, &one_nonnull(), &snr(2.0), 10);
        assert!(matches!(err, Err(Error::NothingSelected { .. })));
    }

    #[test]
    fn rejection_prob_zero_when_nothing_selected() {
        assert_eq!(
            rejection_prob_conditional(0, 0.01, 0.05, &snr(2.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn rejection_prob_null_model_closed_form() {
        // uniform components: 2c(α/s) - c² on the small-threshold branch
        let (s, c, alpha) = (3, 0.002, 0.05);
        let v = rejection_prob_conditional(s, c, alpha, &AltModel::null()).unwrap();
        let expect = 2.0 * c * (alpha / s as f64) - c * c;
        assert!((v - expect).abs() <= 1e-15);
    }

    #[test]
    fn rejection_prob_branches_are_continuous() {
        // at c·s = α both branch expressions coincide
        let (s, alpha) = (5, 0.05);
        let c = alpha / s as f64;
        let model = AltModel::asymmetric(2.0, 3.0).unwrap();
        let f1 = model.cdf1(c).unwrap();
        let f2 = model.cdf2(c).unwrap();
        let low_branch = f1 * f2 + f2 * f1 - f1 * f2;
        let high_branch = f1 * f2;
        assert!((low_branch - high_branch).abs() <= 1e-12);
        let v = rejection_prob_conditional(s, c, alpha, &model).unwrap();
        assert!((v - high_branch).abs() <= 1e-12);
    }

    #[test]
    fn rejection_prob_nonincreasing_in_s() {
        let model = snr(2.0);
        let mut prev = 1.0;
        for s in 1..200 {
            let v = rejection_prob_conditional(s, 0.005, 0.05, &model).unwrap();
            assert!(v <= prev + 1e-15, "increased at s = {s}");
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn power_zero_without_both_nonnull_pairs() {
        let mix = HypothesisMix::pure(PairType::BothNull);
        let p = power_unconditional(0.005, 0.05, &mix, &AltModel::null(), 10).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn power_at_m_one_is_the_joint_probability() {
        // c = α, single both-non-null pair: Pr(min ≤ α, max ≤ α) = F(α)²
        let alpha = 0.05;
        let mix = HypothesisMix::pure(PairType::BothNonNull);
        let model = snr(2.0);
        let p = power_unconditional(alpha, alpha, &mix, &model, 1).unwrap();
        let f = alt_cdf(alpha, &model).unwrap();
        assert!((p - f * f).abs() <= 1e-14);
    }

    #[test]
    fn power_is_a_probability_across_thresholds() {
        let mix = HypothesisMix::new(0.7, 0.25, 0.05).unwrap();
        let model = snr(2.0);
        let mut c = 0.0005;
        while c <= 0.05 {
            let p = power_unconditional(c, 0.05, &mix, &model, 100).unwrap();
            assert!((0.0..=1.0).contains(&p), "power {p} at c = {c}");
            c += 0.0005;
        }
    }

    #[test]
    fn report_bundles_everything() {
        let mix = HypothesisMix::new(0.7, 0.25, 0.05).unwrap();
        let model = snr(2.0);
        let report = ErrorPowerReport::evaluate(0.004, 0.05, &mix, &model, 100).unwrap();
        assert!(report.exact);
        assert!(report.fwer_bound.is_some());
        assert!(report.expected_selected > 0.0);
        let direct = fwer_approx(0.004, 0.05, &mix, &model, 100).unwrap();
        assert_eq!(report.fwer_approx, direct);
    }

    #[test]
    fn report_switches_to_plugin_above_cap() {
        let mix = HypothesisMix::new(0.7, 0.25, 0.05).unwrap();
        let model = snr(4.0);
        let report =
            ErrorPowerReport::evaluate(3e-5, 0.05, &mix, &model, EXACT_PMF_CAP + 10).unwrap();
        assert!(!report.exact);
        assert!(report.fwer_bound.is_none());
        assert!(report.power > 0.0);
    }
}
