//! Distributions induced by screening pairs on their minimum p-value:
//! per-type selection probabilities, the conditional CDF of the maximum
//! given selection, the expected selected-set size, and the exact
//! distribution of the selected-set size.

use crate::error::{Error, Result};
use crate::probmodel::AltModel;

/// Exact selected-size distributions are computed up to this many pairs;
/// larger problems fall back to expected-size plug-ins.
pub const EXACT_PMF_CAP: usize = 10_000;

/// Truth state of a hypothesis pair. The two mixed states (exactly one
/// component false) are merged; they behave symmetrically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairType {
    /// Both component hypotheses true: two uniform p-values.
    BothNull,
    /// Exactly one component false; the union hypothesis is still true.
    OneNonNull,
    /// Both components false: the discoveries of interest.
    BothNonNull,
}

/// Proportions of the three pair states in the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisMix {
    pi0: f64,
    pi1: f64,
    pi2: f64,
}

impl HypothesisMix {
    /// Proportions of both-null, one-non-null and both-non-null pairs.
    /// Each must lie in [0,1] and they must sum to 1 within 1e-12.
    pub fn new(pi0: f64, pi1: f64, pi2: f64) -> Result<Self> {
        let ok = [pi0, pi1, pi2]
            .iter()
            .all(|p| p.is_finite() && (0.0..=1.0).contains(p));
        if !ok || ((pi0 + pi1 + pi2) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMix { pi0, pi1, pi2 });
        }
        Ok(Self { pi0, pi1, pi2 })
    }

    /// A family consisting of a single pair state.
    pub fn pure(state: PairType) -> Self {
        match state {
            PairType::BothNull => Self { pi0: 1.0, pi1: 0.0, pi2: 0.0 },
            PairType::OneNonNull => Self { pi0: 0.0, pi1: 1.0, pi2: 0.0 },
            PairType::BothNonNull => Self { pi0: 0.0, pi1: 0.0, pi2: 1.0 },
        }
    }

    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    pub fn pi1(&self) -> f64 {
        self.pi1
    }

    pub fn pi2(&self) -> f64 {
        self.pi2
    }

    /// Deterministic integer counts for a family of `m` pairs:
    /// `m0 = round(m·π0)`, `m2 = round(m·π2)`, `m1 = m - m0 - m2`.
    /// Rounding is half-away-from-zero; if the two rounds overshoot, the
    /// both-non-null count absorbs the excess so the total stays `m`.
    pub fn type_counts(&self, m: usize) -> (usize, usize, usize) {
        let m0 = ((m as f64 * self.pi0).round() as usize).min(m);
        let m2 = ((m as f64 * self.pi2).round() as usize).min(m - m0);
        (m0, m - m0 - m2, m2)
    }
}

/// Distribution of the selected-set size |S|, indexed 0..=m.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedSizeDistribution {
    pmf: Vec<f64>,
}

impl SelectedSizeDistribution {
    /// Probability mass at each size 0..=m.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Largest possible size, i.e. the number of pairs m.
    pub fn max_size(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(s, p)| s as f64 * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.pmf
            .iter()
            .enumerate()
            .map(|(s, p)| (s as f64 - mean).powi(2) * p)
            .sum()
    }
}

fn check_unit_interval(name: &'static str, v: f64, open_at_zero: bool) -> Result<()> {
    let ok = if open_at_zero {
        v > 0.0 && v <= 1.0
    } else {
        (0.0..=1.0).contains(&v)
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            bounds: if open_at_zero { "(0, 1]" } else { "[0, 1]" },
            value: v,
        })
    }
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain {
            name: "m",
            bounds: "[1, ∞)",
            value: 0.0,
        });
    }
    Ok(())
}

// Marginal p-value CDFs of the two components of a pair, evaluated at t.
fn component_cdfs(t: f64, pair_type: PairType, model: &AltModel) -> Result<(f64, f64)> {
    Ok(match pair_type {
        PairType::BothNull => (t, t),
        PairType::OneNonNull => (model.cdf1(t)?, t),
        PairType::BothNonNull => (model.cdf1(t)?, model.cdf2(t)?),
    })
}

/// Probability that a pair of the given type passes screening at threshold
/// `c`, i.e. that its minimum p-value is at most `c`.
///
/// Both-null pairs: `c(2-c)`. One-non-null: `c + F(c) - cF(c)`.
/// Both-non-null: `1 - (1-F1(c))(1-F2(c))`.
pub fn selection_prob(c: f64, pair_type: PairType, model: &AltModel) -> Result<f64> {
    check_unit_interval("c", c, false)?;
    let (g1, g2) = component_cdfs(c, pair_type, model)?;
    // 1 - (1-g1)(1-g2), in a form with no cancellation
    Ok(g1 + g2 * (1.0 - g1))
}

/// CDF of the maximum p-value of a pair conditional on its minimum passing
/// the screening threshold: `Pr(max ≤ u | min ≤ c)`.
///
/// The expression is piecewise in `u` with the switch exactly at `u = c`.
/// For a one-non-null pair this is the conditional null p-value `P0(u, c)`
/// that drives every FWER calculation; the both-non-null case replaces the
/// uniform component with the non-null CDF and feeds the power oracle.
pub fn cond_max_cdf(u: f64, c: f64, pair_type: PairType, model: &AltModel) -> Result<f64> {
    check_unit_interval("u", u, true)?;
    check_unit_interval("c", c, true)?;
    let (g1c, g2c) = component_cdfs(c, pair_type, model)?;
    let num = if u <= c {
        let (g1u, g2u) = component_cdfs(u, pair_type, model)?;
        g1u * g2u
    } else {
        let (g1u, g2u) = component_cdfs(u, pair_type, model)?;
        g1c * g2u + g2c * g1u - g1c * g2c
    };
    let den = g1c + g2c * (1.0 - g1c);
    Ok(num / den)
}

/// Expected selected-set size `E|S(c)|` for a family of `m` pairs.
pub fn expected_selected(c: f64, mix: &HypothesisMix, model: &AltModel, m: usize) -> Result<f64> {
    check_unit_interval("c", c, false)?;
    check_m(m)?;
    let s0 = selection_prob(c, PairType::BothNull, model)?;
    let s1 = selection_prob(c, PairType::OneNonNull, model)?;
    let s2 = selection_prob(c, PairType::BothNonNull, model)?;
    Ok(m as f64 * (mix.pi0 * s0 + mix.pi1 * s1 + mix.pi2 * s2))
}

/// Exact distribution of the selected-set size: the convolution of three
/// independent binomials, one per pair type, with counts from
/// [`HypothesisMix::type_counts`]. Only available for `m ≤ EXACT_PMF_CAP`.
pub fn selected_size_pmf(
    c: f64,
    mix: &HypothesisMix,
    model: &AltModel,
    m: usize,
) -> Result<SelectedSizeDistribution> {
    check_m(m)?;
    if m > EXACT_PMF_CAP {
        return Err(Error::ExactPmfCap { m, cap: EXACT_PMF_CAP });
    }
    check_unit_interval("c", c, false)?;
    let counts = mix.type_counts(m);
    let pmf = size_pmf_for_counts(c, counts, model)?;
    Ok(SelectedSizeDistribution { pmf })
}

// Selected-size pmf for explicit per-type counts (used by the power
// calculation, which excludes the designated pair from the family).
pub(crate) fn size_pmf_for_counts(
    c: f64,
    (m0, m1, m2): (usize, usize, usize),
    model: &AltModel,
) -> Result<Vec<f64>> {
    let mut pmf = vec![1.0];
    for (n, pair_type) in [
        (m0, PairType::BothNull),
        (m1, PairType::OneNonNull),
        (m2, PairType::BothNonNull),
    ] {
        if n > 0 {
            let p = selection_prob(c, pair_type, model)?;
            pmf = convolve(&pmf, &binomial_pmf(n, p));
        }
    }
    Ok(pmf)
}

// Binomial pmf via log-space evaluation; stable for n up to the cap even
// when (1-p)^n underflows.
fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    debug_assert!((0.0..=1.0).contains(&p));
    if p == 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    if p == 1.0 {
        let mut v = vec![0.0; n + 1];
        v[n] = 1.0;
        return v;
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let mut ln_fact = vec![0.0; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    (0..=n)
        .map(|k| {
            (ln_fact[n] - ln_fact[k] - ln_fact[n - k]
                + k as f64 * ln_p
                + (n - k) as f64 * ln_q)
                .exp()
        })
        .collect()
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}
