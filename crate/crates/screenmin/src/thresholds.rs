//! Selection-threshold computation: the default `α/m`, fixed thresholds,
//! three oracle solvers for the power-maximizing threshold under the FWER
//! constraint, and the data-adaptive threshold whose selection and testing
//! thresholds coincide.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fwer_power::{fwer_approx, power_unconditional};
use crate::probmodel::AltModel;
use crate::screening::{cond_max_cdf, expected_selected, HypothesisMix, PairType};

/// Which equation the oracle solver targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleMethod {
    /// Smallest threshold where the expected-size FWER approximation stays
    /// at or below the nominal level from there on.
    Constraint,
    /// Root of `P0(α/E|S(c)|, c) = α/E|S(c)|`: the first-order form of the
    /// constraint boundary.
    FirstOrder,
    /// Root of `c·E|S(c)| = α`, the product rule; the left side is strictly
    /// increasing so the root is unique.
    Product,
}

/// How a threshold was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdMethod {
    Default,
    Fixed,
    OracleConstraint,
    OracleFirstOrder,
    OracleProduct,
    Adaptive,
    /// Select-everything baseline used by the max-p-value Bonferroni test.
    Bonferroni,
}

impl ThresholdMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThresholdMethod::Default => "default",
            ThresholdMethod::Fixed => "fixed",
            ThresholdMethod::OracleConstraint => "oracle_constraint",
            ThresholdMethod::OracleFirstOrder => "oracle_first_order",
            ThresholdMethod::OracleProduct => "oracle_product",
            ThresholdMethod::Adaptive => "adaptive",
            ThresholdMethod::Bonferroni => "bonferroni",
        }
    }
}

impl fmt::Display for ThresholdMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A computed selection threshold plus solver diagnostics (iteration
/// counts, residuals, grid indices, expected selected size, flags).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub c: f64,
    pub method: ThresholdMethod,
    pub diagnostics: BTreeMap<String, f64>,
}

impl ThresholdResult {
    fn new(c: f64, method: ThresholdMethod) -> Self {
        Self {
            c,
            method,
            diagnostics: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    /// True when the named diagnostic flag is set (nonzero).
    pub fn flag(&self, key: &str) -> bool {
        self.diagnostics.get(key).is_some_and(|&v| v != 0.0)
    }
}

/// How the selection threshold should be chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdSpec {
    /// The default `α/m`.
    Default,
    /// A caller-supplied threshold in (0, 1].
    Fixed(f64),
    /// Solve for the threshold from a known mix and p-value model.
    Oracle {
        mix: HypothesisMix,
        model: AltModel,
        method: OracleMethod,
    },
    /// Data-adaptive threshold computed from the observed minima.
    Adaptive,
}

impl ThresholdSpec {
    /// Resolve the spec into a concrete threshold for a family whose
    /// observed minimum p-values are `min_pvals`.
    pub fn resolve(&self, alpha: f64, min_pvals: &[f64]) -> Result<ThresholdResult> {
        check_alpha(alpha)?;
        let m = min_pvals.len();
        if m == 0 {
            return Err(Error::EmptyMatrix);
        }
        match self {
            ThresholdSpec::Default => Ok(ThresholdResult::new(
                default_threshold(alpha, m),
                ThresholdMethod::Default,
            )),
            ThresholdSpec::Fixed(c) => {
                if !(*c > 0.0 && *c <= 1.0) {
                    return Err(Error::Domain {
                        name: "c",
                        bounds: "(0, 1]",
                        value: *c,
                    });
                }
                Ok(ThresholdResult::new(*c, ThresholdMethod::Fixed))
            }
            ThresholdSpec::Oracle { mix, model, method } => {
                oracle_threshold(alpha, mix, model, m, *method)
            }
            ThresholdSpec::Adaptive => adaptive_threshold(min_pvals, alpha),
        }
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

/// The default selection threshold `α/m`.
pub fn default_threshold(alpha: f64, m: usize) -> f64 {
    debug_assert!(m >= 1);
    alpha / m as f64
}

// Points of the log-spaced scan grid used to bracket solver roots. The
// search domain is [α/m, α]: thresholds below the per-hypothesis Bonferroni
// level select less than one pair on average and are never optimal.
const SCAN_POINTS: usize = 512;

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

// Geometric bisection of a sign change: f(lo) > 0 >= f(hi). Returns the
// feasible (hi) end together with the iteration count.
fn bisect_sign_change<F: Fn(f64) -> Result<f64>>(
    mut lo: f64,
    mut hi: f64,
    f: F,
) -> Result<(f64, usize)> {
    let mut iters = 0;
    while hi - lo > 1e-10 * hi.max(1e-300) && iters < 200 {
        let mid = (lo * hi).sqrt();
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    Ok((hi, iters))
}

/// Solve for the oracle selection threshold on (0, α], assuming the mix and
/// the non-null p-value distribution are known.
///
/// `Constraint` returns the smallest threshold from which the expected-size
/// FWER approximation stays within the nominal level; if the constraint is
/// never violated on the scan grid the unconstrained power maximizer is
/// returned instead with the `degenerate` flag set, and if it is violated
/// everywhere the level `α` itself is returned with the `infeasible` flag.
/// `Product` flags `no_root` and returns `α` when `c·E|S(c)|` stays below
/// `α` on the whole domain (then every threshold satisfies the rule).
pub fn oracle_threshold(
    alpha: f64,
    mix: &HypothesisMix,
    model: &AltModel,
    m: usize,
    method: OracleMethod,
) -> Result<ThresholdResult> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(Error::Domain {
            name: "m",
            bounds: "[1, ∞)",
            value: 0.0,
        });
    }
    match method {
        OracleMethod::Constraint => constraint_threshold(alpha, mix, model, m),
        OracleMethod::FirstOrder => first_order_threshold(alpha, mix, model, m),
        OracleMethod::Product => product_threshold(alpha, mix, model, m),
    }
}

fn constraint_threshold(
    alpha: f64,
    mix: &HypothesisMix,
    model: &AltModel,
    m: usize,
) -> Result<ThresholdResult> {
    let grid = log_grid(default_threshold(alpha, m), alpha, SCAN_POINTS);
    let mut excess = Vec::with_capacity(grid.len());
    for &c in &grid {
        excess.push(fwer_approx(c, alpha, mix, model, m)? - alpha);
    }
    let last_violation = excess.iter().rposition(|&v| v > 0.0);
    match last_violation {
        None => {
            // constraint inactive everywhere: fall back to the
            // unconstrained power maximizer on the same grid
            let mut best = (grid[0], f64::NEG_INFINITY);
            for &c in &grid {
                let p = power_unconditional(c, alpha, mix, model, m)?;
                if p > best.1 {
                    best = (c, p);
                }
            }
            Ok(ThresholdResult::new(best.0, ThresholdMethod::OracleConstraint)
                .with("degenerate", 1.0)
                .with("power", best.1)
                .with(
                    "expected_selected",
                    expected_selected(best.0, mix, model, m)?,
                ))
        }
        Some(k) if k == grid.len() - 1 => {
            Ok(ThresholdResult::new(alpha, ThresholdMethod::OracleConstraint)
                .with("infeasible", 1.0)
                .with("residual", excess[k]))
        }
        Some(k) => {
            let f = |c: f64| fwer_approx(c, alpha, mix, model, m).map(|v| v - alpha);
            let (c, iters) = bisect_sign_change(grid[k], grid[k + 1], f)?;
            let residual = fwer_approx(c, alpha, mix, model, m)? - alpha;
            Ok(ThresholdResult::new(c, ThresholdMethod::OracleConstraint)
                .with("iterations", iters as f64)
                .with("residual", residual)
                .with("expected_selected", expected_selected(c, mix, model, m)?))
        }
    }
}

fn product_threshold(
    alpha: f64,
    mix: &HypothesisMix,
    model: &AltModel,
    m: usize,
) -> Result<ThresholdResult> {
    let g = |c: f64| expected_selected(c, mix, model, m).map(|e| c * e - alpha);
    if g(alpha)? < 0.0 {
        return Ok(ThresholdResult::new(alpha, ThresholdMethod::OracleProduct)
            .with("no_root", 1.0)
            .with("residual", g(alpha)?));
    }
    // E|S(c)| <= m makes c·E|S(c)| <= α at c = α/m, so the root never lies
    // below the default threshold
    let lo = default_threshold(alpha, m);
    if g(lo)? >= 0.0 {
        return Ok(ThresholdResult::new(lo, ThresholdMethod::OracleProduct)
            .with("iterations", 0.0)
            .with("residual", g(lo)?)
            .with("expected_selected", expected_selected(lo, mix, model, m)?));
    }
    let neg_g = |c: f64| g(c).map(|v| -v); // increasing -> decreasing for the bracketer
    let (c, iters) = bisect_sign_change(lo, alpha, &neg_g)?;
    // walk back to the sign boundary from the feasible side
    let residual = g(c)?;
    Ok(ThresholdResult::new(c, ThresholdMethod::OracleProduct)
        .with("iterations", iters as f64)
        .with("residual", residual)
        .with("expected_selected", expected_selected(c, mix, model, m)?))
}

fn first_order_threshold(
    alpha: f64,
    mix: &HypothesisMix,
    model: &AltModel,
    m: usize,
) -> Result<ThresholdResult> {
    // excess of the conditional null CDF over the average testing
    // threshold; the cap region (testing threshold >= 1) counts as a
    // violation so the downward scan always terminates
    let h = |c: f64| -> Result<f64> {
        let e = expected_selected(c, mix, model, m)?;
        if e <= 0.0 {
            return Ok(1.0);
        }
        let u = alpha / e;
        if u >= 1.0 {
            return Ok(1.0);
        }
        Ok(cond_max_cdf(u, c, PairType::OneNonNull, model)? - u)
    };
    // anchor on the product root, where the two thresholds coincide and
    // P0(c, c) <= c puts the excess at or below zero
    let anchor = product_threshold(alpha, mix, model, m)?;
    let hi = anchor.c;
    if h(hi)? > 0.0 {
        return Ok(ThresholdResult::new(hi, ThresholdMethod::OracleFirstOrder)
            .with("no_root", 1.0)
            .with("residual", h(hi)?));
    }
    let mut lo = hi;
    let mut found = false;
    for _ in 0..1080 {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            break;
        }
        if h(lo)? > 0.0 {
            found = true;
            break;
        }
    }
    if !found {
        return Ok(ThresholdResult::new(hi, ThresholdMethod::OracleFirstOrder)
            .with("degenerate", 1.0)
            .with("residual", h(hi)?));
    }
    let (c, iters) = bisect_sign_change(lo, hi, h)?;
    let residual = h(c)?;
    Ok(ThresholdResult::new(c, ThresholdMethod::OracleFirstOrder)
        .with("iterations", iters as f64)
        .with("residual", residual)
        .with("expected_selected", expected_selected(c, mix, model, m)?))
}

/// Data-adaptive selection threshold from the observed minimum p-values:
/// the largest threshold `t` with `t·|S(t)| ≤ α`.
///
/// The returned threshold is the grid form `γ = α/k*` with
/// `k* = min{k : |S(α/k)| ≤ k}` (`k = m` always qualifies). The
/// continuous form is evaluated over the candidate set
/// `{α/k} ∪ {observed minima}` and reported in the diagnostics as
/// `c_continuous`; it attains the largest selected set over all thresholds
/// satisfying the rule, and `γ ≤ c_continuous` always. The grid threshold
/// is the operative one: it doubles as the testing threshold.
pub fn adaptive_threshold(min_pvals: &[f64], alpha: f64) -> Result<ThresholdResult> {
    check_alpha(alpha)?;
    let m = min_pvals.len();
    if m == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (i, &p) in min_pvals.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPValue {
                row: i,
                col: 0,
                value: p,
            });
        }
    }
    let mut sorted = min_pvals.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
    let count = |t: f64| sorted.partition_point(|&p| p <= t);

    let mut kstar = m;
    for k in 1..=m {
        if count(alpha / k as f64) <= k {
            kstar = k;
            break;
        }
    }
    let gamma = alpha / kstar as f64;

    // candidates of the form alpha/k qualify exactly when |S(alpha/k)| <= k,
    // the integer comparison; breakpoint candidates use the product rule
    let mut c_cont = gamma;
    for k in 1..=m {
        let t = alpha / k as f64;
        if t > c_cont && count(t) <= k {
            c_cont = t;
        }
    }
    for &t in &sorted {
        if t > c_cont && t * count(t) as f64 <= alpha {
            c_cont = t;
        }
    }

    Ok(ThresholdResult::new(gamma, ThresholdMethod::Adaptive)
        .with("grid_k", kstar as f64)
        .with("c_continuous", c_cont)
        .with("selected", count(gamma) as f64))
}
