//! The multiple-testing procedures applied to a realized p-value matrix:
//! screen on the per-pair minimum, then Bonferroni-test the maxima of the
//! survivors; plus the select-everything Bonferroni baseline.

use crate::error::{Error, Result};
use crate::screening::PairType;
use crate::thresholds::{ThresholdMethod, ThresholdResult, ThresholdSpec};

/// An m×2 matrix of component p-values, optionally carrying the true pair
/// states (available in simulations).
#[derive(Debug, Clone, PartialEq)]
pub struct PValueMatrix {
    rows: Vec<[f64; 2]>,
    labels: Option<Vec<PairType>>,
}

impl PValueMatrix {
    pub fn new(rows: Vec<[f64; 2]>) -> Result<Self> {
        Self::build(rows, None)
    }

    pub fn with_labels(rows: Vec<[f64; 2]>, labels: Vec<PairType>) -> Result<Self> {
        Self::build(rows, Some(labels))
    }

    fn build(rows: Vec<[f64; 2]>, labels: Option<Vec<PairType>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidPValue {
                        row: i,
                        col: j,
                        value: p,
                    });
                }
            }
        }
        if let Some(ref l) = labels {
            if l.len() != rows.len() {
                return Err(Error::LabelMismatch {
                    labels: l.len(),
                    rows: rows.len(),
                });
            }
        }
        Ok(Self { rows, labels })
    }

    /// Number of hypothesis pairs.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[[f64; 2]] {
        &self.rows
    }

    pub fn labels(&self) -> Option<&[PairType]> {
        self.labels.as_deref()
    }

    /// Minimum p-value of row `i`.
    pub fn min_p(&self, i: usize) -> f64 {
        let [a, b] = self.rows[i];
        a.min(b)
    }

    /// Maximum p-value of row `i`; the valid p-value for the union
    /// hypothesis under the intersection-union principle.
    pub fn max_p(&self, i: usize) -> f64 {
        let [a, b] = self.rows[i];
        a.max(b)
    }

    /// All row minima, in row order.
    pub fn minima(&self) -> Vec<f64> {
        (0..self.m()).map(|i| self.min_p(i)).collect()
    }

    /// All row maxima, in row order.
    pub fn maxima(&self) -> Vec<f64> {
        (0..self.m()).map(|i| self.max_p(i)).collect()
    }
}

/// Outcome of running a procedure on a matrix.
///
/// `adjusted` always holds the screen-then-Bonferroni adjusted p-values
/// `min(|S|·max_p, 1)` on the selected set and 1 elsewhere, and `rejected`
/// the indices with `adjusted ≤ α`. Under the adaptive threshold the
/// testing threshold coincides with the screening threshold instead;
/// `rejected_at_screen` carries that rule's rejections and
/// [`TestResult::operative_rejections`] picks whichever rule the procedure
/// prescribes.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub threshold: ThresholdResult,
    pub alpha: f64,
    pub selected: Vec<usize>,
    pub adjusted: Vec<f64>,
    pub rejected: Vec<usize>,
    pub rejected_at_screen: Option<Vec<usize>>,
}

impl TestResult {
    /// The rejection set under the procedure's own convention: the
    /// coinciding-threshold rule for the adaptive procedure, the adjusted
    /// p-value rule otherwise.
    pub fn operative_rejections(&self) -> &[usize] {
        self.rejected_at_screen.as_deref().unwrap_or(&self.rejected)
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

/// Run the screen-then-test procedure: select rows whose minimum p-value is
/// at most the threshold resolved from `spec`, then test the selected
/// maxima at `α/|S|` via adjusted p-values. Ties with the threshold select;
/// comparisons are exact.
pub fn screenmin(matrix: &PValueMatrix, spec: &ThresholdSpec, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let minima = matrix.minima();
    let threshold = spec.resolve(alpha, &minima)?;
    let c = threshold.c;

    let selected: Vec<usize> = (0..matrix.m()).filter(|&i| minima[i] <= c).collect();
    let ns = selected.len() as f64;
    let mut adjusted = vec![1.0; matrix.m()];
    for &i in &selected {
        adjusted[i] = (ns * matrix.max_p(i)).min(1.0);
    }
    let rejected: Vec<usize> = (0..matrix.m()).filter(|&i| adjusted[i] <= alpha).collect();
    let rejected_at_screen = if matches!(spec, ThresholdSpec::Adaptive) {
        Some(
            selected
                .iter()
                .copied()
                .filter(|&i| matrix.max_p(i) <= c)
                .collect(),
        )
    } else {
        None
    };

    Ok(TestResult {
        threshold,
        alpha,
        selected,
        adjusted,
        rejected,
        rejected_at_screen,
    })
}

/// The standard Bonferroni baseline on the maximum p-values: every pair is
/// tested, `adjusted = min(m·max_p, 1)`.
pub fn bonferroni_max(matrix: &PValueMatrix, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let m = matrix.m() as f64;
    let adjusted: Vec<f64> = (0..matrix.m())
        .map(|i| (m * matrix.max_p(i)).min(1.0))
        .collect();
    let rejected: Vec<usize> = (0..matrix.m()).filter(|&i| adjusted[i] <= alpha).collect();
    Ok(TestResult {
        threshold: ThresholdResult {
            c: 1.0,
            method: ThresholdMethod::Bonferroni,
            diagnostics: Default::default(),
        },
        alpha,
        selected: (0..matrix.m()).collect(),
        adjusted,
        rejected,
        rejected_at_screen: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[[f64; 2]]) -> PValueMatrix {
        PValueMatrix::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn matrix_validation() {
        assert!(matches!(
            PValueMatrix::new(vec![]),
            Err(Error::EmptyMatrix)
        ));
        assert!(matches!(
            PValueMatrix::new(vec![[0.5, 1.2]]),
            Err(Error::InvalidPValue { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            PValueMatrix::with_labels(vec![[0.5, 0.5]], vec![]),
            Err(Error::LabelMismatch { .. })
        ));
    }

    #[test]
    fn minima_and_maxima() {
        let m = matrix(&[[0.3, 0.1], [0.02, 0.9]]);
        assert_eq!(m.minima(), vec![0.1, 0.02]);
        assert_eq!(m.maxima(), vec![0.3, 0.9]);
    }

    #[test]
    fn default_spec_selects_and_tests() {
        // three pairs, c = alpha/3; one pair selected and rejected
        let m = matrix(&[[0.001, 0.002], [0.5, 0.9], [0.2, 0.02]]);
        let res = screenmin(&m, &ThresholdSpec::Default, 0.05).unwrap();
        assert_eq!(res.threshold.c, 0.05 / 3.0);
        assert_eq!(res.selected, vec![0]);
        assert_eq!(res.adjusted[0], 0.002);
        assert_eq!(res.adjusted[1], 1.0);
        assert_eq!(res.rejected, vec![0]);
        assert!(res.rejected_at_screen.is_none());
    }

    #[test]
    fn all_ones_matrix_selects_nothing() {
        let m = matrix(&[[1.0, 1.0], [1.0, 1.0]]);
        for spec in [
            ThresholdSpec::Default,
            ThresholdSpec::Fixed(0.5),
            ThresholdSpec::Adaptive,
        ] {
            let res = screenmin(&m, &spec, 0.05).unwrap();
            assert!(res.selected.is_empty());
            assert!(res.adjusted.iter().all(|&a| a == 1.0));
            assert!(res.rejected.is_empty());
            assert!(res.operative_rejections().is_empty());
        }
    }

    #[test]
    fn ties_with_the_threshold_select() {
        let m = matrix(&[[0.025, 0.6], [0.0251, 0.6]]);
        let res = screenmin(&m, &ThresholdSpec::Fixed(0.025), 0.05).unwrap();
        assert_eq!(res.selected, vec![0]);
    }

    #[test]
    fn adaptive_spec_reports_both_rejection_rules() {
        // one tiny pair: selected and rejected under the coinciding
        // threshold, and also by adjusted p-value
        let m = matrix(&[[0.001, 0.002], [0.5, 0.9], [0.4, 0.7]]);
        let res = screenmin(&m, &ThresholdSpec::Adaptive, 0.05).unwrap();
        assert_eq!(res.selected, vec![0]);
        assert_eq!(res.rejected, vec![0]);
        assert_eq!(res.rejected_at_screen.as_deref(), Some(&[0][..]));
        assert_eq!(res.operative_rejections(), &[0]);
    }

    #[test]
    fn adaptive_rules_can_disagree() {
        // gamma = alpha/2 = 0.025 selects only row 0 (|S(0.025)| = 1 but
        // |S(0.05)| = 3), so the adjusted testing threshold alpha/|S| = 0.05
        // sits above gamma: the adjusted rule rejects the pair with maximum
        // 0.04 while the coinciding-threshold rule keeps it
        let m = matrix(&[[0.001, 0.04], [0.03, 0.5], [0.04, 0.9]]);
        let res = screenmin(&m, &ThresholdSpec::Adaptive, 0.05).unwrap();
        assert_eq!(res.threshold.c, 0.025);
        assert_eq!(res.selected, vec![0]);
        assert_eq!(res.rejected, vec![0]);
        assert_eq!(res.rejected_at_screen.as_deref(), Some(&[][..]));
        assert_eq!(res.operative_rejections(), &[] as &[usize]);
    }

    #[test]
    fn bonferroni_single_pair() {
        let m = matrix(&[[0.01, 0.03]]);
        let res = bonferroni_max(&m, 0.05).unwrap();
        assert_eq!(res.rejected, vec![0]);
        assert_eq!(res.adjusted[0], 0.03);
        assert_eq!(res.selected, vec![0]);
    }

    #[test]
    fn bonferroni_adjusts_by_family_size() {
        let mut rows = vec![[0.5, 0.5]; 10];
        rows[3] = [1e-4, 5e-5];
        let m = matrix(&rows);
        let res = bonferroni_max(&m, 0.05).unwrap();
        assert_eq!(res.rejected, vec![3]);
        assert!((res.adjusted[3] - 1e-3).abs() <= 1e-15);
        assert!(res.adjusted.iter().filter(|&&a| a == 1.0).count() == 9);
    }

    #[test]
    fn screenmin_dominates_bonferroni_on_selected_indices() {
        // whenever a selected index is rejected by the baseline it is also
        // rejected by the screening procedure (|S| <= m)
        let rows = [
            [0.0001, 0.004],
            [0.002, 0.01],
            [0.3, 0.6],
            [0.9, 0.2],
            [0.004, 0.8],
        ];
        let m = matrix(&rows);
        let sm = screenmin(&m, &ThresholdSpec::Fixed(0.01), 0.05).unwrap();
        let bf = bonferroni_max(&m, 0.05).unwrap();
        for &i in &bf.rejected {
            if sm.selected.contains(&i) {
                assert!(sm.rejected.contains(&i), "index {i} lost by screenmin");
            }
        }
    }

    #[test]
    fn rejected_is_subset_of_selected() {
        let rows = [[0.001, 0.01], [0.004, 0.3], [0.5, 0.5]];
        let m = matrix(&rows);
        for spec in [
            ThresholdSpec::Default,
            ThresholdSpec::Fixed(0.02),
            ThresholdSpec::Adaptive,
        ] {
            let res = screenmin(&m, &spec, 0.05).unwrap();
            for &i in &res.rejected {
                assert!(res.selected.contains(&i));
            }
            for &i in res.operative_rejections() {
                assert!(res.selected.contains(&i));
            }
        }
    }
}
