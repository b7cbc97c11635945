//! Shared fixtures for the integration suites.

use screenmin::PValueMatrix;

/// The 22 metabolite pairs from the Navy colorectal adenoma follow-up that
/// pass the adaptive screening threshold, as (min, max, which column holds
/// the min). Column 1 is the fish-intake association, column 2 the adenoma
/// association.
pub const NAVY_SCREENED: [(f64, f64, u8); 22] = [
    (1.2e-6, 1.5e-2, 2),
    (1.9e-6, 8.3e-3, 1),
    (7.8e-6, 2.2e-1, 2),
    (2.5e-5, 7.3e-1, 2),
    (3.9e-5, 8.4e-1, 2),
    (5.9e-5, 4.1e-1, 2),
    (9.0e-5, 2.6e-1, 2),
    (9.4e-5, 5.4e-1, 2),
    (1.7e-4, 9.2e-1, 1),
    (1.7e-4, 6.3e-1, 2),
    (2.8e-4, 7.1e-1, 2),
    (2.9e-4, 8.2e-1, 2),
    (3.0e-4, 2.9e-1, 2),
    (5.4e-4, 1.8e-1, 2),
    (5.9e-4, 1.3e-1, 1),
    (8.8e-4, 6.7e-1, 2),
    (8.9e-4, 2.0e-1, 2),
    (9.9e-4, 5.6e-1, 2),
    (1.4e-3, 5.0e-1, 2),
    (1.4e-3, 8.3e-3, 2),
    (1.6e-3, 5.4e-1, 2),
    (1.8e-3, 3.2e-1, 2),
];

/// Total number of metabolites in the study.
pub const NAVY_M: usize = 149;

/// Rows of the full 149-pair matrix: the 22 screened pairs first, then 127
/// deterministic filler pairs whose minima sit far above every threshold of
/// interest (> 2.3e-3).
pub fn navy_rows() -> Vec<[f64; 2]> {
    let mut rows: Vec<[f64; 2]> = NAVY_SCREENED
        .iter()
        .map(|&(min, max, min_col)| {
            if min_col == 1 {
                [min, max]
            } else {
                [max, min]
            }
        })
        .collect();
    for i in 0..(NAVY_M - NAVY_SCREENED.len()) {
        let p1 = 0.10 + 0.006 * i as f64;
        let p2 = 0.15 + 0.006 * i as f64;
        rows.push([p1, p2]);
    }
    rows
}

pub fn navy_matrix() -> PValueMatrix {
    PValueMatrix::new(navy_rows()).expect("fixture is valid")
}
