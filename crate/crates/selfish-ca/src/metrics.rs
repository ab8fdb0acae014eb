//! Complexity metrics and outcome classification for spacetime diagrams.
//!
//! Three deterministic measures, all checkable by hand on small inputs:
//! Shannon entropy of the per-row color distribution, Shannon entropy of
//! overlapping length-k color words, and the LZ78 phrase count of the final
//! row. The analysis window defaults to the light-cone span of the final
//! row so that the infinite white background does not dilute statistics.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::rule::Color;
use crate::tape::{Configuration, SpacetimeDiagram, Window};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("analysis window is empty")]
    EmptyWindow,
    #[error("block length must be at least 1")]
    ZeroBlockLength,
    #[error("block length {k} exceeds window length {window}")]
    BlockLongerThanWindow { k: usize, window: usize },
}

/// Survival classification of a run, read off the final row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    /// At least one black cell and no grey cells remain.
    BlackOnly,
    /// At least one grey cell and no black cells remain.
    GreyOnly,
    /// Both organisms still have live cells.
    Coexist,
    /// Only white cells remain.
    Extinct,
}

impl fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            OutcomeClass::BlackOnly => "black_only",
            OutcomeClass::GreyOnly => "grey_only",
            OutcomeClass::Coexist => "coexist",
            OutcomeClass::Extinct => "extinct",
        };
        f.write_str(token)
    }
}

/// Cell counts per color over the analysis window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColorCounts {
    pub white: u64,
    pub grey: u64,
    pub black: u64,
}

impl ColorCounts {
    fn from_array(counts: [u64; 3]) -> ColorCounts {
        ColorCounts {
            white: counts[0],
            grey: counts[1],
            black: counts[2],
        }
    }

    pub fn total(self) -> u64 {
        self.white + self.grey + self.black
    }
}

/// Shannon entropy in bits of a discrete distribution given by counts,
/// with 0·log 0 = 0.
fn shannon_entropy(counts: impl IntoIterator<Item = u64>, total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let mut bits = 0.0;
    for count in counts {
        if count > 0 {
            let p = count as f64 / total;
            bits -= p * p.log2();
        }
    }
    bits
}

/// Shannon entropy in bits per cell of the color distribution of `row`
/// over `window`.
pub fn row_entropy(row: &Configuration, window: Window) -> Result<f64, MetricsError> {
    if window.is_empty() {
        return Err(MetricsError::EmptyWindow);
    }
    let counts = row.count_colors(window);
    Ok(shannon_entropy(counts, window.len as u64))
}

/// Shannon entropy in bits per block of the distribution of overlapping
/// length-`k` color words of `row` over `window`.
pub fn block_entropy(row: &Configuration, window: Window, k: usize) -> Result<f64, MetricsError> {
    if k == 0 {
        return Err(MetricsError::ZeroBlockLength);
    }
    if window.is_empty() {
        return Err(MetricsError::EmptyWindow);
    }
    if k > window.len {
        return Err(MetricsError::BlockLongerThanWindow { k, window: window.len });
    }
    let cells = row.window_cells(window);
    let mut counts: HashMap<&[Color], u64> = HashMap::new();
    for word in cells.windows(k) {
        *counts.entry(word).or_insert(0) += 1;
    }
    let total = (cells.len() - k + 1) as u64;
    Ok(shannon_entropy(counts.into_values(), total))
}

/// LZ78 phrase count of a color sequence.
///
/// Scans left to right, extending the current phrase while it matches a
/// dictionary entry; on mismatch (or end of input) the phrase joins the
/// dictionary and the scan restarts. The count is the number of phrases
/// emitted.
pub fn lz_complexity(sequence: &[Color]) -> usize {
    // dictionary as a trie: (node, symbol) -> node, rooted at 0
    let mut children: HashMap<(usize, Color), usize> = HashMap::new();
    let mut next_node = 1;
    let mut node = 0;
    let mut phrases = 0;
    for &symbol in sequence {
        match children.get(&(node, symbol)) {
            Some(&child) => node = child,
            None => {
                phrases += 1;
                children.insert((node, symbol), next_node);
                next_node += 1;
                node = 0;
            }
        }
    }
    if node != 0 {
        // input ended mid-phrase; the partial phrase still counts
        phrases += 1;
    }
    phrases
}

/// Classify a run by the live cells of its final row.
pub fn classify_outcome(diagram: &SpacetimeDiagram) -> OutcomeClass {
    classify_row(diagram.final_row())
}

fn classify_row(row: &Configuration) -> OutcomeClass {
    let mut has_grey = false;
    let mut has_black = false;
    for &cell in row.cells() {
        match cell {
            Color::Grey => has_grey = true,
            Color::Black => has_black = true,
            Color::White => {}
        }
    }
    match (has_black, has_grey) {
        (true, false) => OutcomeClass::BlackOnly,
        (false, true) => OutcomeClass::GreyOnly,
        (true, true) => OutcomeClass::Coexist,
        (false, false) => OutcomeClass::Extinct,
    }
}

/// All metrics of one diagram over one analysis window.
///
/// `row_counts` and `row_entropy` hold one entry per diagram row; the block
/// entropy and LZ78 phrase count describe the final row. An all-white
/// diagram has an empty window and all-zero metrics.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    /// Analysis window; empty for an all-white diagram.
    pub window: Window,
    /// Block length used for `block_entropy_k`.
    pub k: usize,
    /// Per-row color counts over the window.
    pub row_counts: Vec<ColorCounts>,
    /// Per-row Shannon entropy in bits per cell.
    pub row_entropy: Vec<f64>,
    /// Shannon entropy in bits per length-k block of the final row.
    pub block_entropy_k: f64,
    /// LZ78 phrase count of the final row over the window.
    pub lz_complexity: u64,
    /// Survival classification of the final row.
    pub outcome: OutcomeClass,
}

impl MetricsReport {
    pub fn final_counts(&self) -> ColorCounts {
        *self.row_counts.last().expect("diagrams have at least one row")
    }

    pub fn final_row_entropy(&self) -> f64 {
        *self.row_entropy.last().expect("diagrams have at least one row")
    }
}

/// Assemble the full metrics report for a diagram.
///
/// The analysis window is the light-cone span of the final row. Fails only
/// when `k` does not fit that window (and the window is nonempty).
pub fn summarize(diagram: &SpacetimeDiagram, k: usize) -> Result<MetricsReport, MetricsError> {
    if k == 0 {
        return Err(MetricsError::ZeroBlockLength);
    }
    let outcome = classify_outcome(diagram);
    let Some(window) = diagram.light_cone_window() else {
        // all-white diagram: empty canonical rows, zero metrics
        let rows = diagram.rows().len();
        return Ok(MetricsReport {
            window: Window::new(0, 0),
            k,
            row_counts: vec![ColorCounts::from_array([0, 0, 0]); rows],
            row_entropy: vec![0.0; rows],
            block_entropy_k: 0.0,
            lz_complexity: 0,
            outcome,
        });
    };
    let mut row_counts = Vec::with_capacity(diagram.rows().len());
    let mut entropies = Vec::with_capacity(diagram.rows().len());
    for row in diagram.rows() {
        let counts = row.count_colors(window);
        row_counts.push(ColorCounts::from_array(counts));
        entropies.push(shannon_entropy(counts, window.len as u64));
    }
    let final_row = diagram.final_row();
    let block_entropy_k = block_entropy(final_row, window, k)?;
    let lz = lz_complexity(&final_row.window_cells(window));
    Ok(MetricsReport {
        window,
        k,
        row_counts,
        row_entropy: entropies,
        block_entropy_k,
        lz_complexity: lz as u64,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::rule::{compose, ElementaryRule, MixedAssignment};
    use crate::tape::evolve;

    const LOG2_3: f64 = 1.584962500721156;

    fn row(offset: i64, digits: &[u8]) -> Configuration {
        Configuration::new(
            offset,
            digits.iter().map(|d| Color::from_u8(*d).unwrap()).collect(),
        )
    }

    #[test]
    fn row_entropy_of_all_white_window_is_zero() {
        let blank = Configuration::all_white();
        assert_eq!(row_entropy(&blank, Window::new(-5, 10)), Ok(0.0));
    }

    #[test]
    fn row_entropy_of_balanced_window_is_log2_3() {
        let balanced = row(0, &[0, 1, 2, 0, 1, 2]);
        let bits = row_entropy(&balanced, Window::new(0, 6)).unwrap();
        assert!((bits - LOG2_3).abs() < 1e-12);
    }

    #[test]
    fn row_entropy_of_two_symbol_half_split_is_one() {
        let half = row(0, &[0, 2, 0, 2]);
        let bits = row_entropy(&half, Window::new(0, 4)).unwrap();
        assert!((bits - 1.0).abs() < 1e-12);
    }

    #[test]
    fn row_entropy_rejects_empty_window() {
        let config = row(0, &[1]);
        assert_eq!(
            row_entropy(&config, Window::new(3, 0)),
            Err(MetricsError::EmptyWindow)
        );
    }

    #[test]
    fn block_entropy_with_k_1_reduces_to_row_entropy() {
        let config = row(0, &[0, 1, 2, 2, 1, 0, 1]);
        let window = Window::new(-2, 11);
        assert!(
            (block_entropy(&config, window, 1).unwrap() - row_entropy(&config, window).unwrap())
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn block_entropy_of_constant_row_is_zero() {
        let config = row(0, &[2, 2, 2, 2, 2, 2]);
        for k in 1..=6 {
            assert_eq!(block_entropy(&config, Window::new(0, 6), k), Ok(0.0));
        }
    }

    #[test]
    fn block_entropy_of_alternating_row_with_k_2_is_one() {
        // five cells give four words: 02, 20, 02, 20 — equally frequent
        let config = row(0, &[0, 2, 0, 2, 0]);
        let bits = block_entropy(&config, Window::new(0, 5), 2).unwrap();
        assert!((bits - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_entropy_rejects_bad_block_lengths() {
        let config = row(0, &[0, 1, 2]);
        assert_eq!(
            block_entropy(&config, Window::new(0, 3), 0),
            Err(MetricsError::ZeroBlockLength)
        );
        assert_eq!(
            block_entropy(&config, Window::new(0, 3), 4),
            Err(MetricsError::BlockLongerThanWindow { k: 4, window: 3 })
        );
    }

    #[test]
    fn lz_complexity_of_empty_sequence_is_zero() {
        assert_eq!(lz_complexity(&[]), 0);
    }

    #[test]
    fn lz_complexity_of_four_zeros_is_three() {
        // hand-traced LZ78 parsing: "0", "00", "0"
        let seq = vec![Color::White; 4];
        assert_eq!(lz_complexity(&seq), 3);
    }

    #[test]
    fn lz_complexity_doubling_bound_over_all_short_sequences() {
        // brute-force check over all sequences of length <= 8
        for len in 0..=8usize {
            let mut seq = vec![0u8; len];
            loop {
                let colors: Vec<Color> =
                    seq.iter().map(|d| Color::from_u8(*d).unwrap()).collect();
                let doubled: Vec<Color> =
                    colors.iter().chain(colors.iter()).copied().collect();
                assert!(
                    lz_complexity(&doubled) <= 2 * lz_complexity(&colors),
                    "failed for {seq:?}"
                );
                // next base-3 numeral
                let mut i = 0;
                loop {
                    if i == len {
                        break;
                    }
                    seq[i] += 1;
                    if seq[i] < 3 {
                        break;
                    }
                    seq[i] = 0;
                    i += 1;
                }
                if i == len {
                    break;
                }
            }
        }
    }

    #[test]
    fn classify_outcome_from_final_row() {
        assert_eq!(classify_row(&row(0, &[0, 2, 0, 2])), OutcomeClass::BlackOnly);
        assert_eq!(classify_row(&row(0, &[1])), OutcomeClass::GreyOnly);
        assert_eq!(classify_row(&row(0, &[1, 0, 2])), OutcomeClass::Coexist);
        assert_eq!(classify_row(&Configuration::all_white()), OutcomeClass::Extinct);
    }

    #[test]
    fn summarize_all_white_diagram_is_degenerate() {
        let rule = {
            let mut rng = SplitMix64::new(1);
            compose(
                ElementaryRule::new(90),
                ElementaryRule::new(110),
                MixedAssignment::sample(&mut rng),
            )
        };
        let diagram = evolve(Configuration::all_white(), rule, 5);
        let report = summarize(&diagram, 4).unwrap();
        assert_eq!(report.outcome, OutcomeClass::Extinct);
        assert_eq!(report.window.len, 0);
        assert_eq!(report.lz_complexity, 0);
        assert_eq!(report.block_entropy_k, 0.0);
        assert!(report.row_entropy.iter().all(|h| *h == 0.0));
        assert_eq!(report.row_counts.len(), 6);
    }

    #[test]
    fn summarize_matches_independent_recomputation() {
        let mut rng = SplitMix64::new(77);
        let rule = compose(
            ElementaryRule::new(110),
            ElementaryRule::new(90),
            MixedAssignment::sample(&mut rng),
        );
        let initial = crate::tape::standard_initial(crate::tape::InitialKind::Interaction {
            separation: 11,
        })
        .unwrap();
        let diagram = evolve(initial, rule, 50);
        let report = summarize(&diagram, 4).unwrap();

        let window = diagram.light_cone_window().unwrap();
        assert_eq!(report.window, window);
        for (i, r) in diagram.rows().iter().enumerate() {
            let counts = r.count_colors(window);
            assert_eq!(report.row_counts[i].white, counts[0]);
            assert_eq!(report.row_counts[i].grey, counts[1]);
            assert_eq!(report.row_counts[i].black, counts[2]);
            assert_eq!(report.row_counts[i].total(), window.len as u64);
            let expected = row_entropy(r, window).unwrap();
            assert!((report.row_entropy[i] - expected).abs() < 1e-15);
            assert!(report.row_entropy[i] >= 0.0 && report.row_entropy[i] <= LOG2_3 + 1e-12);
        }
        assert_eq!(
            report.block_entropy_k,
            block_entropy(diagram.final_row(), window, 4).unwrap()
        );
        assert_eq!(
            report.lz_complexity,
            lz_complexity(&diagram.final_row().window_cells(window)) as u64
        );
        assert_eq!(report.outcome, classify_outcome(&diagram));
    }
}
