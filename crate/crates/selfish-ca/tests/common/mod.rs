//! Shared test support: an elementary-CA oracle independent of the crate's
//! composite-rule machinery.

use selfish_ca::{Color, Configuration};

/// One row of an elementary two-color evolution: cell values over a window
/// starting at `offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRow {
    pub offset: i64,
    pub cells: Vec<u8>,
}

impl OracleRow {
    /// Tape positions of the live (1) cells.
    pub fn live_positions(&self) -> Vec<i64> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == 1)
            .map(|(i, _)| self.offset + i as i64)
            .collect()
    }
}

/// Evolve an elementary rule from a single live cell at index 0 on an
/// unbounded zero background, the straightforward way: widen the window by
/// one cell per side per step and apply the rule bit by bit.
///
/// Only meaningful for even rule numbers, where the zero background stays
/// zero. Returns `steps + 1` rows.
pub fn elementary_evolve_single_seed(rule: u8, steps: usize) -> Vec<OracleRow> {
    assert_eq!(rule % 2, 0, "oracle requires a quiescent background");
    let mut rows = Vec::with_capacity(steps + 1);
    let mut current = OracleRow {
        offset: 0,
        cells: vec![1],
    };
    rows.push(current.clone());
    for _ in 0..steps {
        let len = current.cells.len();
        let get = |i: isize| -> u8 {
            if i < 0 || i as usize >= len {
                0
            } else {
                current.cells[i as usize]
            }
        };
        let mut next = Vec::with_capacity(len + 2);
        for i in 0..(len + 2) as isize {
            let pattern = (get(i - 2) << 2) | (get(i - 1) << 1) | get(i);
            next.push((rule >> pattern) & 1);
        }
        current = OracleRow {
            offset: current.offset - 1,
            cells: next,
        };
        rows.push(current.clone());
    }
    rows
}

/// Positions of a composite-configuration's cells of one color.
pub fn positions(config: &Configuration, color: Color) -> Vec<i64> {
    config.positions_of(color)
}

/// A minimal P6 reader for golden-file checks: returns (width, height,
/// rgb bytes).
pub fn parse_ppm(bytes: &[u8]) -> (usize, usize, &[u8]) {
    let text_end = bytes
        .windows(5)
        .position(|w| w == b"\n255\n")
        .expect("P6 header terminator")
        + 5;
    let header = std::str::from_utf8(&bytes[..text_end]).expect("ascii header");
    let mut parts = header.split_ascii_whitespace();
    assert_eq!(parts.next(), Some("P6"));
    let width: usize = parts.next().unwrap().parse().unwrap();
    let height: usize = parts.next().unwrap().parse().unwrap();
    assert_eq!(parts.next(), Some("255"));
    let pixels = &bytes[text_end..];
    assert_eq!(pixels.len(), 3 * width * height);
    (width, height, pixels)
}
