//! Configurations on an unbounded tape and their exact evolution.
//!
//! The tape is indexed by all integers with a white (quiescent) background.
//! Since every composite rule maps the all-white neighborhood to white, the
//! infinite evolution reduces exactly to a finite support window padded by
//! one cell per side per step; no boundary approximation is involved.

use serde::Serialize;
use thiserror::Error;

use crate::rule::{Color, CompositeRule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TapeError {
    #[error("interaction separation must be at least 1, got {0}")]
    InvalidSeparation(u32),
}

/// Half-open range of tape indices `[start, start + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub start: i64,
    pub len: usize,
}

impl Window {
    pub fn new(start: i64, len: usize) -> Window {
        Window { start, len }
    }

    pub fn end(self) -> i64 {
        self.start + self.len as i64
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn indices(self) -> impl Iterator<Item = i64> {
        self.start..self.end()
    }
}

/// A tape configuration: a finite support window of cells at `offset`, with
/// every cell outside the window implicitly white.
///
/// The stored window is always canonical (no leading or trailing white
/// cells), so derived equality coincides with equality of the underlying
/// infinite configurations. The all-white configuration has an empty window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    offset: i64,
    cells: Vec<Color>,
}

impl Configuration {
    /// Build a configuration from a window of cells, trimming to canonical
    /// form.
    pub fn new(offset: i64, cells: Vec<Color>) -> Configuration {
        let mut config = Configuration { offset, cells };
        config.trim();
        config
    }

    /// The all-white configuration.
    pub fn all_white() -> Configuration {
        Configuration {
            offset: 0,
            cells: Vec::new(),
        }
    }

    /// Single cell of `color` at tape index `position`. White yields the
    /// all-white configuration.
    pub fn single(position: i64, color: Color) -> Configuration {
        Configuration::new(position, vec![color])
    }

    fn trim(&mut self) {
        let first = self.cells.iter().position(|c| !c.is_white());
        let Some(first) = first else {
            self.offset = 0;
            self.cells.clear();
            return;
        };
        let last = self.cells.iter().rposition(|c| !c.is_white()).unwrap();
        self.cells.drain(last + 1..);
        self.cells.drain(..first);
        self.offset += first as i64;
    }

    pub fn is_all_white(&self) -> bool {
        self.cells.is_empty()
    }

    /// Start of the canonical window, meaningless when all white.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// The canonical (trimmed) window of cells.
    pub fn cells(&self) -> &[Color] {
        &self.cells
    }

    /// Inclusive bounds of the non-white support, or `None` when all white.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.cells.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.cells.len() as i64 - 1))
        }
    }

    /// Color at an arbitrary tape index.
    #[inline]
    pub fn get(&self, index: i64) -> Color {
        if index < self.offset {
            return Color::White;
        }
        let i = (index - self.offset) as usize;
        self.cells.get(i).copied().unwrap_or(Color::White)
    }

    /// Cells over an arbitrary window, including implicit white background.
    pub fn window_cells(&self, window: Window) -> Vec<Color> {
        window.indices().map(|i| self.get(i)).collect()
    }

    /// Count of (white, grey, black) cells over a window.
    pub fn count_colors(&self, window: Window) -> [u64; 3] {
        let mut counts = [0u64; 3];
        for i in window.indices() {
            counts[self.get(i).index()] += 1;
        }
        counts
    }

    /// Tape positions holding a given color.
    pub fn positions_of(&self, color: Color) -> Vec<i64> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == color)
            .map(|(i, _)| self.offset + i as i64)
            .collect()
    }
}

/// One synchronous update of the whole tape. Exact: the output support can
/// extend at most one cell beyond the input support on each side.
pub fn step(config: &Configuration, rule: &CompositeRule) -> Configuration {
    if config.is_all_white() {
        // the all-white neighborhood maps to white, so white is a fixed point
        return Configuration::all_white();
    }
    let cells = config.cells();
    let out_len = cells.len() + 2;
    let mut out = Vec::with_capacity(out_len);
    // cell at padded position i has tape index offset - 1 + i
    let at = |i: isize| -> usize {
        // padded read relative to the input window
        if i < 0 || i as usize >= cells.len() {
            0
        } else {
            cells[i as usize].index()
        }
    };
    for i in 0..out_len as isize {
        let index = at(i - 2) * 9 + at(i - 1) * 3 + at(i);
        out.push(rule.output_by_index(index));
    }
    Configuration::new(config.offset() - 1, out)
}

/// The evolution `c_0 … c_T` of one initial configuration under one rule.
#[derive(Debug, Clone)]
pub struct SpacetimeDiagram {
    rows: Vec<Configuration>,
    rule: CompositeRule,
}

/// Evolve `initial` for `steps` updates, keeping every intermediate row.
pub fn evolve(initial: Configuration, rule: CompositeRule, steps: u32) -> SpacetimeDiagram {
    let mut rows = Vec::with_capacity(steps as usize + 1);
    rows.push(initial);
    for _ in 0..steps {
        let next = step(rows.last().unwrap(), &rule);
        rows.push(next);
    }
    SpacetimeDiagram { rows, rule }
}

impl SpacetimeDiagram {
    pub fn rows(&self) -> &[Configuration] {
        &self.rows
    }

    pub fn rule(&self) -> &CompositeRule {
        &self.rule
    }

    /// Number of evolution steps (rows minus one).
    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn initial_row(&self) -> &Configuration {
        &self.rows[0]
    }

    pub fn final_row(&self) -> &Configuration {
        self.rows.last().unwrap()
    }

    /// The light-cone span at the final row: the initial support widened by
    /// one cell per side per step. Every live cell of every row lies inside
    /// it. `None` when the initial row is all white.
    pub fn light_cone_window(&self) -> Option<Window> {
        let (lo, hi) = self.rows[0].support()?;
        let t = self.steps() as i64;
        Some(Window::new(lo - t, (hi - lo + 1 + 2 * t) as usize))
    }
}

/// The standard initial conditions used by runs and tournaments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    /// A single black cell at index 0.
    SoloBlack,
    /// A single grey cell at index 0.
    SoloGrey,
    /// A black cell at index 0 and a grey cell at index `separation`.
    Interaction { separation: u32 },
}

/// Build a standard initial configuration. Interaction separation must be
/// at least 1.
pub fn standard_initial(kind: InitialKind) -> Result<Configuration, TapeError> {
    match kind {
        InitialKind::SoloBlack => Ok(Configuration::single(0, Color::Black)),
        InitialKind::SoloGrey => Ok(Configuration::single(0, Color::Grey)),
        InitialKind::Interaction { separation } => {
            if separation == 0 {
                return Err(TapeError::InvalidSeparation(separation));
            }
            let mut cells = vec![Color::White; separation as usize + 1];
            cells[0] = Color::Black;
            cells[separation as usize] = Color::Grey;
            Ok(Configuration::new(0, cells))
        }
    }
}
