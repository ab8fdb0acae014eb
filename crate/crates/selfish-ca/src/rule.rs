//! Rule machinery: elementary (two-color) rules under the Wolfram code,
//! mixed-neighborhood assignments, and the composed three-color rule.
//!
//! A composite rule is a 27-entry lookup table over radius-1 neighborhoods
//! of three colors. It is assembled from a black/white elementary rule, a
//! grey/white elementary rule, and 12 contact outcomes for the neighborhoods
//! where both organisms meet. The all-white neighborhood always maps to
//! white, which keeps the background quiescent.

use crate::rng::SplitMix64;

/// Cell state: white is consumable resource, grey and black are the two
/// competing organisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Color {
    White = 0,
    Grey = 1,
    Black = 2,
}

impl Color {
    /// All three colors in numeric order.
    pub const ALL: [Color; 3] = [Color::White, Color::Grey, Color::Black];

    pub fn from_u8(value: u8) -> Option<Color> {
        match value {
            0 => Some(Color::White),
            1 => Some(Color::Grey),
            2 => Some(Color::Black),
            _ => None,
        }
    }

    #[inline]
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_white(self) -> bool {
        self == Color::White
    }
}

/// A radius-1 neighborhood: the cell itself plus its two direct neighbors.
///
/// There are exactly 27 distinct neighborhoods. `index` orders them
/// lexicographically over `(left, center, right)`, which is the canonical
/// order used everywhere in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Neighborhood {
    pub left: Color,
    pub center: Color,
    pub right: Color,
}

/// Partition of the 27 neighborhoods by which organisms appear in them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborhoodClass {
    /// All three cells white.
    Quiescent,
    /// Only white and grey cells, at least one grey.
    GreyDomain,
    /// Only white and black cells, at least one black.
    BlackDomain,
    /// At least one grey and at least one black cell.
    Mixed,
}

impl Neighborhood {
    pub fn new(left: Color, center: Color, right: Color) -> Neighborhood {
        Neighborhood {
            left,
            center,
            right,
        }
    }

    /// Lexicographic index over `(left, center, right)`, in `0..27`.
    #[inline]
    pub fn index(self) -> usize {
        self.left.index() * 9 + self.center.index() * 3 + self.right.index()
    }

    /// Inverse of [`Neighborhood::index`].
    pub fn from_index(index: usize) -> Option<Neighborhood> {
        if index >= 27 {
            return None;
        }
        Some(Neighborhood {
            left: Color::from_u8((index / 9) as u8).unwrap(),
            center: Color::from_u8((index / 3 % 3) as u8).unwrap(),
            right: Color::from_u8((index % 3) as u8).unwrap(),
        })
    }

    /// All 27 neighborhoods in canonical (lexicographic) order.
    pub fn all() -> impl Iterator<Item = Neighborhood> {
        (0..27).map(|i| Neighborhood::from_index(i).unwrap())
    }

    pub fn cells(self) -> [Color; 3] {
        [self.left, self.center, self.right]
    }

    pub fn class(self) -> NeighborhoodClass {
        let has_grey = self.cells().contains(&Color::Grey);
        let has_black = self.cells().contains(&Color::Black);
        match (has_grey, has_black) {
            (true, true) => NeighborhoodClass::Mixed,
            (true, false) => NeighborhoodClass::GreyDomain,
            (false, true) => NeighborhoodClass::BlackDomain,
            (false, false) => NeighborhoodClass::Quiescent,
        }
    }

    /// A neighborhood is mixed when both organisms appear in it.
    pub fn is_mixed(self) -> bool {
        self.class() == NeighborhoodClass::Mixed
    }
}

/// The 12 mixed neighborhoods in canonical (lexicographic) order.
///
/// This order is the index space of [`MixedAssignment`].
pub fn mixed_neighborhoods() -> [Neighborhood; 12] {
    let mut out = [Neighborhood::new(Color::White, Color::White, Color::White); 12];
    let mut n = 0;
    for nb in Neighborhood::all() {
        if nb.is_mixed() {
            out[n] = nb;
            n += 1;
        }
    }
    debug_assert_eq!(n, 12);
    out
}

/// Position of a mixed neighborhood within [`mixed_neighborhoods`],
/// or `None` for unmixed neighborhoods.
pub fn mixed_index(nb: Neighborhood) -> Option<usize> {
    if !nb.is_mixed() {
        return None;
    }
    Some(
        mixed_neighborhoods()
            .iter()
            .position(|m| *m == nb)
            .expect("mixed neighborhood present in canonical list"),
    )
}

/// An elementary one-dimensional two-color radius-1 rule, identified by its
/// Wolfram number.
///
/// Bit `k` of the number is the output for the neighborhood whose three
/// digits read as the binary numeral `k`: `⟨1,1,1⟩` is bit 7 down to
/// `⟨0,0,0⟩` at bit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementaryRule {
    number: u8,
    table: [u8; 8],
}

impl ElementaryRule {
    /// Decode a Wolfram rule number into its 8-entry lookup table.
    pub fn new(number: u8) -> ElementaryRule {
        let mut table = [0u8; 8];
        for (k, entry) in table.iter_mut().enumerate() {
            *entry = (number >> k) & 1;
        }
        ElementaryRule { number, table }
    }

    /// Reconstruct a rule from its table. Inverse of [`ElementaryRule::new`].
    pub fn from_table(table: [u8; 8]) -> ElementaryRule {
        let mut number = 0u8;
        for (k, &bit) in table.iter().enumerate() {
            debug_assert!(bit <= 1);
            number |= (bit & 1) << k;
        }
        ElementaryRule::new(number)
    }

    pub fn number(self) -> u8 {
        self.number
    }

    pub fn table(self) -> [u8; 8] {
        self.table
    }

    /// Output for a two-color neighborhood, each input in `{0, 1}`.
    #[inline]
    pub fn output(self, left: u8, center: u8, right: u8) -> u8 {
        debug_assert!(left <= 1 && center <= 1 && right <= 1);
        self.table[(left * 4 + center * 2 + right) as usize]
    }

    /// True when the rule maps the all-zero neighborhood to 1. The composite
    /// rule overrides that entry to keep the background quiescent.
    pub fn maps_quiescent_to_live(self) -> bool {
        self.table[0] == 1
    }
}

/// Contact outcomes for the 12 mixed neighborhoods, each one of the three
/// colors, indexed by the canonical order of [`mixed_neighborhoods`].
///
/// Entries are independent: permutation-equivalent neighborhoods may map to
/// different outcomes (the rule is not totalistic).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixedAssignment {
    outcomes: [Color; 12],
}

impl MixedAssignment {
    pub fn new(outcomes: [Color; 12]) -> MixedAssignment {
        MixedAssignment { outcomes }
    }

    /// Draw the 12 outcomes uniformly from `{white, grey, black}`, in
    /// canonical index order, consuming exactly 12 draws from the stream.
    pub fn sample(rng: &mut SplitMix64) -> MixedAssignment {
        let mut outcomes = [Color::White; 12];
        for slot in outcomes.iter_mut() {
            *slot = Color::from_u8((rng.next_u64() % 3) as u8).unwrap();
        }
        MixedAssignment { outcomes }
    }

    pub fn outcomes(self) -> [Color; 12] {
        self.outcomes
    }

    pub fn outcome(self, index: usize) -> Color {
        self.outcomes[index]
    }
}

/// The full 27-entry three-color rule assembled from two elementary rules
/// and a mixed-neighborhood assignment.
///
/// Invariants, checked exhaustively in tests:
/// - the all-white neighborhood maps to white;
/// - grey-domain neighborhoods follow the grey rule (digits read directly);
/// - black-domain neighborhoods follow the black rule with black read as 1;
/// - mixed neighborhoods follow the assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeRule {
    table: [Color; 27],
    black: ElementaryRule,
    grey: ElementaryRule,
    mixed: MixedAssignment,
    quiescent_override: bool,
}

/// Build the composite rule from its three parts.
///
/// When either elementary rule is odd (maps `⟨0,0,0⟩` to 1) the composite
/// overrides that entry to white; the override is recorded on the result.
pub fn compose(
    black: ElementaryRule,
    grey: ElementaryRule,
    mixed: MixedAssignment,
) -> CompositeRule {
    let mut table = [Color::White; 27];
    for nb in Neighborhood::all() {
        let [l, c, r] = nb.cells().map(Color::as_u8);
        table[nb.index()] = match nb.class() {
            NeighborhoodClass::Quiescent => Color::White,
            NeighborhoodClass::GreyDomain => match grey.output(l, c, r) {
                0 => Color::White,
                _ => Color::Grey,
            },
            NeighborhoodClass::BlackDomain => {
                // Black-domain digits are 0/2; read black as 1 for the lookup.
                match black.output(l / 2, c / 2, r / 2) {
                    0 => Color::White,
                    _ => Color::Black,
                }
            }
            NeighborhoodClass::Mixed => mixed.outcome(mixed_index(nb).unwrap()),
        };
    }
    CompositeRule {
        table,
        black,
        grey,
        mixed,
        quiescent_override: black.maps_quiescent_to_live() || grey.maps_quiescent_to_live(),
    }
}

impl CompositeRule {
    /// Output color for a neighborhood.
    #[inline]
    pub fn output(&self, nb: Neighborhood) -> Color {
        self.table[nb.index()]
    }

    /// Output color by canonical neighborhood index. The hot path of the
    /// stepper; `index` must be below 27.
    #[inline]
    pub fn output_by_index(&self, index: usize) -> Color {
        self.table[index]
    }

    pub fn table(&self) -> [Color; 27] {
        self.table
    }

    pub fn black_rule(&self) -> ElementaryRule {
        self.black
    }

    pub fn grey_rule(&self) -> ElementaryRule {
        self.grey
    }

    pub fn mixed(&self) -> MixedAssignment {
        self.mixed
    }

    /// True when composition had to force an odd elementary rule's
    /// all-zero entry back to white.
    pub fn quiescent_override(&self) -> bool {
        self.quiescent_override
    }
}
