//! Competing-organism cellular automata on an unbounded tape.
//!
//! Two elementary two-color rules — a black organism and a grey organism —
//! are composed into one three-color radius-1 rule. Each organism grows
//! into white resource cells by its own rule; the 12 neighborhoods where
//! the organisms touch resolve by a randomly assigned contact outcome,
//! fixed once at rule-construction time. After composition the automaton
//! is fully deterministic.
//!
//! The crate covers the whole experiment pipeline:
//!
//! - [`rule`]: Wolfram rule decoding, mixed-contact assignments, and
//!   composition into the 27-entry table.
//! - [`tape`]: exact evolution of finite-support configurations over the
//!   quiescent background.
//! - [`metrics`]: Shannon row/block entropies, LZ78 phrase counts, and
//!   survival classification.
//! - [`tournament`]: deterministic, parallel sweeps over rule pairs with
//!   per-trial seed derivation.
//! - [`render`]: bit-exact PPM images of spacetime diagrams.
//! - [`rng`]: the documented SplitMix64 generator behind every random
//!   choice.
//! - [`cli`]: the `selfish-ca` command-line tool and its file formats.
//!
//! Start with the runnable examples (`cargo run --example solo_patterns`)
//! or the [`cli`] module.

pub mod cli;
pub mod metrics;
pub mod render;
pub mod rng;
pub mod rule;
pub mod tape;
pub mod tournament;

pub use metrics::{
    block_entropy, classify_outcome, lz_complexity, row_entropy, summarize, MetricsError,
    MetricsReport, OutcomeClass,
};
pub use render::{render_ppm, ImageSpec, RenderOutput};
pub use rng::{derive_seed, SplitMix64};
pub use rule::{
    compose, mixed_neighborhoods, Color, CompositeRule, ElementaryRule, MixedAssignment,
    Neighborhood, NeighborhoodClass,
};
pub use tape::{
    evolve, standard_initial, step, Configuration, InitialKind, SpacetimeDiagram, TapeError,
    Window,
};
pub use tournament::{
    run_tournament, run_trial, sensitivity_sweep, ExperimentPlan, PairSummary, RecordSink,
    TournamentError, TrialRecord,
};
