//! The exhaustive pairwise-interaction experiment.
//!
//! Every trial is a pure function of `(master_seed, black_rule, grey_rule,
//! sample_index, separation, steps, k)`: the derived seed fixes the mixed
//! assignment, the composed rule evolves the standard two-seed initial
//! condition, and the metrics of the result become one record. Trials are
//! distributed over a worker pool; records are emitted in canonical
//! `(black, grey, sample, separation)` order no matter how the pool
//! schedules them, so output files are byte-identical for any worker count.

use std::collections::BTreeMap;
use std::io;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::metrics::{self, MetricsError, OutcomeClass};
use crate::rng::{derive_seed, SplitMix64};
use crate::rule::{compose, ElementaryRule, MixedAssignment};
use crate::tape::{evolve, standard_initial, InitialKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("black rule set is empty")]
    EmptyBlackRules,
    #[error("grey rule set is empty")]
    EmptyGreyRules,
    #[error("rule set contains duplicate entry {0}")]
    DuplicateRule(u8),
    #[error("samples per pair must be at least 1")]
    ZeroSamples,
    #[error("steps must be at least 1")]
    ZeroSteps,
    #[error("separation list is empty")]
    EmptySeparations,
    #[error("separations must be at least 1")]
    ZeroSeparation,
    #[error("duplicate separation {0}")]
    DuplicateSeparation(u32),
    #[error("block length must be at least 1")]
    ZeroBlockLength,
    #[error("block length {k} exceeds the smallest analysis window {window}")]
    BlockLengthTooLarge { k: usize, window: usize },
    #[error("invalid rule set spec '{0}': expected 'all', numbers, or ranges like 0-63")]
    BadRuleSpec(String),
}

#[derive(Debug, Error)]
pub enum TournamentError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("failed to persist results: {0}")]
    Sink(#[from] io::Error),
}

/// The full description of a tournament; the output is a pure function of
/// this value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentPlan {
    pub black_rules: Vec<u8>,
    pub grey_rules: Vec<u8>,
    pub samples_per_pair: u32,
    pub steps: u32,
    pub separations: Vec<u32>,
    pub master_seed: u64,
    pub block_len: usize,
}

impl Default for ExperimentPlan {
    /// The default desk-scale plan: every rule pair, 32 assignment samples,
    /// 256 steps, separations 1, 20, and 40, block length 4.
    fn default() -> ExperimentPlan {
        ExperimentPlan {
            black_rules: (0..=255).collect(),
            grey_rules: (0..=255).collect(),
            samples_per_pair: 32,
            steps: 256,
            separations: vec![1, 20, 40],
            master_seed: 42,
            block_len: 4,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.black_rules.is_empty() {
            return Err(PlanError::EmptyBlackRules);
        }
        if self.grey_rules.is_empty() {
            return Err(PlanError::EmptyGreyRules);
        }
        for set in [&self.black_rules, &self.grey_rules] {
            let mut seen = [false; 256];
            for &rule in set {
                if seen[rule as usize] {
                    return Err(PlanError::DuplicateRule(rule));
                }
                seen[rule as usize] = true;
            }
        }
        if self.samples_per_pair == 0 {
            return Err(PlanError::ZeroSamples);
        }
        if self.steps == 0 {
            return Err(PlanError::ZeroSteps);
        }
        if self.separations.is_empty() {
            return Err(PlanError::EmptySeparations);
        }
        let mut seen = std::collections::BTreeSet::new();
        for &d in &self.separations {
            if d == 0 {
                return Err(PlanError::ZeroSeparation);
            }
            if !seen.insert(d) {
                return Err(PlanError::DuplicateSeparation(d));
            }
        }
        if self.block_len == 0 {
            return Err(PlanError::ZeroBlockLength);
        }
        // smallest analysis window over the plan: separation 1 gives an
        // initial support of 2 cells, widened by steps on each side
        let min_window = 2 + 2 * self.steps as usize;
        if self.block_len > min_window {
            return Err(PlanError::BlockLengthTooLarge {
                k: self.block_len,
                window: min_window,
            });
        }
        Ok(())
    }

    /// Total number of trial records the plan produces.
    pub fn trial_count(&self) -> u64 {
        self.black_rules.len() as u64
            * self.grey_rules.len() as u64
            * u64::from(self.samples_per_pair)
            * self.separations.len() as u64
    }

    pub fn pair_count(&self) -> u64 {
        self.black_rules.len() as u64 * self.grey_rules.len() as u64
    }
}

/// Parse a rule set spec: `all`, a number, a range `lo-hi`, or a
/// comma-separated mix of those. The result is sorted and deduplicated.
pub fn parse_rule_set(spec: &str) -> Result<Vec<u8>, PlanError> {
    let bad = || PlanError::BadRuleSpec(spec.to_string());
    let trimmed = spec.trim();
    if trimmed.eq_ignore_ascii_case("all") {
        return Ok((0..=255).collect());
    }
    let mut include = [false; 256];
    for token in trimmed.split(',') {
        let token = token.trim();
        if token.is_empty() {
            return Err(bad());
        }
        if let Some((lo, hi)) = token.split_once('-') {
            let lo: u8 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u8 = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            for rule in lo..=hi {
                include[rule as usize] = true;
            }
        } else {
            let rule: u8 = token.parse().map_err(|_| bad())?;
            include[rule as usize] = true;
        }
    }
    Ok((0u16..256)
        .filter(|r| include[*r as usize])
        .map(|r| r as u8)
        .collect())
}

/// Everything measured about one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub black_rule: u8,
    pub grey_rule: u8,
    pub sample_index: u32,
    pub separation: u32,
    pub derived_seed: u64,
    pub steps: u32,
    pub outcome: OutcomeClass,
    pub black_count: u64,
    pub grey_count: u64,
    pub white_count: u64,
    pub row_entropy: f64,
    pub block_entropy_k: f64,
    pub lz_complexity: u64,
}

/// Run a single trial: derive the seed, sample the contact assignment,
/// compose, evolve, and summarize. Pure in all arguments.
pub fn run_trial(
    black_rule: u8,
    grey_rule: u8,
    sample_index: u32,
    separation: u32,
    steps: u32,
    block_len: usize,
    master_seed: u64,
) -> Result<TrialRecord, TournamentError> {
    let derived = derive_seed(master_seed, black_rule, grey_rule, sample_index);
    let mut rng = SplitMix64::new(derived);
    let mixed = MixedAssignment::sample(&mut rng);
    let rule = compose(
        ElementaryRule::new(black_rule),
        ElementaryRule::new(grey_rule),
        mixed,
    );
    let initial = standard_initial(InitialKind::Interaction { separation })
        .expect("separation validated nonzero");
    let diagram = evolve(initial, rule, steps);
    let report = metrics::summarize(&diagram, block_len)?;
    let finals = report.final_counts();
    Ok(TrialRecord {
        black_rule,
        grey_rule,
        sample_index,
        separation,
        derived_seed: derived,
        steps,
        outcome: report.outcome,
        black_count: finals.black,
        grey_count: finals.grey,
        white_count: finals.white,
        row_entropy: report.final_row_entropy(),
        block_entropy_k: report.block_entropy_k,
        lz_complexity: report.lz_complexity,
    })
}

/// Receives trial records in canonical order as the tournament runs.
pub trait RecordSink {
    fn record(&mut self, record: &TrialRecord) -> io::Result<()>;
}

/// Counts records without storing them; useful for dry runs and tests.
#[derive(Debug, Default)]
pub struct CountingSink {
    pub records: u64,
}

impl RecordSink for CountingSink {
    fn record(&mut self, _record: &TrialRecord) -> io::Result<()> {
        self.records += 1;
        Ok(())
    }
}

impl<T: RecordSink + ?Sized> RecordSink for &mut T {
    fn record(&mut self, record: &TrialRecord) -> io::Result<()> {
        (**self).record(record)
    }
}

/// Mean and population standard deviation of one metric over a group of
/// trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricStats {
    pub mean: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct RunningStats {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl RunningStats {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn finish(self) -> MetricStats {
        if self.n == 0 {
            return MetricStats {
                mean: 0.0,
                stddev: 0.0,
            };
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0);
        MetricStats {
            mean,
            stddev: var.sqrt(),
        }
    }
}

/// Fraction of trials per outcome class; sums to 1 over a nonempty group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeFrequencies {
    pub black_only: f64,
    pub grey_only: f64,
    pub coexist: f64,
    pub extinct: f64,
}

impl OutcomeFrequencies {
    pub fn total(&self) -> f64 {
        self.black_only + self.grey_only + self.coexist + self.extinct
    }
}

/// Aggregate statistics for one rule pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairSummary {
    pub black_rule: u8,
    pub grey_rule: u8,
    pub trials: u64,
    pub outcomes: OutcomeFrequencies,
    pub row_entropy: MetricStats,
    pub block_entropy_k: MetricStats,
    pub lz_complexity: MetricStats,
}

#[derive(Debug, Default)]
struct PairAccumulator {
    trials: u64,
    outcome_counts: [u64; 4],
    row_entropy: RunningStats,
    block_entropy: RunningStats,
    lz: RunningStats,
}

impl PairAccumulator {
    fn push(&mut self, record: &TrialRecord) {
        self.trials += 1;
        let slot = match record.outcome {
            OutcomeClass::BlackOnly => 0,
            OutcomeClass::GreyOnly => 1,
            OutcomeClass::Coexist => 2,
            OutcomeClass::Extinct => 3,
        };
        self.outcome_counts[slot] += 1;
        self.row_entropy.push(record.row_entropy);
        self.block_entropy.push(record.block_entropy_k);
        self.lz.push(record.lz_complexity as f64);
    }

    fn finish(self, black_rule: u8, grey_rule: u8) -> PairSummary {
        let n = self.trials.max(1) as f64;
        PairSummary {
            black_rule,
            grey_rule,
            trials: self.trials,
            outcomes: OutcomeFrequencies {
                black_only: self.outcome_counts[0] as f64 / n,
                grey_only: self.outcome_counts[1] as f64 / n,
                coexist: self.outcome_counts[2] as f64 / n,
                extinct: self.outcome_counts[3] as f64 / n,
            },
            row_entropy: self.row_entropy.finish(),
            block_entropy_k: self.block_entropy.finish(),
            lz_complexity: self.lz.finish(),
        }
    }
}

// Pairs per parallel batch. A batch is computed in parallel and then
// drained to the sink in canonical order.
const PAIRS_PER_BATCH: usize = 64;

/// Run every trial of the plan on `workers` threads, stream records to the
/// sink in canonical `(black, grey, sample, separation)` order, and return
/// one summary per rule pair in the same pair order.
///
/// Output content is independent of worker count and scheduling.
pub fn run_tournament<S: RecordSink>(
    plan: &ExperimentPlan,
    workers: usize,
    sink: &mut S,
) -> Result<Vec<PairSummary>, TournamentError> {
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("worker pool must build");

    let pairs: Vec<(u8, u8)> = plan
        .black_rules
        .iter()
        .flat_map(|&b| plan.grey_rules.iter().map(move |&g| (b, g)))
        .collect();

    let mut summaries = Vec::with_capacity(pairs.len());
    for batch in pairs.chunks(PAIRS_PER_BATCH) {
        // canonical order within the batch: pair, then sample, then separation
        let coords: Vec<(u8, u8, u32, u32)> = batch
            .iter()
            .flat_map(|&(b, g)| {
                let seps = &plan.separations;
                (0..plan.samples_per_pair)
                    .flat_map(move |s| seps.iter().map(move |&d| (b, g, s, d)))
            })
            .collect();
        let records: Vec<TrialRecord> = pool.install(|| {
            coords
                .into_par_iter()
                .map(|(b, g, s, d)| {
                    run_trial(b, g, s, d, plan.steps, plan.block_len, plan.master_seed)
                })
                .collect::<Result<_, _>>()
        })?;

        let mut iter = records.iter();
        for &(b, g) in batch {
            let mut acc = PairAccumulator::default();
            for _ in 0..u64::from(plan.samples_per_pair) * plan.separations.len() as u64 {
                let record = iter.next().expect("batch holds every pair trial");
                sink.record(record)?;
                acc.push(record);
            }
            summaries.push(acc.finish(b, g));
        }
    }
    Ok(summaries)
}

/// Outcome statistics for one rule pair as the initial separation varies,
/// holding the sampled assignments fixed per sample index.
///
/// Returns one summary per separation, keyed by separation.
#[allow(clippy::too_many_arguments)]
pub fn sensitivity_sweep(
    black_rule: u8,
    grey_rule: u8,
    separations: &[u32],
    samples: u32,
    steps: u32,
    block_len: usize,
    master_seed: u64,
    workers: usize,
) -> Result<BTreeMap<u32, PairSummary>, TournamentError> {
    let plan = ExperimentPlan {
        black_rules: vec![black_rule],
        grey_rules: vec![grey_rule],
        samples_per_pair: samples,
        steps,
        separations: separations.to_vec(),
        master_seed,
        block_len,
    };
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("worker pool must build");
    let coords: Vec<(u32, u32)> = (0..samples)
        .flat_map(|s| separations.iter().map(move |&d| (s, d)))
        .collect();
    let records: Vec<TrialRecord> = pool.install(|| {
        coords
            .into_par_iter()
            .map(|(s, d)| run_trial(black_rule, grey_rule, s, d, steps, block_len, master_seed))
            .collect::<Result<_, _>>()
    })?;
    let mut accs: BTreeMap<u32, PairAccumulator> = separations
        .iter()
        .map(|&d| (d, PairAccumulator::default()))
        .collect();
    for record in &records {
        accs.get_mut(&record.separation)
            .expect("separation from plan")
            .push(record);
    }
    Ok(accs
        .into_iter()
        .map(|(d, acc)| (d, acc.finish(black_rule, grey_rule)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::classify_outcome;
    use crate::rule::Color;

    #[test]
    fn default_plan_counts() {
        let plan = ExperimentPlan::default();
        plan.validate().unwrap();
        assert_eq!(plan.pair_count(), 65_536);
        assert_eq!(plan.trial_count(), 65_536 * 32 * 3);
    }

    #[test]
    fn plan_validation_rejects_bad_plans() {
        let good = ExperimentPlan {
            black_rules: vec![90],
            grey_rules: vec![110],
            samples_per_pair: 1,
            steps: 8,
            separations: vec![1],
            master_seed: 0,
            block_len: 4,
        };
        good.validate().unwrap();

        let mut plan = good.clone();
        plan.black_rules.clear();
        assert_eq!(plan.validate(), Err(PlanError::EmptyBlackRules));

        let mut plan = good.clone();
        plan.grey_rules = vec![4, 4];
        assert_eq!(plan.validate(), Err(PlanError::DuplicateRule(4)));

        let mut plan = good.clone();
        plan.samples_per_pair = 0;
        assert_eq!(plan.validate(), Err(PlanError::ZeroSamples));

        let mut plan = good.clone();
        plan.steps = 0;
        assert_eq!(plan.validate(), Err(PlanError::ZeroSteps));

        let mut plan = good.clone();
        plan.separations = vec![1, 0];
        assert_eq!(plan.validate(), Err(PlanError::ZeroSeparation));

        let mut plan = good.clone();
        plan.separations = vec![5, 5];
        assert_eq!(plan.validate(), Err(PlanError::DuplicateSeparation(5)));

        let mut plan = good.clone();
        plan.block_len = 0;
        assert_eq!(plan.validate(), Err(PlanError::ZeroBlockLength));

        let mut plan = good;
        plan.block_len = 1000;
        assert_eq!(
            plan.validate(),
            Err(PlanError::BlockLengthTooLarge { k: 1000, window: 18 })
        );
    }

    #[test]
    fn rule_set_specs() {
        assert_eq!(parse_rule_set("all").unwrap().len(), 256);
        assert_eq!(parse_rule_set("90").unwrap(), vec![90]);
        assert_eq!(parse_rule_set("110,90").unwrap(), vec![90, 110]);
        assert_eq!(parse_rule_set("0-3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_rule_set("0-2,90,2").unwrap(), vec![0, 1, 2, 90]);
        assert!(parse_rule_set("").is_err());
        assert!(parse_rule_set("abc").is_err());
        assert!(parse_rule_set("300").is_err());
        assert!(parse_rule_set("9-5").is_err());
    }

    #[test]
    fn run_trial_is_deterministic() {
        let a = run_trial(110, 90, 3, 7, 32, 4, 42).unwrap();
        let b = run_trial(110, 90, 3, 7, 32, 4, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.derived_seed, derive_seed(42, 110, 90, 3));
    }

    #[test]
    fn rule_0_pair_goes_extinct_immediately() {
        // rule 0 maps everything to white; with the seeds 40 cells apart no
        // mixed neighborhood ever forms, so the first step clears the tape
        let record = run_trial(0, 0, 0, 40, 1, 1, 42).unwrap();
        assert_eq!(record.outcome, OutcomeClass::Extinct);
        assert_eq!(record.black_count, 0);
        assert_eq!(record.grey_count, 0);

        let record = run_trial(0, 0, 0, 40, 96, 1, 42).unwrap();
        assert_eq!(record.outcome, OutcomeClass::Extinct);
    }

    #[test]
    fn forcing_assignment_keeps_black_alive_through_contact() {
        // bypass sampling: every contact resolves to black, so grey can
        // never claim a contested cell
        let all_black = MixedAssignment::new([Color::Black; 12]);
        let rule = compose(ElementaryRule::new(90), ElementaryRule::new(110), all_black);
        let initial = standard_initial(InitialKind::Interaction { separation: 20 }).unwrap();
        let diagram = evolve(initial, rule, 128);
        let outcome = classify_outcome(&diagram);
        assert!(
            matches!(outcome, OutcomeClass::BlackOnly | OutcomeClass::Coexist),
            "expected black to survive, got {outcome:?}"
        );
    }

    #[test]
    fn tournament_counting_and_order() {
        let plan = ExperimentPlan {
            black_rules: vec![90, 110],
            grey_rules: vec![30, 90],
            samples_per_pair: 3,
            steps: 16,
            separations: vec![1, 9],
            master_seed: 7,
            block_len: 4,
        };

        struct Collect(Vec<(u8, u8, u32, u32)>);
        impl RecordSink for Collect {
            fn record(&mut self, r: &TrialRecord) -> io::Result<()> {
                self.0
                    .push((r.black_rule, r.grey_rule, r.sample_index, r.separation));
                Ok(())
            }
        }

        let mut sink = Collect(Vec::new());
        let summaries = run_tournament(&plan, 2, &mut sink).unwrap();
        assert_eq!(sink.0.len() as u64, plan.trial_count());
        assert_eq!(summaries.len() as u64, plan.pair_count());

        let mut expected = Vec::new();
        for &b in &plan.black_rules {
            for &g in &plan.grey_rules {
                for s in 0..plan.samples_per_pair {
                    for &d in &plan.separations {
                        expected.push((b, g, s, d));
                    }
                }
            }
        }
        assert_eq!(sink.0, expected);

        for summary in &summaries {
            assert_eq!(summary.trials, 6);
            assert!((summary.outcomes.total() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_pair_single_trial() {
        let plan = ExperimentPlan {
            black_rules: vec![90],
            grey_rules: vec![110],
            samples_per_pair: 1,
            steps: 8,
            separations: vec![4],
            master_seed: 1,
            block_len: 2,
        };
        let mut sink = CountingSink::default();
        let summaries = run_tournament(&plan, 1, &mut sink).unwrap();
        assert_eq!(sink.records, 1);
        assert_eq!(summaries.len(), 1);
        assert_eq!(summaries[0].trials, 1);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let plan = ExperimentPlan {
            black_rules: vec![30, 90, 110],
            grey_rules: vec![90, 110],
            samples_per_pair: 4,
            steps: 24,
            separations: vec![1, 11],
            master_seed: 99,
            block_len: 4,
        };

        struct Collect(Vec<TrialRecord>);
        impl RecordSink for Collect {
            fn record(&mut self, r: &TrialRecord) -> io::Result<()> {
                self.0.push(r.clone());
                Ok(())
            }
        }

        let mut one = Collect(Vec::new());
        let summaries_one = run_tournament(&plan, 1, &mut one).unwrap();
        let mut eight = Collect(Vec::new());
        let summaries_eight = run_tournament(&plan, 8, &mut eight).unwrap();
        assert_eq!(one.0, eight.0);
        assert_eq!(summaries_one, summaries_eight);
    }

    #[test]
    fn no_contact_when_separation_outruns_light_cones() {
        // d > 2T + 1: the organisms' light cones cannot touch, and both
        // rule-90 solos survive, so every assignment coexists
        let steps = 12;
        let summaries = sensitivity_sweep(90, 90, &[2 * steps + 2], 16, steps, 4, 5, 2).unwrap();
        let summary = summaries[&(2 * steps + 2)];
        assert_eq!(summary.trials, 16);
        assert_eq!(summary.outcomes.coexist, 1.0);
    }

    #[test]
    fn sensitivity_sweep_frequencies_sum_to_one() {
        let summaries = sensitivity_sweep(110, 90, &[1, 8, 40], 12, 48, 4, 21, 2).unwrap();
        assert_eq!(summaries.len(), 3);
        for (d, summary) in &summaries {
            assert_eq!(summary.trials, 12, "separation {d}");
            assert!((summary.outcomes.total() - 1.0).abs() < 1e-9);
        }
    }
}
