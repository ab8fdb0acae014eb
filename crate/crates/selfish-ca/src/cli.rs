//! Command-line interface and the on-disk file formats.
//!
//! Four subcommands: `run` (one evolution, PPM + metrics JSON), `render`
//! (PPM only), `tournament` (CSV of trial records plus summary JSON), and
//! `decode` (rule-table listing). Every flag has a documented default;
//! validation happens before any computation starts.
//!
//! File formats:
//! - Trial CSV: one provenance comment line, the fixed column header, one
//!   row per trial in canonical order, and a `# records: N` footer. A file
//!   without the footer is partial.
//! - Summary JSON: provenance plus one aggregate object per rule pair.
//! - Metrics JSON: provenance plus the full metrics report of a single run.
//! - PPM: the bit-exact P6 stream produced by [`crate::render::render_ppm`];
//!   provenance for images lives in the sibling metrics/summary files, never
//!   inside the pixel stream.
//!
//! The provenance line records the content-determining flags only; worker
//! count and output paths do not change results and are excluded, so equal
//! plans give byte-identical outputs.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::metrics::{summarize, MetricsReport};
use crate::render::{render_ppm, ImageSpec};
use crate::rng::{derive_seed, SplitMix64};
use crate::rule::{compose, mixed_index, CompositeRule, ElementaryRule, MixedAssignment, Neighborhood};
use crate::tape::{evolve, standard_initial, InitialKind, Window};
use crate::tournament::{
    parse_rule_set, ExperimentPlan, PairSummary, RecordSink, TournamentError, TrialRecord,
};

const TOOL: &str = "selfish-ca";
const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Simulate and measure competing three-color cellular automata.
#[derive(Debug, Parser)]
#[command(name = TOOL, version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one run and write a spacetime image plus a metrics report.
    Run(RunArgs),
    /// Evolve one run and write only the spacetime image.
    Render(RenderArgs),
    /// Run the pairwise-interaction tournament and write CSV + summary.
    Tournament(TournamentArgs),
    /// Print the composed 27-entry rule table for one pair and seed.
    Decode(DecodeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solo {
    Black,
    Grey,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Black organism rule number.
    #[arg(long, default_value_t = 90)]
    pub black: u8,
    /// Grey organism rule number.
    #[arg(long, default_value_t = 110)]
    pub grey: u8,
    /// Evolution steps.
    #[arg(long, default_value_t = 256)]
    pub steps: u32,
    /// Initial separation between the black and grey seeds.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 40)]
    pub sep: u32,
    /// Master seed; the mixed assignment derives from it.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Sample index within the master seed's stream.
    #[arg(long, default_value_t = 0)]
    pub sample: u32,
    /// Block length for the block-entropy metric.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize), default_value_t = 4)]
    pub k: usize,
    /// Run a single organism instead of an interaction.
    #[arg(long, value_enum)]
    pub solo: Option<Solo>,
    /// Pixels per cell in the output image.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 1)]
    pub scale: u32,
    /// Tape window to render, as `start:end` (half-open); defaults to the
    /// light-cone span.
    #[arg(long, value_parser = parse_window_arg)]
    pub window: Option<Window>,
    /// Output image path.
    #[arg(long, default_value = "diagram.ppm")]
    pub out: PathBuf,
    /// Output metrics path.
    #[arg(long, default_value = "metrics.json")]
    pub metrics: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, default_value_t = 90)]
    pub black: u8,
    #[arg(long, default_value_t = 110)]
    pub grey: u8,
    #[arg(long, default_value_t = 256)]
    pub steps: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 40)]
    pub sep: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub sample: u32,
    #[arg(long, value_enum)]
    pub solo: Option<Solo>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 1)]
    pub scale: u32,
    #[arg(long, value_parser = parse_window_arg)]
    pub window: Option<Window>,
    #[arg(long, default_value = "diagram.ppm")]
    pub out: PathBuf,
}

/// A parsed rule set; needed because a bare `Vec<u8>` means a repeated
/// flag to clap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet(pub Vec<u8>);

fn parse_rule_set_arg(spec: &str) -> Result<RuleSet, String> {
    parse_rule_set(spec).map(RuleSet).map_err(|e| e.to_string())
}

fn parse_window_arg(spec: &str) -> Result<Window, String> {
    let err = || format!("expected start:end with end > start, got '{spec}'");
    let (lo, hi) = spec.split_once(':').ok_or_else(err)?;
    let lo: i64 = lo.trim().parse().map_err(|_| err())?;
    let hi: i64 = hi.trim().parse().map_err(|_| err())?;
    if hi <= lo {
        return Err(err());
    }
    Ok(Window::new(lo, (hi - lo) as usize))
}

#[derive(Debug, Args)]
pub struct TournamentArgs {
    /// Black rule set: `all`, numbers, or ranges (e.g. `0-63,90`).
    #[arg(long, value_parser = parse_rule_set_arg, default_value = "all")]
    pub black_rules: RuleSet,
    /// Grey rule set, same syntax.
    #[arg(long, value_parser = parse_rule_set_arg, default_value = "all")]
    pub grey_rules: RuleSet,
    /// Mixed-assignment samples per rule pair.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 32)]
    pub samples: u32,
    /// Evolution steps per trial.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 256)]
    pub steps: u32,
    /// Seed separations, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..), default_value = "1,20,40")]
    pub seps: Vec<u32>,
    /// Master seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Block length for the block-entropy metric.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize), default_value_t = 4)]
    pub k: usize,
    /// Worker threads.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize), default_value_t = default_workers())]
    pub workers: usize,
    /// Output CSV path.
    #[arg(long, default_value = "results.csv")]
    pub out: PathBuf,
    /// Output summary JSON path.
    #[arg(long, default_value = "summary.json")]
    pub summary: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long, default_value_t = 90)]
    pub black: u8,
    #[arg(long, default_value_t = 110)]
    pub grey: u8,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub sample: u32,
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

impl TournamentArgs {
    pub fn plan(&self) -> ExperimentPlan {
        ExperimentPlan {
            black_rules: self.black_rules.0.clone(),
            grey_rules: self.grey_rules.0.clone(),
            samples_per_pair: self.samples,
            steps: self.steps,
            separations: self.seps.clone(),
            master_seed: self.seed,
            block_len: self.k,
        }
    }
}

/// Errors surfaced to the user; validation failures exit with 2 like flag
/// parse errors, runtime failures with 1.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> CliError {
        CliError::Runtime(e.to_string())
    }
}

impl From<TournamentError> for CliError {
    fn from(e: TournamentError) -> CliError {
        match e {
            TournamentError::Plan(p) => CliError::Validation(p.to_string()),
            TournamentError::Metrics(m) => CliError::Validation(m.to_string()),
            TournamentError::Sink(s) => CliError::Runtime(s.to_string()),
        }
    }
}

/// Parse the process arguments and run the selected command.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => cmd_run(&args),
        Command::Render(args) => cmd_render(&args),
        Command::Tournament(args) => cmd_tournament(&args),
        Command::Decode(args) => cmd_decode(&args, &mut io::stdout().lock()),
    }
}

/// Provenance embedded in JSON outputs and, as a comment line, in CSVs.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    /// Canonical content-determining flag set.
    pub flags: String,
    pub master_seed: u64,
}

impl Provenance {
    fn new(flags: String, master_seed: u64) -> Provenance {
        Provenance {
            tool: TOOL,
            version: VERSION,
            flags,
            master_seed,
        }
    }

    fn comment_line(&self) -> String {
        format!("# {} v{} {}", self.tool, self.version, self.flags)
    }
}

/// Collapse a sorted rule set back to the compact spec syntax.
pub fn format_rule_set(rules: &[u8]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < rules.len() {
        let start = rules[i];
        let mut end = start;
        while i + 1 < rules.len() && rules[i + 1] == end + 1 {
            i += 1;
            end = rules[i];
        }
        match end - start {
            0 => parts.push(format!("{start}")),
            1 => {
                parts.push(format!("{start}"));
                parts.push(format!("{end}"));
            }
            _ => parts.push(format!("{start}-{end}")),
        }
        i += 1;
    }
    parts.join(",")
}

fn join_u32(values: &[u32]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn tournament_flags(plan: &ExperimentPlan) -> String {
    format!(
        "tournament --black-rules {} --grey-rules {} --samples {} --steps {} --seps {} --seed {} --k {}",
        format_rule_set(&plan.black_rules),
        format_rule_set(&plan.grey_rules),
        plan.samples_per_pair,
        plan.steps,
        join_u32(&plan.separations),
        plan.master_seed,
        plan.block_len,
    )
}

fn run_flags(args: &RunArgs) -> String {
    let solo = match args.solo {
        Some(Solo::Black) => " --solo black",
        Some(Solo::Grey) => " --solo grey",
        None => "",
    };
    format!(
        "run{solo} --black {} --grey {} --steps {} --sep {} --seed {} --sample {} --k {} --scale {}",
        args.black, args.grey, args.steps, args.sep, args.seed, args.sample, args.k, args.scale,
    )
}

/// Write a file atomically: the target path either keeps its old content or
/// holds the complete new content, never a partial write.
fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Metrics JSON payload for a single run.
#[derive(Debug, Serialize)]
pub struct RunReportFile {
    pub provenance: Provenance,
    pub mode: String,
    pub black_rule: u8,
    pub grey_rule: u8,
    pub steps: u32,
    pub separation: Option<u32>,
    pub sample: u32,
    pub derived_seed: u64,
    pub quiescent_override: bool,
    pub image: String,
    pub metrics: MetricsReport,
}

fn composed_from_seed(black: u8, grey: u8, master_seed: u64, sample: u32) -> (CompositeRule, u64) {
    let derived = derive_seed(master_seed, black, grey, sample);
    let mut rng = SplitMix64::new(derived);
    let mixed = MixedAssignment::sample(&mut rng);
    (
        compose(ElementaryRule::new(black), ElementaryRule::new(grey), mixed),
        derived,
    )
}

struct PreparedRun {
    rule: CompositeRule,
    derived_seed: u64,
    mode: &'static str,
    separation: Option<u32>,
    diagram: crate::tape::SpacetimeDiagram,
}

fn prepare_run(
    black: u8,
    grey: u8,
    steps: u32,
    sep: u32,
    seed: u64,
    sample: u32,
    solo: Option<Solo>,
) -> Result<PreparedRun, CliError> {
    let (rule, derived_seed) = composed_from_seed(black, grey, seed, sample);
    let (kind, mode, separation) = match solo {
        Some(Solo::Black) => (InitialKind::SoloBlack, "solo-black", None),
        Some(Solo::Grey) => (InitialKind::SoloGrey, "solo-grey", None),
        None => (
            InitialKind::Interaction { separation: sep },
            "interaction",
            Some(sep),
        ),
    };
    let initial = standard_initial(kind).map_err(|e| CliError::Validation(e.to_string()))?;
    let diagram = evolve(initial, rule, steps);
    Ok(PreparedRun {
        rule,
        derived_seed,
        mode,
        separation,
        diagram,
    })
}

fn image_spec(diagram: &crate::tape::SpacetimeDiagram, window: Option<Window>, scale: u32) -> ImageSpec {
    let mut spec = ImageSpec::light_cone(diagram).with_scale(scale);
    if let Some(window) = window {
        spec = spec.with_window(window);
    }
    spec
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let run = prepare_run(
        args.black,
        args.grey,
        args.steps,
        args.sep,
        args.seed,
        args.sample,
        args.solo,
    )?;
    let report =
        summarize(&run.diagram, args.k).map_err(|e| CliError::Validation(e.to_string()))?;
    let spec = image_spec(&run.diagram, args.window, args.scale);
    let image = render_ppm(&run.diagram, &spec);

    let payload = RunReportFile {
        provenance: Provenance::new(run_flags(args), args.seed),
        mode: run.mode.to_string(),
        black_rule: args.black,
        grey_rule: args.grey,
        steps: args.steps,
        separation: run.separation,
        sample: args.sample,
        derived_seed: run.derived_seed,
        quiescent_override: run.rule.quiescent_override(),
        image: args.out.display().to_string(),
        metrics: report,
    };
    let json = serde_json::to_vec_pretty(&payload).expect("report serializes");

    write_atomic(&args.out, &image.bytes)?;
    write_atomic(&args.metrics, &json)?;
    if image.clipped {
        eprintln!("warning: render window clips live cells");
    }
    println!(
        "wrote {} and {} — outcome: {}",
        args.out.display(),
        args.metrics.display(),
        payload.metrics.outcome,
    );
    Ok(())
}

pub fn cmd_render(args: &RenderArgs) -> Result<(), CliError> {
    let run = prepare_run(
        args.black,
        args.grey,
        args.steps,
        args.sep,
        args.seed,
        args.sample,
        args.solo,
    )?;
    let spec = image_spec(&run.diagram, args.window, args.scale);
    let image = render_ppm(&run.diagram, &spec);
    write_atomic(&args.out, &image.bytes)?;
    if image.clipped {
        eprintln!("warning: render window clips live cells");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

/// Streams trial records as CSV rows in the documented format.
pub struct CsvRecordSink<W: Write> {
    writer: W,
    records: u64,
    progress_every: u64,
    total: u64,
}

impl<W: Write> CsvRecordSink<W> {
    /// Write the provenance line and column header, ready for records.
    pub fn new(mut writer: W, plan: &ExperimentPlan) -> io::Result<CsvRecordSink<W>> {
        writeln!(
            writer,
            "{}",
            Provenance::new(tournament_flags(plan), plan.master_seed).comment_line()
        )?;
        writeln!(
            writer,
            "black_rule,grey_rule,sample,separation,seed,steps,outcome,black_count,grey_count,\
             white_count,row_entropy,block_entropy_k,lz_complexity"
        )?;
        Ok(CsvRecordSink {
            writer,
            records: 0,
            progress_every: 0,
            total: plan.trial_count(),
        })
    }

    /// Report progress to stderr every `every` records.
    pub fn with_progress(mut self, every: u64) -> CsvRecordSink<W> {
        self.progress_every = every;
        self
    }

    /// Write the completeness footer and return the record count. A CSV
    /// without this footer is a partial result.
    pub fn finish(mut self) -> io::Result<u64> {
        writeln!(self.writer, "# records: {}", self.records)?;
        self.writer.flush()?;
        Ok(self.records)
    }
}

impl<W: Write> RecordSink for CsvRecordSink<W> {
    fn record(&mut self, r: &TrialRecord) -> io::Result<()> {
        writeln!(
            self.writer,
            "{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{}",
            r.black_rule,
            r.grey_rule,
            r.sample_index,
            r.separation,
            r.derived_seed,
            r.steps,
            r.outcome,
            r.black_count,
            r.grey_count,
            r.white_count,
            r.row_entropy,
            r.block_entropy_k,
            r.lz_complexity,
        )?;
        self.records += 1;
        if self.progress_every > 0 && self.records % self.progress_every == 0 {
            eprintln!(
                "tournament: {}/{} trials ({:.1}%)",
                self.records,
                self.total,
                100.0 * self.records as f64 / self.total as f64
            );
        }
        Ok(())
    }
}

/// Summary JSON payload for a tournament.
#[derive(Debug, Serialize)]
pub struct SummaryFile {
    pub provenance: Provenance,
    pub trials: u64,
    pub pairs: Vec<PairSummary>,
}

pub fn write_summary_json(
    path: &Path,
    plan: &ExperimentPlan,
    pairs: Vec<PairSummary>,
) -> io::Result<()> {
    let payload = SummaryFile {
        provenance: Provenance::new(tournament_flags(plan), plan.master_seed),
        trials: plan.trial_count(),
        pairs,
    };
    let json = serde_json::to_vec(&payload).expect("summary serializes");
    write_atomic(path, &json)
}

pub fn cmd_tournament(args: &TournamentArgs) -> Result<(), CliError> {
    let plan = args.plan();
    plan.validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;

    // all validation precedes all computation: fail on unwritable outputs
    // before the first trial runs
    let csv_file = File::create(&args.out).map_err(|e| {
        CliError::Validation(format!("cannot write {}: {e}", args.out.display()))
    })?;
    let summary_probe = File::create(&args.summary).map_err(|e| {
        CliError::Validation(format!("cannot write {}: {e}", args.summary.display()))
    })?;
    drop(summary_probe);

    let total = plan.trial_count();
    let progress = if total >= 200_000 { total / 50 } else { 0 };
    let mut sink = CsvRecordSink::new(BufWriter::new(csv_file), &plan)?.with_progress(progress);
    let summaries = crate::tournament::run_tournament(&plan, args.workers, &mut sink)?;
    let records = sink.finish()?;

    write_summary_json(&args.summary, &plan, summaries)?;
    println!(
        "wrote {} ({} records) and {}",
        args.out.display(),
        records,
        args.summary.display(),
    );
    Ok(())
}

fn two_color_digits(k: usize) -> (u8, u8, u8) {
    ((k >> 2) as u8 & 1, (k >> 1) as u8 & 1, k as u8 & 1)
}

pub fn cmd_decode(args: &DecodeArgs, out: &mut impl Write) -> Result<(), CliError> {
    let (rule, derived) = composed_from_seed(args.black, args.grey, args.seed, args.sample);
    writeln!(
        out,
        "# {TOOL} v{VERSION} decode --black {} --grey {} --seed {} --sample {}",
        args.black, args.grey, args.seed, args.sample
    )?;
    writeln!(out, "# derived_seed: {derived}")?;
    if rule.quiescent_override() {
        writeln!(out, "# quiescent override applied: ⟨0,0,0⟩ forced to 0")?;
    }
    writeln!(out, "black rule {} (white/black):", args.black)?;
    for k in 0..8 {
        let (l, c, r) = two_color_digits(k);
        writeln!(out, "  ⟨{l},{c},{r}⟩ -> {}", rule.black_rule().table()[k])?;
    }
    writeln!(out, "grey rule {} (white/grey):", args.grey)?;
    for k in 0..8 {
        let (l, c, r) = two_color_digits(k);
        writeln!(out, "  ⟨{l},{c},{r}⟩ -> {}", rule.grey_rule().table()[k])?;
    }
    writeln!(out, "composite rule (27 entries):")?;
    for nb in Neighborhood::all() {
        let [l, c, r] = nb.cells().map(|c| c.as_u8());
        let marker = if mixed_index(nb).is_some() {
            "  [mixed]"
        } else {
            ""
        };
        writeln!(
            out,
            "  ⟨{l},{c},{r}⟩ -> {}{marker}",
            rule.output(nb).as_u8()
        )?;
    }
    Ok(())
}
