use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pim_core::log::{parse_csv, parse_variants, parse_xes_lite, write_variants, CsvConfig};
use pim_core::tree::DEFAULT_LANGUAGE_LIMIT;
use pim_core::{
    discover_with_trace, evaluate, BlockGraph, DiscoveryOptions, Error, EventLog, FollowsGraphs,
    ProcessTree, QualityOptions, ScoreTable, Step,
};

/// Discover block-structured process trees from event logs.
#[derive(Parser)]
#[command(name = "pim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write results here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Print log statistics and a recursion summary to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Discover a process tree.
    Discover {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mining: MiningArgs,
        #[arg(long, value_enum, default_value_t = Emit::Tree)]
        emit: Emit,
    },
    /// Render the directly-follows graph, with filtered edges dashed.
    Graph {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short = 'f', long = "filter", default_value_t = 99.5)]
        filter: f64,
        /// Also draw the eventually-follows edges.
        #[arg(long)]
        ifg: bool,
    },
    /// Measure fitness, precision and simplicity of a tree against a log.
    Evaluate {
        /// File holding the tree in text form.
        tree: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        /// How often each loop may repeat when unfolding the model.
        #[arg(long, default_value_t = 2)]
        loop_bound: usize,
        /// Largest number of model traces to enumerate.
        #[arg(long, default_value_t = DEFAULT_LANGUAGE_LIMIT)]
        limit: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Report)]
        emit: ReportFormat,
    },
    /// Summarize a log.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        /// Dump the variants instead of the summary.
        #[arg(long)]
        variants: bool,
    },
    /// Print every pairwise relation score as CSV.
    Scores {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short = 'f', long = "filter", default_value_t = 100.0)]
        filter: f64,
    },
    /// Print the recursion steps taken by discovery.
    Trace {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mining: MiningArgs,
        /// Alternative cuts recorded per step.
        #[arg(long, default_value_t = 3)]
        top_k: usize,
        /// Emit the steps as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Input log; `-` or nothing reads standard input.
    input: Option<PathBuf>,
    /// Input format; guessed from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value = "case")]
    case_col: String,
    #[arg(long, default_value = "activity")]
    activity_col: String,
    /// Order events inside a case by this column.
    #[arg(long)]
    time_col: Option<String>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// The CSV input has no header row; columns are given by index.
    #[arg(long)]
    no_header: bool,
}

#[derive(Args)]
struct MiningArgs {
    /// Percentage of follows edges kept at each level.
    #[arg(short = 'f', long = "filter", default_value_t = 99.5)]
    filter: f64,
    /// Mine only the k most frequent activities.
    #[arg(long)]
    max_activities: Option<usize>,
    /// Largest alphabet searched exhaustively.
    #[arg(long, default_value_t = 12)]
    exhaustive_limit: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Xes,
    Variants,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Tree,
    Dot,
    BpmnJson,
    Json,
    Report,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Report,
    Json,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Core(Error::Parameter(_)) => 1,
            Failure::Core(Error::TooLarge(_) | Error::DepthExceeded(_)) => 3,
            Failure::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

impl InputArgs {
    fn path(&self) -> Option<&Path> {
        self.input.as_deref().filter(|p| p.as_os_str() != "-")
    }

    fn format(&self) -> Format {
        if let Some(f) = self.format {
            return f;
        }
        match self
            .path()
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
        {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            Some(e) if e.eq_ignore_ascii_case("xes") || e.eq_ignore_ascii_case("xml") => {
                Format::Xes
            }
            _ => Format::Variants,
        }
    }

    fn load(&self) -> CliResult<EventLog> {
        let bytes = match self.path() {
            Some(p) => fs::read(p)
                .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", p.display())))?,
            None => {
                let mut buf = Vec::new();
                io::stdin().read_to_end(&mut buf)?;
                buf
            }
        };
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Ok(EventLog::empty());
        }
        let log = match self.format() {
            Format::Variants => parse_variants(bytes.as_slice())?,
            Format::Xes => parse_xes_lite(bytes.as_slice())?,
            Format::Csv => {
                if !self.delimiter.is_ascii() {
                    return Err(Failure::Usage(format!(
                        "delimiter `{}` is not a single byte",
                        self.delimiter
                    )));
                }
                let config = CsvConfig {
                    case_column: self.case_col.clone(),
                    activity_column: self.activity_col.clone(),
                    timestamp_column: self.time_col.clone(),
                    delimiter: self.delimiter as u8,
                    has_header: !self.no_header,
                };
                parse_csv(bytes.as_slice(), &config)?
            }
        };
        Ok(log)
    }
}

impl MiningArgs {
    fn options(&self, trace_top_k: usize) -> DiscoveryOptions {
        DiscoveryOptions {
            filter_percent: self.filter,
            max_activities: self.max_activities,
            exhaustive_limit: self.exhaustive_limit,
            max_depth: None,
            trace_top_k,
        }
    }
}

fn tracing_enabled() -> bool {
    std::env::var("PIM_TRACE").is_ok_and(|v| !v.is_empty() && v != "0")
}

fn log_stats(log: &EventLog) {
    let s = log.stats();
    eprintln!(
        "log: {} traces ({} empty), {} events, {} activities, {} variants",
        s.traces, s.empty_traces, s.events, s.alphabet_size, s.distinct_variants
    );
    if log.skipped_events() > 0 {
        eprintln!("log: {} events skipped while reading", log.skipped_events());
    }
}

fn summarize(steps: &[Step]) {
    let (mut cuts, mut projections, mut skips, mut leaves) = (0, 0, 0, 0);
    let mut filtered = 0u64;
    for s in steps {
        match s {
            Step::Cut {
                filtered_events, ..
            } => {
                cuts += 1;
                filtered += filtered_events;
            }
            Step::Projection {
                filtered_events, ..
            } => {
                projections += 1;
                filtered += filtered_events;
            }
            Step::Skip { .. } => skips += 1,
            Step::BaseCase { .. } => leaves += 1,
        }
    }
    let depth = steps.iter().map(Step::depth).max().unwrap_or(0);
    eprintln!(
        "recursion: {cuts} cuts, {projections} projections, {skips} skips, {leaves} base cases, depth {depth}, {filtered} events filtered"
    );
}

fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}

fn render_tree(tree: &ProcessTree, log: &EventLog, emit: Emit) -> CliResult<String> {
    Ok(match emit {
        Emit::Tree => format!("{tree}\n"),
        Emit::Dot => tree.to_dot(),
        Emit::BpmnJson => to_json(&BlockGraph::from_tree(tree)),
        Emit::Json => to_json(&tree.to_json()),
        Emit::Report => {
            let report = evaluate(tree, log, QualityOptions::default())?;
            format!("{tree}\n\n{report}\n")
        }
    })
}

fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Discover {
            input,
            mining,
            emit,
        } => {
            let log = input.load()?;
            if cli.verbose {
                log_stats(&log);
            }
            let trace = tracing_enabled();
            let (tree, steps) = discover_with_trace(&log, &mining.options(1))?;
            if trace {
                for s in &steps {
                    eprintln!("{s}");
                }
            }
            if cli.verbose {
                summarize(&steps);
            }
            render_tree(&tree, &log, *emit)
        }
        Command::Graph { input, filter, ifg } => {
            let log = input.load()?;
            if cli.verbose {
                log_stats(&log);
            }
            let g = FollowsGraphs::build(&log);
            let kept = g.filter(*filter)?;
            Ok(kept.to_dot(Some(&g), *ifg))
        }
        Command::Evaluate {
            tree,
            input,
            loop_bound,
            limit,
            emit,
        } => {
            let text = fs::read_to_string(tree)
                .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", tree.display())))?;
            let tree: ProcessTree = text.trim().parse()?;
            let log = input.load()?;
            if cli.verbose {
                log_stats(&log);
            }
            let opts = QualityOptions {
                loop_bound: *loop_bound,
                language_limit: *limit,
            };
            let report = evaluate(&tree, &log, opts)?;
            Ok(match emit {
                ReportFormat::Report => format!("{report}\n"),
                ReportFormat::Json => format!("{}\n", report.to_json()),
            })
        }
        Command::Stats { input, variants } => {
            let log = input.load()?;
            if *variants {
                let mut out = Vec::new();
                write_variants(&log, &mut out)?;
                return Ok(String::from_utf8(out).expect("variants dump is UTF-8"));
            }
            let mut out = to_json(&log.stats());
            if log.skipped_events() > 0 {
                out.push_str(&format!("skipped events: {}\n", log.skipped_events()));
            }
            Ok(out)
        }
        Command::Scores { input, filter } => {
            let log = input.load()?;
            let g = FollowsGraphs::build(&log).filter(*filter)?;
            Ok(ScoreTable::new(&g).to_csv(&g))
        }
        Command::Trace {
            input,
            mining,
            top_k,
            json,
        } => {
            let log = input.load()?;
            if *top_k == 0 {
                return Err(Failure::Usage("--top-k must be at least 1".into()));
            }
            let (tree, steps) = discover_with_trace(&log, &mining.options(*top_k))?;
            if *json {
                return Ok(to_json(&steps));
            }
            let mut out = String::new();
            for s in &steps {
                out.push_str(&format!("{s}\n"));
            }
            out.push_str(&format!("result: {tree}\n"));
            Ok(out)
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result =
        run(&cli).and_then(|text| emit(cli.output.as_deref(), &text).map_err(Failure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pim: {e}");
            ExitCode::from(e.code())
        }
    }
}
