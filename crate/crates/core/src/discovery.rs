//! The recursive discovery loop: base cases, filtering, cut search, splitting
//! and tree assembly.

use serde::Serialize;

use crate::cut::{rank_cuts, Cut, LogShape, Operator, SearchOptions};
use crate::error::{Error, Result};
use crate::graphs::FollowsGraphs;
use crate::log::{ActivityId, EventLog};
use crate::split::{base_case, split, BaseCase};
use crate::tree::ProcessTree;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscoveryOptions {
    /// Percentage of follows edges kept at every recursion level.
    pub filter_percent: f64,
    /// Restrict the log to this many most frequent activities up front.
    pub max_activities: Option<usize>,
    pub exhaustive_limit: usize,
    /// Maximum number of nested cuts; defaults to `|Σ| + 2`.
    pub max_depth: Option<usize>,
    /// Alternatives recorded per cut step by [`discover_with_trace`].
    pub trace_top_k: usize,
}

impl Default for DiscoveryOptions {
    fn default() -> Self {
        Self {
            filter_percent: 99.5,
            max_activities: None,
            exhaustive_limit: SearchOptions::default().exhaustive_limit,
            max_depth: None,
            trace_top_k: 1,
        }
    }
}

impl DiscoveryOptions {
    pub fn with_filter(filter_percent: f64) -> Self {
        Self {
            filter_percent,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=100.0).contains(&self.filter_percent) {
            return Err(Error::Parameter(format!(
                "filter percentage {} is outside [0, 100]",
                self.filter_percent
            )));
        }
        if self.max_activities == Some(0) {
            return Err(Error::Parameter("max activities must be at least 1".into()));
        }
        Ok(())
    }
}

/// A cut rendered with labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutRecord {
    pub operator: Operator,
    pub sigma1: Vec<String>,
    pub sigma2: Vec<String>,
    pub score: f64,
}

impl CutRecord {
    fn new(cut: &Cut, log: &EventLog) -> Self {
        let labels = |xs: &[ActivityId]| xs.iter().map(|&a| log.label(a).to_owned()).collect();
        Self {
            operator: cut.operator,
            sigma1: labels(&cut.sigma1),
            sigma2: labels(&cut.sigma2),
            score: cut.score,
        }
    }
}

impl std::fmt::Display for CutRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}({{{}}}, {{{}}}) {:.4}",
            self.operator,
            self.sigma1.join(","),
            self.sigma2.join(","),
            self.score
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    Cut {
        depth: usize,
        cut: CutRecord,
        /// Runner-up cuts, best first.
        alternatives: Vec<CutRecord>,
        filtered_events: u64,
    },
    /// Activities dropped by the follows-graph filter and projected out.
    Projection {
        depth: usize,
        removed: Vec<String>,
        filtered_events: u64,
    },
    /// `×(τ, ·)` around the non-empty traces.
    Skip {
        depth: usize,
        empty_traces: u64,
    },
    BaseCase {
        depth: usize,
        tree: String,
    },
}

impl Step {
    pub fn depth(&self) -> usize {
        match self {
            Step::Cut { depth, .. }
            | Step::Projection { depth, .. }
            | Step::Skip { depth, .. }
            | Step::BaseCase { depth, .. } => *depth,
        }
    }
}

impl std::fmt::Display for Step {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let indent = "  ".repeat(self.depth());
        match self {
            Step::Cut {
                cut,
                alternatives,
                filtered_events,
                ..
            } => {
                write!(f, "{indent}cut {cut} (filtered {filtered_events})")?;
                for alt in alternatives {
                    write!(f, "\n{indent}  alt {alt}")?;
                }
                Ok(())
            }
            Step::Projection {
                removed,
                filtered_events,
                ..
            } => write!(
                f,
                "{indent}drop {{{}}} ({filtered_events} events)",
                removed.join(",")
            ),
            Step::Skip { empty_traces, .. } => {
                write!(f, "{indent}skip ({empty_traces} empty traces)")
            }
            Step::BaseCase { tree, .. } => write!(f, "{indent}base {tree}"),
        }
    }
}

/// Activities ranked by frequency (ties by id), truncated to `k`.
pub fn most_frequent(log: &EventLog, k: usize) -> Vec<ActivityId> {
    let freq = log.activity_frequencies();
    let mut ranked = log.alphabet();
    ranked.sort_by(|a, b| freq[b.index()].cmp(&freq[a.index()]).then(a.cmp(b)));
    ranked.truncate(k);
    ranked.sort();
    ranked
}

struct Recursion<'a> {
    opts: &'a DiscoveryOptions,
    max_depth: usize,
    steps: Option<Vec<Step>>,
}

impl Recursion<'_> {
    fn record(&mut self, step: impl FnOnce() -> Step) {
        if let Some(steps) = self.steps.as_mut() {
            steps.push(step());
        }
    }

    fn run(&mut self, log: &EventLog, depth: usize) -> Result<ProcessTree> {
        match base_case(log) {
            Some(BaseCase::Skip) => {
                self.record(|| Step::Skip {
                    depth,
                    empty_traces: log.empty_count(),
                });
                let rest = self.run(&log.without_empty(), depth)?;
                return Ok(ProcessTree::binary(Operator::Xor, ProcessTree::Tau, rest));
            }
            Some(case) => {
                let tree = match case {
                    BaseCase::Leaf(a) => ProcessTree::leaf(log.label(a)),
                    BaseCase::SingleLoop(a) => ProcessTree::binary(
                        Operator::Loop,
                        ProcessTree::leaf(log.label(a)),
                        ProcessTree::Tau,
                    ),
                    _ => ProcessTree::Tau,
                };
                self.record(|| Step::BaseCase {
                    depth,
                    tree: tree.to_string(),
                });
                return Ok(tree);
            }
            None => {}
        }

        let graphs = FollowsGraphs::build(log).filter(self.opts.filter_percent)?;
        let alphabet = log.alphabet();
        let projected;
        let log = if graphs.nodes().len() < alphabet.len() {
            let (p, removed_events) = log.project(|a| graphs.contains(a));
            self.record(|| Step::Projection {
                depth,
                removed: alphabet
                    .iter()
                    .filter(|&&a| !graphs.contains(a))
                    .map(|&a| log.label(a).to_owned())
                    .collect(),
                filtered_events: removed_events,
            });
            if graphs.nodes().len() < 2 {
                return self.run(&p, depth);
            }
            projected = p;
            &projected
        } else {
            log
        };

        if depth >= self.max_depth {
            return Err(Error::DepthExceeded(self.max_depth));
        }
        let search = SearchOptions {
            exhaustive_limit: self.opts.exhaustive_limit,
        };
        let k = if self.steps.is_some() {
            self.opts.trace_top_k.max(1)
        } else {
            1
        };
        let mut ranked = rank_cuts(&graphs, LogShape::of(log), search, k)?;
        let cut = ranked.remove(0);
        let parts = split(log, &cut)?;
        self.record(|| Step::Cut {
            depth,
            cut: CutRecord::new(&cut, log),
            alternatives: ranked.iter().map(|c| CutRecord::new(c, log)).collect(),
            filtered_events: parts.filtered_events,
        });
        let left = self.run(&parts.left, depth + 1)?;
        let right = self.run(&parts.right, depth + 1)?;
        Ok(ProcessTree::binary(cut.operator, left, right))
    }
}

fn start(
    log: &EventLog,
    opts: &DiscoveryOptions,
    record: bool,
) -> Result<(ProcessTree, Vec<Step>)> {
    opts.validate()?;
    let bounded;
    let log = match opts.max_activities {
        Some(k) => {
            let keep = most_frequent(log, k);
            bounded = log.project(|a| keep.binary_search(&a).is_ok()).0;
            &bounded
        }
        None => log,
    };
    let mut rec = Recursion {
        opts,
        max_depth: opts.max_depth.unwrap_or(log.alphabet().len() + 2),
        steps: record.then(Vec::new),
    };
    let tree = rec.run(log, 0)?;
    Ok((tree, rec.steps.unwrap_or_default()))
}

/// Discovers a binary process tree from `log`.
pub fn discover(log: &EventLog, opts: &DiscoveryOptions) -> Result<ProcessTree> {
    Ok(start(log, opts, false)?.0)
}

/// As [`discover`], also returning the recursion steps in pre-order.
pub fn discover_with_trace(
    log: &EventLog,
    opts: &DiscoveryOptions,
) -> Result<(ProcessTree, Vec<Step>)> {
    start(log, opts, true)
}
