//! Directly-follows and strictly-indirectly-follows graphs.
//!
//! `|a→b|` counts occurrences of `b` immediately preceded by `a`. `|a⇒b|`
//! counts occurrences of `b` preceded by some `a` with at least one event in
//! between; each occurrence of `b` is counted once per source activity no
//! matter how many earlier `a`s there are. An occurrence can count in both
//! relations for the same pair (`⟨a,a,b⟩`). Self pairs are recorded too.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::log::{ActivityId, ActivityTable, EventLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Relation {
    Direct,
    Indirect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub relation: Relation,
    pub from: ActivityId,
    pub to: ActivityId,
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FollowsGraphs {
    table: Arc<ActivityTable>,
    n: usize,
    nodes: Vec<ActivityId>,
    dfg: Vec<u64>,
    ifg: Vec<u64>,
    unary: Vec<u64>,
    start: Vec<u64>,
    end: Vec<u64>,
}

impl FollowsGraphs {
    /// Counts all follows relations of `log`. Empty traces contribute nothing.
    pub fn build(log: &EventLog) -> Self {
        let table = Arc::clone(log.table());
        let n = table.len();
        let mut g = Self {
            table,
            n,
            nodes: log.alphabet(),
            dfg: vec![0; n * n],
            ifg: vec![0; n * n],
            unary: vec![0; n],
            start: vec![0; n],
            end: vec![0; n],
        };

        let mut seen = vec![false; n];
        let mut earlier: Vec<usize> = Vec::new();
        for (trace, count) in log.variants() {
            g.start[trace[0].index()] += count;
            g.end[trace[trace.len() - 1].index()] += count;
            for (i, &b) in trace.iter().enumerate() {
                let b = b.index();
                g.unary[b] += count;
                if i >= 1 {
                    g.dfg[trace[i - 1].index() * n + b] += count;
                }
                if i >= 2 {
                    let a = trace[i - 2].index();
                    if !seen[a] {
                        seen[a] = true;
                        earlier.push(a);
                    }
                    for &a in &earlier {
                        g.ifg[a * n + b] += count;
                    }
                }
            }
            for a in earlier.drain(..) {
                seen[a] = false;
            }
        }
        g
    }

    pub fn table(&self) -> &Arc<ActivityTable> {
        &self.table
    }

    pub fn label(&self, a: ActivityId) -> &str {
        self.table.label(a)
    }

    /// Node set (the alphabet after filtering), sorted by id.
    pub fn nodes(&self) -> &[ActivityId] {
        &self.nodes
    }

    pub fn contains(&self, a: ActivityId) -> bool {
        self.nodes.binary_search(&a).is_ok()
    }

    /// |a→b|.
    #[inline]
    pub fn df(&self, a: ActivityId, b: ActivityId) -> u64 {
        self.dfg[a.index() * self.n + b.index()]
    }

    /// |a⇒b|.
    #[inline]
    pub fn idf(&self, a: ActivityId, b: ActivityId) -> u64 {
        self.ifg[a.index() * self.n + b.index()]
    }

    pub fn frequency(&self, relation: Relation, a: ActivityId, b: ActivityId) -> u64 {
        match relation {
            Relation::Direct => self.df(a, b),
            Relation::Indirect => self.idf(a, b),
        }
    }

    /// |a|, taken from the log and untouched by filtering.
    #[inline]
    pub fn unary(&self, a: ActivityId) -> u64 {
        self.unary[a.index()]
    }

    pub fn start(&self, a: ActivityId) -> u64 {
        self.start[a.index()]
    }

    pub fn end(&self, a: ActivityId) -> u64 {
        self.end[a.index()]
    }

    pub fn start_activities(&self) -> Vec<ActivityId> {
        self.nodes
            .iter()
            .copied()
            .filter(|&a| self.start(a) > 0)
            .collect()
    }

    pub fn end_activities(&self) -> Vec<ActivityId> {
        self.nodes
            .iter()
            .copied()
            .filter(|&a| self.end(a) > 0)
            .collect()
    }

    fn edges_of(&self, relation: Relation) -> impl Iterator<Item = Edge> + '_ {
        let matrix = match relation {
            Relation::Direct => &self.dfg,
            Relation::Indirect => &self.ifg,
        };
        let n = self.n;
        matrix
            .iter()
            .enumerate()
            .filter(|(_, &f)| f > 0)
            .map(move |(i, &frequency)| Edge {
                relation,
                from: ActivityId((i / n) as u32),
                to: ActivityId((i % n) as u32),
                frequency,
            })
    }

    pub fn dfg_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges_of(Relation::Direct)
    }

    pub fn ifg_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges_of(Relation::Indirect)
    }

    /// All dfg edges followed by all ifg edges, each in (from, to) order.
    pub fn edges(&self) -> Vec<Edge> {
        self.dfg_edges().chain(self.ifg_edges()).collect()
    }

    /// Drops a single edge. Used to build hand-filtered graphs.
    pub fn remove_edge(&mut self, relation: Relation, a: ActivityId, b: ActivityId) {
        let i = a.index() * self.n + b.index();
        match relation {
            Relation::Direct => self.dfg[i] = 0,
            Relation::Indirect => self.ifg[i] = 0,
        }
    }

    /// Uniform percentile filtering over the combined dfg and ifg edge list.
    ///
    /// Edges are ranked by frequency; the top `⌈f/100 · E⌉` are kept together
    /// with every other edge of the same frequency as the last kept one, so an
    /// equal-frequency group is never split. Nodes left without any retained
    /// follows edge, start arc or end arc are dropped, unless that would drop
    /// the only activity. When no edge survives the node set is left as is.
    pub fn filter(&self, percent: f64) -> Result<Self> {
        if !(0.0..=100.0).contains(&percent) {
            return Err(Error::Parameter(format!(
                "filter percentage must be in [0, 100], got {percent}"
            )));
        }
        let mut freqs: Vec<u64> = self
            .dfg
            .iter()
            .chain(self.ifg.iter())
            .copied()
            .filter(|&f| f > 0)
            .collect();
        freqs.sort_unstable_by(|a, b| b.cmp(a));
        let total = freqs.len();
        let keep = ((percent / 100.0) * total as f64).ceil() as usize;
        let threshold = match keep.min(total) {
            0 => u64::MAX,
            k => freqs[k - 1],
        };

        let mut out = self.clone();
        for f in out.dfg.iter_mut().chain(out.ifg.iter_mut()) {
            if *f < threshold {
                *f = 0;
            }
        }

        if out.dfg.iter().chain(out.ifg.iter()).any(|&f| f > 0) && self.nodes.len() > 1 {
            let n = self.n;
            let connected = |a: ActivityId| {
                let i = a.index();
                out.start[i] > 0
                    || out.end[i] > 0
                    || (0..n).any(|j| {
                        out.dfg[i * n + j] > 0
                            || out.dfg[j * n + i] > 0
                            || out.ifg[i * n + j] > 0
                            || out.ifg[j * n + i] > 0
                    })
            };
            let nodes: Vec<ActivityId> = self
                .nodes
                .iter()
                .copied()
                .filter(|&a| connected(a))
                .collect();
            for &a in &self.nodes {
                if !nodes.contains(&a) {
                    out.start[a.index()] = 0;
                    out.end[a.index()] = 0;
                }
            }
            out.nodes = nodes;
        }
        Ok(out)
    }

    /// Graphviz rendering of the directly-follows graph. When `original` is
    /// given, edges present there but missing here are drawn red and dashed.
    pub fn to_dot(&self, original: Option<&FollowsGraphs>, include_ifg: bool) -> String {
        let base = original.unwrap_or(self);
        let mut out =
            String::from("digraph follows {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n");
        out.push_str("  \"__start\" [shape=circle, label=\"\", width=0.25, style=filled, fillcolor=green];\n");
        out.push_str("  \"__end\" [shape=doublecircle, label=\"\", width=0.25, style=filled, fillcolor=red];\n");
        for &a in base.nodes() {
            let style = if self.contains(a) {
                ""
            } else {
                ", color=red, style=\"rounded,dashed\""
            };
            let _ = writeln!(
                out,
                "  \"{}\" [label=\"{}\\n{}\"{}];",
                dot_escape(self.label(a)),
                dot_escape(self.label(a)),
                base.unary(a),
                style
            );
        }
        for &a in base.nodes() {
            if base.start(a) > 0 {
                let _ = writeln!(
                    out,
                    "  \"__start\" -> \"{}\" [label=\"{}\"];",
                    dot_escape(self.label(a)),
                    base.start(a)
                );
            }
            if base.end(a) > 0 {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"__end\" [label=\"{}\"];",
                    dot_escape(self.label(a)),
                    base.end(a)
                );
            }
        }
        let relations: &[Relation] = if include_ifg {
            &[Relation::Direct, Relation::Indirect]
        } else {
            &[Relation::Direct]
        };
        for &rel in relations {
            for e in base.edges_of(rel) {
                let kept = self.frequency(rel, e.from, e.to) > 0;
                let mut attrs = format!("label=\"{}\"", e.frequency);
                if rel == Relation::Indirect {
                    attrs.push_str(", style=dotted, color=gray40, constraint=false");
                }
                if !kept {
                    attrs = format!(
                        "label=\"{}\", style=dashed, color=red, fontcolor=red",
                        e.frequency
                    );
                }
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [{}];",
                    dot_escape(self.label(e.from)),
                    dot_escape(self.label(e.to)),
                    attrs
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n")
}
