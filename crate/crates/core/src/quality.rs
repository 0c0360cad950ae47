//! Model quality against a log: alignment-style fitness, escaping-edges
//! precision, their F-score, and the size and control-flow complexity of the
//! block graph.
//!
//! Fitness and precision enumerate the model language with loops unrolled up
//! to a bound, so they are exact only for that bounded language.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::log::EventLog;
use crate::tree::language::{language_ids, Symbols};
use crate::tree::{BlockGraph, BlockNode, ProcessTree, DEFAULT_LANGUAGE_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QualityOptions {
    /// Redo iterations unrolled per loop.
    pub loop_bound: usize,
    /// Cap on the number of model traces.
    pub language_limit: usize,
}

impl Default for QualityOptions {
    fn default() -> Self {
        Self {
            loop_bound: 2,
            language_limit: DEFAULT_LANGUAGE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Simplicity {
    pub size: usize,
    pub cfc: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityReport {
    pub fitness: f64,
    pub precision: f64,
    pub f_score: f64,
    pub size: usize,
    pub cfc: usize,
}

impl QualityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }
}

/// Aligned two-column table.
impl fmt::Display for QualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>8.4}", "fitness", self.fitness)?;
        writeln!(f, "{:<10} {:>8.4}", "precision", self.precision)?;
        writeln!(f, "{:<10} {:>8.4}", "f-score", self.f_score)?;
        writeln!(f, "{:<10} {:>8}", "size", self.size)?;
        writeln!(f, "{:<10} {:>8}", "cfc", self.cfc)
    }
}

/// Prefix tree over symbol sequences.
#[derive(Debug, Default)]
struct Trie {
    children: Vec<BTreeMap<u32, usize>>,
    terminal: Vec<bool>,
    /// Weighted number of sequences passing through each node.
    visits: Vec<u64>,
}

impl Trie {
    fn new() -> Self {
        let mut t = Trie::default();
        t.push_node();
        t
    }

    fn push_node(&mut self) -> usize {
        self.children.push(BTreeMap::new());
        self.terminal.push(false);
        self.visits.push(0);
        self.children.len() - 1
    }

    fn insert(&mut self, seq: &[u32], weight: u64) {
        let mut node = 0;
        self.visits[0] += weight;
        for &s in seq {
            node = match self.children[node].get(&s) {
                Some(&n) => n,
                None => {
                    let n = self.push_node();
                    self.children[node].insert(s, n);
                    n
                }
            };
            self.visits[node] += weight;
        }
        self.terminal[node] = true;
    }
}

/// Model language and log variants over one symbol table.
struct Prepared {
    model: Trie,
    shortest: usize,
    log: Vec<(Vec<u32>, u64)>,
}

fn prepare(t: &ProcessTree, log: &EventLog, opts: QualityOptions) -> Result<Prepared> {
    let mut symbols = Symbols::default();
    let lang = language_ids(t, opts.loop_bound, opts.language_limit, &mut symbols)?;
    let mut model = Trie::new();
    for m in &lang {
        model.insert(m, 1);
    }
    let shortest = lang.iter().map(Vec::len).min().unwrap_or(0);
    let mut variants: Vec<(Vec<u32>, u64)> = log
        .variants()
        .map(|(trace, c)| (trace.iter().map(|&a| symbols.id(log.label(a))).collect(), c))
        .collect();
    if log.empty_count() > 0 {
        variants.push((Vec::new(), log.empty_count()));
    }
    Ok(Prepared {
        model,
        shortest,
        log: variants,
    })
}

/// Minimum number of insertions and deletions turning `trace` into some
/// model trace.
fn alignment_cost(model: &Trie, trace: &[u32]) -> usize {
    let n = trace.len();
    let root: Vec<usize> = (0..=n).collect();
    let mut best = usize::MAX;
    let mut stack = vec![(0usize, root)];
    while let Some((node, row)) = stack.pop() {
        if model.terminal[node] {
            best = best.min(row[n]);
        }
        // Row minima never decrease along a path.
        if row.iter().copied().min().unwrap_or(0) >= best {
            continue;
        }
        for (&sym, &child) in &model.children[node] {
            let mut next = vec![0usize; n + 1];
            next[0] = row[0] + 1;
            for j in 1..=n {
                let mut v = (row[j] + 1).min(next[j - 1] + 1);
                if trace[j - 1] == sym {
                    v = v.min(row[j - 1]);
                }
                next[j] = v;
            }
            stack.push((child, next));
        }
    }
    best
}

fn fitness_of(p: &Prepared) -> f64 {
    let (mut sum, mut weight) = (0.0, 0u64);
    for (trace, c) in &p.log {
        let denom = trace.len() + p.shortest;
        let f = if denom == 0 {
            1.0
        } else {
            1.0 - alignment_cost(&p.model, trace) as f64 / denom as f64
        };
        sum += f * *c as f64;
        weight += c;
    }
    if weight == 0 {
        1.0
    } else {
        sum / weight as f64
    }
}

fn precision_of(p: &Prepared) -> f64 {
    let mut observed = Trie::new();
    for (trace, c) in &p.log {
        observed.insert(trace, *c);
    }
    let (mut escaping, mut enabled) = (0u64, 0u64);
    let mut stack = vec![(0usize, 0usize)];
    while let Some((lnode, mnode)) = stack.pop() {
        let visits = observed.visits[lnode];
        for (sym, &mchild) in &p.model.children[mnode] {
            enabled += visits;
            match observed.children[lnode].get(sym) {
                Some(&lchild) => stack.push((lchild, mchild)),
                None => escaping += visits,
            }
        }
    }
    if enabled == 0 {
        1.0
    } else {
        1.0 - escaping as f64 / enabled as f64
    }
}

/// Count-weighted mean trace fitness.
pub fn fitness(t: &ProcessTree, log: &EventLog, opts: QualityOptions) -> Result<f64> {
    Ok(fitness_of(&prepare(t, log, opts)?))
}

/// One minus the share of enabled model continuations never taken by the
/// log, over all log prefixes the model can replay.
pub fn precision(t: &ProcessTree, log: &EventLog, opts: QualityOptions) -> Result<f64> {
    Ok(precision_of(&prepare(t, log, opts)?))
}

pub fn f_score(fitness: f64, precision: f64) -> f64 {
    if fitness + precision == 0.0 {
        0.0
    } else {
        2.0 * fitness * precision / (fitness + precision)
    }
}

/// Node count, and control-flow complexity: each XOR split adds its fan-out,
/// each AND split adds one.
pub fn simplicity(g: &BlockGraph) -> Simplicity {
    let cfc = g
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| match n {
            BlockNode::XorSplit => g.out_degree(i),
            BlockNode::AndSplit => 1,
            _ => 0,
        })
        .sum();
    Simplicity {
        size: g.nodes.len(),
        cfc,
    }
}

pub fn evaluate(t: &ProcessTree, log: &EventLog, opts: QualityOptions) -> Result<QualityReport> {
    let p = prepare(t, log, opts)?;
    let fitness = fitness_of(&p);
    let precision = precision_of(&p);
    let s = simplicity(&BlockGraph::from_tree(t));
    Ok(QualityReport {
        fitness,
        precision,
        f_score: f_score(fitness, precision),
        size: s.size,
        cfc: s.cfc,
    })
}
