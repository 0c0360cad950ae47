//! Aggregated cut scores and the search for the most likely binary cut.
//!
//! A cut `(⊕, Σ1, Σ2)` is scored by aggregating the pairwise relation scores
//! over `Σ1 × Σ2`:
//!
//! * `×`, `→`: mean minus population standard deviation, so a few strongly
//!   contradicting pairs pull the score down;
//! * `∧`: mean times `min(r, 1)`, damped when the log repeats activities;
//! * `↺`: mean over enter/exit pairs (scored as direct loop relations) and
//!   the remaining pairs (indirect loop relations), boosted by
//!   `1 − min(r, 1)`.
//!
//! `r = |L| / (||L|| / |Σ|)` is the repetition factor of the log.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::FollowsGraphs;
use crate::log::{ActivityId, EventLog};
use crate::scores::{ScoreKind, ScoreTable};

/// Process-tree operators. The declaration order is the tie-break preference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Operator {
    Xor,
    Sequence,
    Parallel,
    Loop,
}

impl Operator {
    pub const ALL: [Operator; 4] = [
        Operator::Xor,
        Operator::Sequence,
        Operator::Parallel,
        Operator::Loop,
    ];

    pub fn glyph(self) -> &'static str {
        match self {
            Operator::Xor => "×",
            Operator::Sequence => "→",
            Operator::Parallel => "∧",
            Operator::Loop => "↺",
        }
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Operator::Xor => "x",
            Operator::Sequence => "->",
            Operator::Parallel => "/\\",
            Operator::Loop => "loop",
        }
    }

    /// Whether swapping the two sides yields the same cut.
    pub fn is_symmetric(self) -> bool {
        matches!(self, Operator::Xor | Operator::Parallel)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.glyph())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cut {
    pub operator: Operator,
    pub sigma1: Vec<ActivityId>,
    pub sigma2: Vec<ActivityId>,
    /// Loop only: redo activities entered from the body.
    pub redo_starts: Vec<ActivityId>,
    /// Loop only: redo activities that return to the body.
    pub redo_ends: Vec<ActivityId>,
    pub score: f64,
}

impl Cut {
    /// `→({a}, {b,c}) 0.772`-style rendering with labels.
    pub fn describe(&self, g: &FollowsGraphs) -> String {
        let set = |xs: &[ActivityId]| {
            let labels: Vec<&str> = xs.iter().map(|&a| g.label(a)).collect();
            format!("{{{}}}", labels.join(","))
        };
        format!(
            "{}({}, {}) {:.4}",
            self.operator,
            set(&self.sigma1),
            set(&self.sigma2),
            self.score
        )
    }
}

/// Size figures of the log a cut is sought for. Empty traces are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LogShape {
    pub trace_count: u64,
    pub event_count: u64,
    pub alphabet_size: usize,
}

impl LogShape {
    pub fn of(log: &EventLog) -> Self {
        Self {
            trace_count: log.non_empty_trace_count(),
            event_count: log.event_count(),
            alphabet_size: log.alphabet().len(),
        }
    }
}

/// `r(L) = |L| / (||L|| / |Σ|)`; below one when activities repeat.
pub fn repetition_factor(shape: LogShape) -> Result<f64> {
    if shape.event_count == 0 {
        return Err(Error::Domain(
            "repetition factor of a log without events".into(),
        ));
    }
    Ok(shape.trace_count as f64 * shape.alphabet_size as f64 / shape.event_count as f64)
}

fn mean_and_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (n, sum) = values
        .clone()
        .fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = sum / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

fn positions(table: &ScoreTable, xs: &[ActivityId], what: &str) -> Result<Vec<usize>> {
    if xs.is_empty() {
        return Err(Error::Domain(format!("{what} must not be empty")));
    }
    xs.iter()
        .map(|&a| {
            table
                .position(a)
                .ok_or_else(|| Error::UnknownActivity(a.to_string()))
        })
        .collect()
}

/// Mean minus population standard deviation of the pair scores of a `×` or
/// `→` cut.
pub fn aggregate_xor_seq(
    op: Operator,
    sigma1: &[ActivityId],
    sigma2: &[ActivityId],
    table: &ScoreTable,
) -> Result<f64> {
    let kind = match op {
        Operator::Xor => ScoreKind::Xor,
        Operator::Sequence => ScoreKind::Sequence,
        other => {
            return Err(Error::Domain(format!(
                "{other} is not scored by mean minus deviation"
            )))
        }
    };
    let p1 = positions(table, sigma1, "sigma1")?;
    let p2 = positions(table, sigma2, "sigma2")?;
    let (mean, sd) = mean_and_sd(
        p1.iter()
            .flat_map(|&i| p2.iter().map(move |&j| table.at(kind, i, j))),
    );
    Ok(mean - sd)
}

/// Mean parallel score damped by `min(r, 1)`.
pub fn aggregate_para(
    sigma1: &[ActivityId],
    sigma2: &[ActivityId],
    table: &ScoreTable,
    shape: LogShape,
) -> Result<f64> {
    let p1 = positions(table, sigma1, "sigma1")?;
    let p2 = positions(table, sigma2, "sigma2")?;
    let r = repetition_factor(shape)?;
    let (mean, _) = mean_and_sd(
        p1.iter()
            .flat_map(|&i| p2.iter().map(move |&j| table.at(ScoreKind::Parallel, i, j))),
    );
    Ok(mean * r.min(1.0))
}

/// Loop score for body `sigma1`, redo `sigma2` with redo entry points
/// `redo_starts` and exit points `redo_ends`.
///
/// `enter = End(L) × S2` and `exit = E2 × Start(L)` are scored with the
/// direct loop relation; the pairs of `Σ1 × Σ2` outside both sets with the
/// indirect one. The mean is boosted by `1 − min(r, 1)`.
pub fn aggregate_loop(
    sigma1: &[ActivityId],
    sigma2: &[ActivityId],
    redo_starts: &[ActivityId],
    redo_ends: &[ActivityId],
    table: &ScoreTable,
    graphs: &FollowsGraphs,
    shape: LogShape,
) -> Result<f64> {
    let p1 = positions(table, sigma1, "sigma1")?;
    let p2 = positions(table, sigma2, "sigma2")?;
    let s2 = positions(table, redo_starts, "redo starts")?;
    let e2 = positions(table, redo_ends, "redo ends")?;
    if !redo_starts
        .iter()
        .chain(redo_ends)
        .all(|a| sigma2.contains(a))
    {
        return Err(Error::Domain(
            "redo entry and exit points must lie in sigma2".into(),
        ));
    }
    let r = repetition_factor(shape)?;
    let k = table.nodes().len();
    let mut side2 = vec![false; k];
    p2.iter().for_each(|&j| side2[j] = true);
    let mut starts2 = vec![false; k];
    s2.iter().for_each(|&j| starts2[j] = true);
    let mut ends2 = vec![false; k];
    e2.iter().for_each(|&j| ends2[j] = true);
    let (start, end) = start_end_flags(table, graphs);
    let mean = loop_mean(table, &p1, &p2, &starts2, &ends2, &start, &end);
    Ok(mean + mean * (1.0 - r.min(1.0)))
}

fn start_end_flags(table: &ScoreTable, graphs: &FollowsGraphs) -> (Vec<bool>, Vec<bool>) {
    let start = table.nodes().iter().map(|&a| graphs.start(a) > 0).collect();
    let end = table.nodes().iter().map(|&a| graphs.end(a) > 0).collect();
    (start, end)
}

fn loop_mean(
    table: &ScoreTable,
    side1: &[usize],
    side2: &[usize],
    starts2: &[bool],
    ends2: &[bool],
    start: &[bool],
    end: &[bool],
) -> f64 {
    let k = table.nodes().len();
    let mut sum = 0.0;
    let mut n = 0usize;
    let entering = |x: usize, y: usize| end[x] && starts2[y];
    for x in (0..k).filter(|&x| end[x]) {
        for y in (0..k).filter(|&y| starts2[y]) {
            sum += table.at(ScoreKind::LoopSingle, x, y);
            n += 1;
        }
    }
    for x in (0..k).filter(|&x| ends2[x]) {
        for y in (0..k).filter(|&y| start[y]) {
            if !entering(x, y) {
                sum += table.at(ScoreKind::LoopSingle, x, y);
                n += 1;
            }
        }
    }
    for &a in side1 {
        for &b in side2 {
            if !entering(a, b) {
                sum += table.at(ScoreKind::LoopIndirect, a, b);
                n += 1;
            }
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Alphabets up to this size are searched exhaustively.
    pub exhaustive_limit: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            exhaustive_limit: 12,
        }
    }
}

const TIE_EPS: f64 = 1e-9;

/// Everything needed to score a cut given by side membership over node
/// positions.
struct Evaluator<'a> {
    table: &'a ScoreTable,
    k: usize,
    r: f64,
    start: Vec<bool>,
    end: Vec<bool>,
    /// Filtered dfg adjacency by position.
    dfg: Vec<bool>,
}

impl<'a> Evaluator<'a> {
    fn new(table: &'a ScoreTable, graphs: &FollowsGraphs, shape: LogShape) -> Result<Self> {
        let nodes = table.nodes();
        let k = nodes.len();
        let (start, end) = start_end_flags(table, graphs);
        let mut dfg = vec![false; k * k];
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate() {
                dfg[i * k + j] = graphs.df(a, b) > 0;
            }
        }
        Ok(Self {
            table,
            k,
            r: repetition_factor(shape)?,
            start,
            end,
            dfg,
        })
    }

    /// Redo entry/exit points: Σ2 activities with a dfg edge from/to Σ1,
    /// falling back to all of Σ2.
    fn loop_points(&self, in1: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let k = self.k;
        let mut starts = vec![false; k];
        let mut ends = vec![false; k];
        for b in (0..k).filter(|&b| !in1[b]) {
            starts[b] = (0..k).any(|a| in1[a] && self.dfg[a * k + b]);
            ends[b] = (0..k).any(|a| in1[a] && self.dfg[b * k + a]);
        }
        for flags in [&mut starts, &mut ends] {
            if !flags.iter().any(|&f| f) {
                for b in 0..k {
                    flags[b] = !in1[b];
                }
            }
        }
        (starts, ends)
    }

    fn score(&self, op: Operator, in1: &[bool]) -> f64 {
        let k = self.k;
        let side1: Vec<usize> = (0..k).filter(|&i| in1[i]).collect();
        let side2: Vec<usize> = (0..k).filter(|&i| !in1[i]).collect();
        let pairs = |kind| {
            let t = self.table;
            let s2 = &side2;
            side1
                .iter()
                .flat_map(move |&i| s2.iter().map(move |&j| t.at(kind, i, j)))
        };
        match op {
            Operator::Xor | Operator::Sequence => {
                let kind = if op == Operator::Xor {
                    ScoreKind::Xor
                } else {
                    ScoreKind::Sequence
                };
                let (mean, sd) = mean_and_sd(pairs(kind));
                mean - sd
            }
            Operator::Parallel => mean_and_sd(pairs(ScoreKind::Parallel)).0 * self.r.min(1.0),
            Operator::Loop => {
                let (starts, ends) = self.loop_points(in1);
                let mean = loop_mean(
                    self.table,
                    &side1,
                    &side2,
                    &starts,
                    &ends,
                    &self.start,
                    &self.end,
                );
                mean + mean * (1.0 - self.r.min(1.0))
            }
        }
    }

    fn make_cut(&self, op: Operator, in1: &[bool], score: f64) -> Cut {
        let nodes = self.table.nodes();
        let pick = |flags: &[bool], want: bool| -> Vec<ActivityId> {
            (0..self.k)
                .filter(|&i| flags[i] == want)
                .map(|i| nodes[i])
                .collect()
        };
        let (redo_starts, redo_ends) = if op == Operator::Loop {
            let (s, e) = self.loop_points(in1);
            (pick(&s, true), pick(&e, true))
        } else {
            (Vec::new(), Vec::new())
        };
        Cut {
            operator: op,
            sigma1: pick(in1, true),
            sigma2: pick(in1, false),
            redo_starts,
            redo_ends,
            score,
        }
    }
}

/// Candidate under evaluation: operator, side-1 membership, score.
#[derive(Clone)]
struct Candidate {
    op: Operator,
    in1: Vec<bool>,
    score: f64,
}

/// Total preference order: higher score, then operator precedence, then the
/// lexicographically smallest Σ1.
fn compare(a: &Candidate, b: &Candidate) -> Ordering {
    if a.score > b.score + TIE_EPS {
        return Ordering::Less;
    }
    if b.score > a.score + TIE_EPS {
        return Ordering::Greater;
    }
    a.op.cmp(&b.op).then_with(|| lex_sides(&a.in1, &b.in1))
}

/// Lexicographic order of the sorted position lists of two side-1 sets.
fn lex_sides(a: &[bool], b: &[bool]) -> Ordering {
    let mut xa = a.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i);
    let mut xb = b.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i);
    loop {
        match (xa.next(), xb.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(i), Some(j)) if i != j => return i.cmp(&j),
            _ => {}
        }
    }
}

/// Symmetric operators are stored with the side that holds position 0 first.
fn canonical(op: Operator, mut in1: Vec<bool>) -> Vec<bool> {
    if op.is_symmetric() && !in1[0] {
        in1.iter_mut().for_each(|f| *f = !*f);
    }
    in1
}

/// Returns the maximum-score cut. Alphabets up to
/// [`SearchOptions::exhaustive_limit`] are searched over all bipartitions
/// and operators; larger ones by seeded hill climbing.
pub fn find_cut(graphs: &FollowsGraphs, shape: LogShape, opts: SearchOptions) -> Result<Cut> {
    Ok(rank_cuts(graphs, shape, opts, 1)?.remove(0))
}

/// The `k` best cuts found, best first.
pub fn rank_cuts(
    graphs: &FollowsGraphs,
    shape: LogShape,
    opts: SearchOptions,
    k: usize,
) -> Result<Vec<Cut>> {
    if graphs.nodes().len() < 2 {
        return Err(Error::Contract(format!(
            "a cut needs at least two activities, got {}",
            graphs.nodes().len()
        )));
    }
    let table = ScoreTable::new(graphs);
    let eval = Evaluator::new(&table, graphs, shape)?;
    let mut top = TopK::new(k.max(1));
    if eval.k <= opts.exhaustive_limit.min(24) {
        exhaustive(&eval, &mut top);
    } else {
        heuristic(&eval, &mut top);
    }
    Ok(top
        .items
        .into_iter()
        .map(|c| eval.make_cut(c.op, &c.in1, c.score))
        .collect())
}

struct TopK {
    k: usize,
    items: Vec<Candidate>,
}

impl TopK {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    fn offer(&mut self, c: Candidate) {
        if self.items.len() == self.k
            && compare(&c, self.items.last().expect("non-empty")) != Ordering::Less
        {
            return;
        }
        if self.items.iter().any(|x| x.op == c.op && x.in1 == c.in1) {
            return;
        }
        let at = self
            .items
            .partition_point(|x| compare(x, &c) == Ordering::Less);
        self.items.insert(at, c);
        self.items.truncate(self.k);
    }
}

fn exhaustive(eval: &Evaluator<'_>, top: &mut TopK) {
    let k = eval.k;
    let full = (1u64 << k) - 1;
    let mut in1 = vec![false; k];
    for mask in 1..full {
        for (i, f) in in1.iter_mut().enumerate() {
            *f = mask >> i & 1 == 1;
        }
        for op in Operator::ALL {
            if op.is_symmetric() && mask & 1 == 0 {
                continue;
            }
            let score = eval.score(op, &in1);
            top.offer(Candidate {
                op,
                in1: in1.clone(),
                score,
            });
        }
    }
}

#[allow(clippy::needless_range_loop)]
fn weak_components(eval: &Evaluator<'_>) -> Vec<Vec<usize>> {
    let k = eval.k;
    let mut comp = vec![usize::MAX; k];
    let mut out = Vec::new();
    for s in 0..k {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![s];
        let mut members = Vec::new();
        comp[s] = id;
        while let Some(v) = stack.pop() {
            members.push(v);
            for w in 0..k {
                if comp[w] == usize::MAX && (eval.dfg[v * k + w] || eval.dfg[w * k + v]) {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Strongly connected components of the dfg in a topological order of the
/// condensation (ties by smallest member).
fn ordered_sccs(eval: &Evaluator<'_>) -> Vec<Vec<usize>> {
    let k = eval.k;
    let reach = {
        // Transitive closure; alphabets here are small enough for k³.
        let mut r = eval.dfg.clone();
        for i in 0..k {
            r[i * k + i] = true;
        }
        for m in 0..k {
            for i in 0..k {
                if r[i * k + m] {
                    for j in 0..k {
                        if r[m * k + j] {
                            r[i * k + j] = true;
                        }
                    }
                }
            }
        }
        r
    };
    let mut assigned = vec![false; k];
    let mut sccs: Vec<Vec<usize>> = Vec::new();
    for i in 0..k {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (0..k)
            .filter(|&j| reach[i * k + j] && reach[j * k + i])
            .collect();
        members.iter().for_each(|&j| assigned[j] = true);
        sccs.push(members);
    }
    // Kahn's algorithm over the condensation.
    let m = sccs.len();
    let edge = |a: usize, b: usize| {
        a != b
            && sccs[a]
                .iter()
                .any(|&x| sccs[b].iter().any(|&y| eval.dfg[x * k + y]))
    };
    let mut indeg: Vec<usize> = (0..m)
        .map(|b| (0..m).filter(|&a| edge(a, b)).count())
        .collect();
    let mut done = vec![false; m];
    let mut order = Vec::with_capacity(m);
    for _ in 0..m {
        let next = (0..m)
            .filter(|&c| !done[c] && indeg[c] == 0)
            .min_by_key(|&c| sccs[c][0])
            .unwrap_or_else(|| (0..m).find(|&c| !done[c]).expect("remaining component"));
        done[next] = true;
        for b in 0..m {
            if !done[b] && edge(next, b) {
                indeg[b] = indeg[b].saturating_sub(1);
            }
        }
        order.push(sccs[next].clone());
    }
    order
}

fn heuristic(eval: &Evaluator<'_>, top: &mut TopK) {
    let k = eval.k;
    let side = |members: &[usize]| {
        let mut in1 = vec![false; k];
        members.iter().for_each(|&i| in1[i] = true);
        in1
    };

    let mut seeds: Vec<Vec<bool>> = Vec::new();
    let comps = weak_components(eval);
    if comps.len() > 1 {
        seeds.extend(comps.iter().map(|c| side(c)));
    }
    let sccs = ordered_sccs(eval);
    let mut prefix = Vec::new();
    for scc in sccs.iter().take(sccs.len().saturating_sub(1)) {
        prefix.extend_from_slice(scc);
        seeds.push(side(&prefix));
    }
    let degree = |i: usize| {
        (0..k)
            .filter(|&j| j != i && (eval.dfg[i * k + j] || eval.dfg[j * k + i]))
            .count()
    };
    let mut by_degree: Vec<usize> = (0..k).collect();
    by_degree.sort_by_key(|&i| (degree(i), i));
    const PEEL: usize = 4;
    let peel: Vec<usize> = by_degree
        .iter()
        .take(PEEL)
        .chain(by_degree.iter().rev().take(PEEL))
        .copied()
        .collect();
    for i in peel {
        seeds.push(side(&[i]));
    }

    let mut starts = TopK::new(8);
    let offer = |op: Operator, in1: Vec<bool>, pool: &mut TopK, top: &mut TopK| {
        if in1.iter().all(|&f| f) || in1.iter().all(|&f| !f) {
            return;
        }
        let in1 = canonical(op, in1);
        let score = eval.score(op, &in1);
        let c = Candidate { op, in1, score };
        top.offer(c.clone());
        pool.offer(c);
    };
    for seed in &seeds {
        let flipped: Vec<bool> = seed.iter().map(|f| !f).collect();
        for op in Operator::ALL {
            offer(op, seed.clone(), &mut starts, top);
            if !op.is_symmetric() {
                offer(op, flipped.clone(), &mut starts, top);
            }
        }
    }

    for start in starts.items {
        let mut cur = start;
        for _ in 0..2 * k {
            let mut best: Option<Candidate> = None;
            for p in 0..k {
                let mut in1 = cur.in1.clone();
                in1[p] = !in1[p];
                if in1.iter().all(|&f| f) || in1.iter().all(|&f| !f) {
                    continue;
                }
                let in1 = canonical(cur.op, in1);
                let score = eval.score(cur.op, &in1);
                let c = Candidate {
                    op: cur.op,
                    in1,
                    score,
                };
                top.offer(c.clone());
                if c.score > cur.score + TIE_EPS
                    && best
                        .as_ref()
                        .is_none_or(|b| compare(&c, b) == Ordering::Less)
                {
                    best = Some(c);
                }
            }
            match best {
                Some(b) => cur = b,
                None => break,
            }
        }
    }
}
