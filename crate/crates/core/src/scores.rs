//! Pairwise activity relation scores.
//!
//! Each score estimates how likely two activities are related by one
//! operator, from how often they (in)directly follow each other. Scores lie in
//! `[0, 1]` but are not probabilities and do not sum to one.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::FollowsGraphs;
use crate::log::ActivityId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ScoreKind {
    Xor,
    Sequence,
    Parallel,
    /// `a` directly enters (or leaves) the redo part of a loop around `b`.
    LoopSingle,
    /// `a` and `b` are indirectly related through a loop.
    LoopIndirect,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 5] = [
        ScoreKind::Xor,
        ScoreKind::Sequence,
        ScoreKind::Parallel,
        ScoreKind::LoopSingle,
        ScoreKind::LoopIndirect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Xor => "xor",
            ScoreKind::Sequence => "seq",
            ScoreKind::Parallel => "par",
            ScoreKind::LoopSingle => "loop_single",
            ScoreKind::LoopIndirect => "loop_indirect",
        }
    }
}

/// The sequence quotient before truncation; antisymmetric in `(a, b)`.
pub fn raw_sequence(g: &FollowsGraphs, a: ActivityId, b: ActivityId) -> f64 {
    let forward = (g.df(a, b) + g.idf(a, b)) as f64;
    let backward = (g.df(b, a) + g.idf(b, a)) as f64;
    (forward - backward) / (forward + backward + 1.0)
}

fn balanced(x: u64, y: u64) -> f64 {
    let (x, y) = (x as f64, y as f64);
    (x / (y + 1.0)).min(y / (x + 1.0))
}

/// Evaluates one score without checking its arguments. `a == b` is
/// well-defined numerically and is needed for loop enter/exit sets.
pub(crate) fn score_unchecked(
    kind: ScoreKind,
    g: &FollowsGraphs,
    a: ActivityId,
    b: ActivityId,
) -> f64 {
    match kind {
        ScoreKind::Xor => {
            let together = (g.df(a, b) + g.df(b, a) + g.idf(a, b) + g.idf(b, a)) as f64;
            let (fa, fb) = (g.unary(a) as f64, g.unary(b) as f64);
            let s = ((fa - together) / fa) / 2.0 + ((fb - together) / fb) / 2.0;
            s.max(0.0)
        }
        ScoreKind::Sequence => raw_sequence(g, a, b).max(0.0),
        ScoreKind::Parallel => balanced(g.df(a, b), g.df(b, a)),
        ScoreKind::LoopSingle => {
            let (ab, ba) = (g.df(a, b) as f64, g.idf(b, a) as f64);
            (ab / (ba + 1.0)).min(ba / (ab + 1.0))
        }
        ScoreKind::LoopIndirect => balanced(g.idf(a, b), g.idf(b, a)),
    }
}

/// Score of `kind` between two distinct activities present in `g`.
pub fn score(kind: ScoreKind, a: ActivityId, b: ActivityId, g: &FollowsGraphs) -> Result<f64> {
    if a == b {
        return Err(Error::Domain(format!(
            "self-relation of `{}` is not scored",
            g.label(a)
        )));
    }
    for x in [a, b] {
        if x.index() >= g.table().len() {
            return Err(Error::UnknownActivity(x.to_string()));
        }
        if !g.contains(x) || g.unary(x) == 0 {
            return Err(Error::UnknownActivity(g.label(x).to_owned()));
        }
    }
    Ok(score_unchecked(kind, g, a, b))
}

/// All five scores for every ordered pair of graph nodes, indexed by node
/// position. Diagonal entries hold the unchecked self-pair values.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    nodes: Vec<ActivityId>,
    values: [Vec<f64>; 5],
}

impl ScoreTable {
    pub fn new(g: &FollowsGraphs) -> Self {
        let nodes = g.nodes().to_vec();
        let k = nodes.len();
        let values = ScoreKind::ALL.map(|kind| {
            let mut m = vec![0.0; k * k];
            for (i, &a) in nodes.iter().enumerate() {
                for (j, &b) in nodes.iter().enumerate() {
                    m[i * k + j] = score_unchecked(kind, g, a, b);
                }
            }
            m
        });
        Self { nodes, values }
    }

    pub fn nodes(&self) -> &[ActivityId] {
        &self.nodes
    }

    pub fn position(&self, a: ActivityId) -> Option<usize> {
        self.nodes.binary_search(&a).ok()
    }

    /// Score by node positions.
    #[inline]
    pub fn at(&self, kind: ScoreKind, i: usize, j: usize) -> f64 {
        self.values[kind as usize][i * self.nodes.len() + j]
    }

    pub fn get(&self, kind: ScoreKind, a: ActivityId, b: ActivityId) -> Option<f64> {
        Some(self.at(kind, self.position(a)?, self.position(b)?))
    }

    /// `from,to,xor,seq,par,loop_single,loop_indirect` rows for every ordered
    /// pair of distinct nodes.
    pub fn to_csv(&self, g: &FollowsGraphs) -> String {
        let mut out = String::from("from,to");
        for kind in ScoreKind::ALL {
            out.push(',');
            out.push_str(kind.name());
        }
        out.push('\n');
        for (i, &a) in self.nodes.iter().enumerate() {
            for (j, &b) in self.nodes.iter().enumerate() {
                if i == j {
                    continue;
                }
                let _ = write!(out, "{},{}", csv_field(g.label(a)), csv_field(g.label(b)));
                for kind in ScoreKind::ALL {
                    let _ = write!(out, ",{:.6}", self.at(kind, i, j));
                }
                out.push('\n');
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
