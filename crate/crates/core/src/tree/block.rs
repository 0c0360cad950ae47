//! Translation of a process tree into a block-structured graph with XOR and
//! AND gateways only.

use std::fmt::Write as _;

use serde::Serialize;

use super::{Operator, ProcessTree};
use crate::error::{Error, Result};
use crate::graphs::dot_escape;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "label", rename_all = "snake_case")]
pub enum BlockNode {
    Start,
    End,
    Task(String),
    XorSplit,
    XorJoin,
    AndSplit,
    AndJoin,
}

impl BlockNode {
    pub fn is_gateway(&self) -> bool {
        !matches!(self, BlockNode::Start | BlockNode::End | BlockNode::Task(_))
    }
}

/// A matched gateway pair. For loops the join comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GatewayPair {
    pub open: usize,
    pub close: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockGraph {
    pub nodes: Vec<BlockNode>,
    pub edges: Vec<(usize, usize)>,
    pub pairs: Vec<GatewayPair>,
}

impl BlockGraph {
    pub fn from_tree(t: &ProcessTree) -> Self {
        let mut g = BlockGraph {
            nodes: vec![BlockNode::Start, BlockNode::End],
            edges: Vec::new(),
            pairs: Vec::new(),
        };
        match g.fragment(t) {
            Some((entry, exit)) => {
                g.edges.push((0, entry));
                g.edges.push((exit, 1));
            }
            None => g.edges.push((0, 1)),
        }
        g
    }

    fn add(&mut self, node: BlockNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Entry and exit node of the fragment for `t`; `None` for τ.
    fn fragment(&mut self, t: &ProcessTree) -> Option<(usize, usize)> {
        match t {
            ProcessTree::Tau => None,
            ProcessTree::Leaf(l) => {
                let n = self.add(BlockNode::Task(l.clone()));
                Some((n, n))
            }
            ProcessTree::Node(Operator::Sequence, cs) => {
                let mut span: Option<(usize, usize)> = None;
                for c in cs {
                    if let Some((entry, exit)) = self.fragment(c) {
                        span = Some(match span {
                            None => (entry, exit),
                            Some((first, last)) => {
                                self.edges.push((last, entry));
                                (first, exit)
                            }
                        });
                    }
                }
                span
            }
            ProcessTree::Node(op @ (Operator::Xor | Operator::Parallel), cs) => {
                let (split, join) = if *op == Operator::Xor {
                    (BlockNode::XorSplit, BlockNode::XorJoin)
                } else {
                    (BlockNode::AndSplit, BlockNode::AndJoin)
                };
                let s = self.add(split);
                let j = self.add(join);
                self.pairs.push(GatewayPair { open: s, close: j });
                for c in cs {
                    match self.fragment(c) {
                        Some((entry, exit)) => {
                            self.edges.push((s, entry));
                            self.edges.push((exit, j));
                        }
                        None => self.edges.push((s, j)),
                    }
                }
                Some((s, j))
            }
            ProcessTree::Node(Operator::Loop, cs) => {
                let j = self.add(BlockNode::XorJoin);
                let s = self.add(BlockNode::XorSplit);
                self.pairs.push(GatewayPair { open: j, close: s });
                match self.fragment(&cs[0]) {
                    Some((entry, exit)) => {
                        self.edges.push((j, entry));
                        self.edges.push((exit, s));
                    }
                    None => self.edges.push((j, s)),
                }
                for redo in &cs[1..] {
                    match self.fragment(redo) {
                        Some((entry, exit)) => {
                            self.edges.push((s, entry));
                            self.edges.push((exit, j));
                        }
                        None => self.edges.push((s, j)),
                    }
                }
                Some((j, s))
            }
        }
    }

    pub fn out_degree(&self, n: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == n).count()
    }

    pub fn in_degree(&self, n: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == n).count()
    }

    pub fn task_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, BlockNode::Task(_)))
            .count()
    }

    pub fn gateway_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_gateway()).count()
    }

    fn reachable(&self, from: usize, forward: bool, blocked: Option<usize>) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            if Some(v) == blocked && v != from {
                continue;
            }
            for &(a, b) in &self.edges {
                let (src, dst) = if forward { (a, b) } else { (b, a) };
                if src == v && !seen[dst] {
                    seen[dst] = true;
                    stack.push(dst);
                }
            }
        }
        seen
    }

    /// Structural soundness: one start and one end, every gateway in exactly
    /// one matched pair of the same type, every pair enclosing a single-entry
    /// single-exit region, and every node on a path from start to end.
    pub fn check_sound(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Contract(m));
        let count = |k: &BlockNode| self.nodes.iter().filter(|n| *n == k).count();
        if count(&BlockNode::Start) != 1 || count(&BlockNode::End) != 1 {
            return fail("expected exactly one start and one end".into());
        }
        let start = self
            .nodes
            .iter()
            .position(|n| *n == BlockNode::Start)
            .expect("start");
        let end = self
            .nodes
            .iter()
            .position(|n| *n == BlockNode::End)
            .expect("end");
        if self.in_degree(start) != 0 || self.out_degree(end) != 0 {
            return fail("start has incoming or end has outgoing edges".into());
        }
        let mut paired = vec![0usize; self.nodes.len()];
        for p in &self.pairs {
            paired[p.open] += 1;
            paired[p.close] += 1;
            let kinds = (&self.nodes[p.open], &self.nodes[p.close]);
            let ok = matches!(
                kinds,
                (BlockNode::XorSplit, BlockNode::XorJoin)
                    | (BlockNode::AndSplit, BlockNode::AndJoin)
                    | (BlockNode::XorJoin, BlockNode::XorSplit)
            );
            if !ok {
                return fail(format!(
                    "gateways {} and {} are not a matching pair",
                    p.open, p.close
                ));
            }
            // Leaving the block without passing its closing gateway must be
            // impossible.
            if self.reachable(p.open, true, Some(p.close))[end] {
                return fail(format!(
                    "block {}..{} can be left without its closing gateway",
                    p.open, p.close
                ));
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.is_gateway() && paired[i] != 1 {
                return fail(format!("gateway {i} is not matched exactly once"));
            }
            if matches!(n, BlockNode::Task(_))
                && (self.in_degree(i) != 1 || self.out_degree(i) != 1)
            {
                return fail(format!(
                    "task {i} must have one incoming and one outgoing edge"
                ));
            }
        }
        let fwd = self.reachable(start, true, None);
        let bwd = self.reachable(end, false, None);
        if let Some(i) = (0..self.nodes.len()).find(|&i| !(fwd[i] && bwd[i])) {
            return fail(format!("node {i} is not on a path from start to end"));
        }
        Ok(())
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph bpmn {\n  rankdir=LR;\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let attrs = match n {
                BlockNode::Start => "label=\"\", shape=circle".to_owned(),
                BlockNode::End => "label=\"\", shape=doublecircle".to_owned(),
                BlockNode::Task(l) => {
                    format!("label=\"{}\", shape=box, style=rounded", dot_escape(l))
                }
                BlockNode::XorSplit | BlockNode::XorJoin => "label=\"×\", shape=diamond".to_owned(),
                BlockNode::AndSplit | BlockNode::AndJoin => "label=\"+\", shape=diamond".to_owned(),
            };
            let _ = writeln!(out, "  n{i} [{attrs}];");
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }
}
