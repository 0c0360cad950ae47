//! Process trees: representation, normalization, JSON and DOT output.

mod block;
pub(crate) mod language;
mod text;

use std::fmt;
use std::fmt::Write as _;

use serde_json::{json, Value};

pub use crate::cut::Operator;
use crate::error::{Error, Result};

pub use block::{BlockGraph, BlockNode};
pub use language::{language, language_with_limit, DEFAULT_LANGUAGE_LIMIT};
pub use text::parse_text;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcessTree {
    Tau,
    Leaf(String),
    /// Operator node. For loops the first child is the body, the rest are
    /// redo alternatives.
    Node(Operator, Vec<ProcessTree>),
}

impl ProcessTree {
    pub fn leaf(label: impl Into<String>) -> Self {
        ProcessTree::Leaf(label.into())
    }

    /// Operator node with at least two children.
    pub fn node(op: Operator, children: Vec<ProcessTree>) -> Result<Self> {
        if children.len() < 2 {
            return Err(Error::Contract(format!(
                "{} needs at least two children, got {}",
                op.ascii(),
                children.len()
            )));
        }
        Ok(ProcessTree::Node(op, children))
    }

    pub(crate) fn binary(op: Operator, left: ProcessTree, right: ProcessTree) -> Self {
        ProcessTree::Node(op, vec![left, right])
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, ProcessTree::Tau)
    }

    /// Leaf labels in left-to-right order, with repetitions.
    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let ProcessTree::Leaf(l) = t {
                out.push(l.as_str());
            }
        });
        out
    }

    /// Number of tree nodes, leaves and τ included.
    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn depth(&self) -> usize {
        match self {
            ProcessTree::Node(_, cs) => 1 + cs.iter().map(ProcessTree::depth).max().unwrap_or(0),
            _ => 1,
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a ProcessTree)) {
        f(self);
        if let ProcessTree::Node(_, cs) = self {
            for c in cs {
                c.visit(f);
            }
        }
    }

    /// Flattens nested `×`, `→` and `∧` nodes into their same-operator
    /// parent. Loops keep their shape.
    pub fn normalize(&self) -> ProcessTree {
        match self {
            ProcessTree::Node(op, cs) => {
                let cs: Vec<ProcessTree> = cs.iter().map(ProcessTree::normalize).collect();
                if *op == Operator::Loop {
                    return ProcessTree::Node(*op, cs);
                }
                let mut flat = Vec::with_capacity(cs.len());
                for c in cs {
                    match c {
                        ProcessTree::Node(inner, grand) if inner == *op => flat.extend(grand),
                        other => flat.push(other),
                    }
                }
                ProcessTree::Node(*op, flat)
            }
            leaf => leaf.clone(),
        }
    }

    /// Normalized tree with the children of `×` and `∧` sorted, so trees
    /// that differ only in the order of commutative children compare equal.
    pub fn canonical(&self) -> ProcessTree {
        fn sort(t: ProcessTree) -> ProcessTree {
            match t {
                ProcessTree::Node(op, cs) => {
                    let mut cs: Vec<ProcessTree> = cs.into_iter().map(sort).collect();
                    if op.is_symmetric() {
                        cs.sort_by_cached_key(|c| c.to_string());
                    }
                    ProcessTree::Node(op, cs)
                }
                leaf => leaf,
            }
        }
        sort(self.normalize())
    }

    /// Nested objects with `op` and `label` keys.
    pub fn to_json(&self) -> Value {
        match self {
            ProcessTree::Tau => json!({ "op": "tau" }),
            ProcessTree::Leaf(l) => json!({ "label": l }),
            ProcessTree::Node(op, cs) => json!({
                "op": json_op(*op),
                "children": cs.iter().map(ProcessTree::to_json).collect::<Vec<_>>(),
            }),
        }
    }

    /// The tree with operator glyphs, e.g. `→(a, ×(g, τ))`.
    pub fn to_glyph_text(&self) -> String {
        match self {
            ProcessTree::Tau => "τ".into(),
            ProcessTree::Leaf(l) => text::quote_label(l),
            ProcessTree::Node(op, cs) => {
                let inner: Vec<String> = cs.iter().map(ProcessTree::to_glyph_text).collect();
                format!("{}({})", op.glyph(), inner.join(", "))
            }
        }
    }

    /// Graphviz rendering of the tree itself.
    pub fn to_dot(&self) -> String {
        fn walk(t: &ProcessTree, out: &mut String, next: &mut usize) -> usize {
            let id = *next;
            *next += 1;
            match t {
                ProcessTree::Tau => {
                    let _ = writeln!(out, "  n{id} [label=\"τ\", shape=box, style=dashed];");
                }
                ProcessTree::Leaf(l) => {
                    let _ = writeln!(
                        out,
                        "  n{id} [label=\"{}\", shape=box];",
                        crate::graphs::dot_escape(l)
                    );
                }
                ProcessTree::Node(op, cs) => {
                    let _ = writeln!(out, "  n{id} [label=\"{}\", shape=circle];", op.glyph());
                    for c in cs {
                        let child = walk(c, out, next);
                        let _ = writeln!(out, "  n{id} -> n{child};");
                    }
                }
            }
            id
        }
        let mut out = String::from("digraph tree {\n");
        walk(self, &mut out, &mut 0);
        out.push_str("}\n");
        out
    }
}

fn json_op(op: Operator) -> &'static str {
    match op {
        Operator::Xor => "xor",
        Operator::Sequence => "seq",
        Operator::Parallel => "and",
        Operator::Loop => "loop",
    }
}

/// ASCII text form: `->(a, x(g, tau))`.
impl fmt::Display for ProcessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessTree::Tau => f.write_str("tau"),
            ProcessTree::Leaf(l) => f.write_str(&text::quote_label(l)),
            ProcessTree::Node(op, cs) => {
                write!(f, "{}(", op.ascii())?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl std::str::FromStr for ProcessTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_text(s)
    }
}
