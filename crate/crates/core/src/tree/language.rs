//! Bounded trace language of a process tree.

use std::collections::{BTreeSet, HashMap};

use super::{Operator, ProcessTree};
use crate::error::{Error, Result};

/// Default cap on the number of traces a language may hold.
pub const DEFAULT_LANGUAGE_LIMIT: usize = 200_000;

type Lang = BTreeSet<Vec<u32>>;

/// Label interner shared between a model language and the log it is
/// compared with.
#[derive(Debug, Default, Clone)]
pub(crate) struct Symbols {
    ids: HashMap<String, u32>,
}

impl Symbols {
    pub(crate) fn id(&mut self, label: &str) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(label.to_owned()).or_insert(next)
    }

    fn labels(&self) -> Vec<&str> {
        let mut v = vec![""; self.ids.len()];
        for (l, &i) in &self.ids {
            v[i as usize] = l;
        }
        v
    }
}

fn too_large(limit: usize) -> Error {
    Error::TooLarge(format!("model language exceeds {limit} traces"))
}

fn insert(set: &mut Lang, trace: Vec<u32>, limit: usize) -> Result<()> {
    set.insert(trace);
    if set.len() > limit {
        return Err(too_large(limit));
    }
    Ok(())
}

fn concat(a: &Lang, b: &Lang, limit: usize) -> Result<Lang> {
    let mut out = Lang::new();
    for x in a {
        for y in b {
            let mut t = Vec::with_capacity(x.len() + y.len());
            t.extend_from_slice(x);
            t.extend_from_slice(y);
            insert(&mut out, t, limit)?;
        }
    }
    Ok(out)
}

fn interleave(
    x: &[u32],
    y: &[u32],
    prefix: &mut Vec<u32>,
    out: &mut Lang,
    limit: usize,
) -> Result<()> {
    match (x.split_first(), y.split_first()) {
        (None, _) | (_, None) => {
            let mut t = prefix.clone();
            t.extend_from_slice(x);
            t.extend_from_slice(y);
            insert(out, t, limit)
        }
        (Some((&hx, tx)), Some((&hy, ty))) => {
            prefix.push(hx);
            interleave(tx, y, prefix, out, limit)?;
            prefix.pop();
            prefix.push(hy);
            interleave(x, ty, prefix, out, limit)?;
            prefix.pop();
            Ok(())
        }
    }
}

fn shuffle(a: &Lang, b: &Lang, limit: usize) -> Result<Lang> {
    let mut out = Lang::new();
    for x in a {
        for y in b {
            interleave(x, y, &mut Vec::new(), &mut out, limit)?;
        }
    }
    Ok(out)
}

pub(crate) fn language_ids(
    t: &ProcessTree,
    bound: usize,
    limit: usize,
    symbols: &mut Symbols,
) -> Result<Lang> {
    match t {
        ProcessTree::Tau => Ok(Lang::from([Vec::new()])),
        ProcessTree::Leaf(l) => Ok(Lang::from([vec![symbols.id(l)]])),
        ProcessTree::Node(op, cs) => {
            let mut langs = Vec::with_capacity(cs.len());
            for c in cs {
                langs.push(language_ids(c, bound, limit, symbols)?);
            }
            match op {
                Operator::Xor => {
                    let mut out = Lang::new();
                    for l in langs {
                        for t in l {
                            insert(&mut out, t, limit)?;
                        }
                    }
                    Ok(out)
                }
                Operator::Sequence | Operator::Parallel => {
                    let mut it = langs.into_iter();
                    let mut acc = it.next().expect("operator with children");
                    for l in it {
                        acc = if *op == Operator::Sequence {
                            concat(&acc, &l, limit)?
                        } else {
                            shuffle(&acc, &l, limit)?
                        };
                    }
                    Ok(acc)
                }
                Operator::Loop => {
                    let mut it = langs.into_iter();
                    let body = it.next().expect("loop body");
                    let redo: Lang = it.flatten().collect();
                    let step = concat(&redo, &body, limit)?;
                    let mut out = body.clone();
                    let mut frontier = body;
                    for _ in 0..bound {
                        frontier = concat(&frontier, &step, limit)?;
                        for t in &frontier {
                            insert(&mut out, t.clone(), limit)?;
                        }
                    }
                    Ok(out)
                }
            }
        }
    }
}

/// All traces of `t` with every loop iterating its redo part at most
/// `bound` times. Fails with [`Error::TooLarge`] beyond
/// [`DEFAULT_LANGUAGE_LIMIT`] traces.
pub fn language(t: &ProcessTree, bound: usize) -> Result<BTreeSet<Vec<String>>> {
    language_with_limit(t, bound, DEFAULT_LANGUAGE_LIMIT)
}

pub fn language_with_limit(
    t: &ProcessTree,
    bound: usize,
    limit: usize,
) -> Result<BTreeSet<Vec<String>>> {
    let mut symbols = Symbols::default();
    let ids = language_ids(t, bound, limit, &mut symbols)?;
    let labels = symbols.labels();
    Ok(ids
        .into_iter()
        .map(|t| {
            t.into_iter()
                .map(|i| labels[i as usize].to_owned())
                .collect()
        })
        .collect())
}
