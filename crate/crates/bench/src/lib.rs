//! Synthetic logs for the benchmarks.

use pim_core::{EventLog, Operator, ProcessTree};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MODEL: &str = "->(t01, x(->(t02, t03), t04), loop(/\\(t05, t06), t07), \
     /\\(t08, x(t09, t10)), x(->(t11, loop(t12, t13)), t14), /\\(t15, t16, t17), x(t18, t19), t20)";

fn walk(t: &ProcessTree, rng: &mut ChaCha8Rng, out: &mut Vec<String>) {
    match t {
        ProcessTree::Tau => {}
        ProcessTree::Leaf(l) => out.push(l.clone()),
        ProcessTree::Node(Operator::Xor, cs) => walk(&cs[rng.gen_range(0..cs.len())], rng, out),
        ProcessTree::Node(Operator::Sequence, cs) => cs.iter().for_each(|c| walk(c, rng, out)),
        ProcessTree::Node(Operator::Parallel, cs) => {
            let mut parts: Vec<Vec<String>> = cs
                .iter()
                .map(|c| {
                    let mut v = Vec::new();
                    walk(c, rng, &mut v);
                    v.reverse();
                    v
                })
                .collect();
            loop {
                let open: Vec<usize> = (0..parts.len()).filter(|&i| !parts[i].is_empty()).collect();
                if open.is_empty() {
                    break;
                }
                let i = open[rng.gen_range(0..open.len())];
                out.extend(parts[i].pop());
            }
        }
        ProcessTree::Node(Operator::Loop, cs) => {
            walk(&cs[0], rng, out);
            for _ in 0..4 {
                if !rng.gen_bool(0.3) {
                    break;
                }
                walk(&cs[1 + rng.gen_range(0..cs.len() - 1)], rng, out);
                walk(&cs[0], rng, out);
            }
        }
    }
}

/// Plays out [`MODEL`] `traces` times; one trace in ten loses or swaps an event.
pub fn synthetic_log(traces: usize, seed: u64) -> EventLog {
    let model: ProcessTree = MODEL.parse().expect("model parses");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(traces);
    for _ in 0..traces {
        let mut t = Vec::new();
        walk(&model, &mut rng, &mut t);
        if t.len() > 2 && rng.gen_bool(0.1) {
            let i = rng.gen_range(0..t.len() - 1);
            if rng.gen_bool(0.5) {
                t.remove(i);
            } else {
                t.swap(i, i + 1);
            }
        }
        rows.push(t);
    }
    let refs: Vec<(Vec<&str>, u64)> = rows
        .iter()
        .map(|t| (t.iter().map(String::as_str).collect(), 1))
        .collect();
    let refs: Vec<(&[&str], u64)> = refs.iter().map(|(t, c)| (t.as_slice(), *c)).collect();
    EventLog::from_variants(&refs)
}
