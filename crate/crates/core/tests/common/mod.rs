#![allow(dead_code)]

use std::collections::BTreeSet;

use pim_core::tree::language_with_limit;
use pim_core::{ActivityId, EventLog, FollowsGraphs, LogShape, Operator, ProcessTree};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const LABELS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Logs over at most six activities with at most eight events per trace.
pub fn arb_log() -> impl Strategy<Value = EventLog> {
    (2usize..=6)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((prop::collection::vec(0..n, 1..=8), 1u64..=4), 1..=10),
                0u64..=2,
            )
        })
        .prop_map(|(traces, empty)| {
            let rows: Vec<(Vec<&str>, u64)> = traces
                .into_iter()
                .map(|(t, c)| (t.into_iter().map(|i| LABELS[i]).collect(), c))
                .collect();
            let refs: Vec<(&[&str], u64)> = rows.iter().map(|(t, c)| (t.as_slice(), *c)).collect();
            let mut log = EventLog::from_variants(&refs);
            log.add_empty(empty);
            log
        })
}

/// Small trees over the six labels, with occasional silent leaves.
pub fn arb_tree() -> impl Strategy<Value = ProcessTree> {
    let leaf = prop_oneof![
        6 => prop::sample::select(LABELS.to_vec()).prop_map(ProcessTree::leaf),
        1 => Just(ProcessTree::Tau),
    ];
    leaf.prop_recursive(3, 8, 3, |inner| {
        (
            prop::sample::select(Operator::ALL.to_vec()),
            prop::collection::vec(inner, 2..=3),
        )
            .prop_map(|(op, cs)| ProcessTree::Node(op, cs))
    })
}

/// The bounded language of `t` as a log with one trace per model trace, or
/// `None` when it is too large for a quick test.
pub fn log_of_language(t: &ProcessTree, bound: usize) -> Option<EventLog> {
    let lang = language_with_limit(t, bound, 2_000).ok()?;
    let rows: Vec<(Vec<&str>, u64)> = lang
        .iter()
        .map(|tr| (tr.iter().map(String::as_str).collect(), 1))
        .collect();
    let refs: Vec<(&[&str], u64)> = rows.iter().map(|(t, c)| (t.as_slice(), *c)).collect();
    Some(EventLog::from_variants(&refs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCut {
    pub operator: Operator,
    pub sigma1: Vec<ActivityId>,
    pub score: f64,
}

fn ratio_min(x: f64, y: f64) -> f64 {
    (x / (y + 1.0)).min(y / (x + 1.0))
}

fn pair_score(kind: &str, g: &FollowsGraphs, a: ActivityId, b: ActivityId) -> f64 {
    let ab = g.df(a, b) as f64;
    let ba = g.df(b, a) as f64;
    let iab = g.idf(a, b) as f64;
    let iba = g.idf(b, a) as f64;
    match kind {
        "xor" => {
            let tot = ab + ba + iab + iba;
            let (ua, ub) = (g.unary(a) as f64, g.unary(b) as f64);
            (((ua - tot) / ua + (ub - tot) / ub) / 2.0).max(0.0)
        }
        "seq" => ((ab + iab - ba - iba) / (ab + iab + ba + iba + 1.0)).max(0.0),
        "par" => ratio_min(ab, ba),
        "loop_single" => ratio_min(ab, iba),
        "loop_indirect" => ratio_min(iab, iba),
        _ => unreachable!(),
    }
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Score of one cut, computed from the raw follows counts.
pub fn oracle_score(
    g: &FollowsGraphs,
    shape: LogShape,
    op: Operator,
    s1: &[ActivityId],
    s2: &[ActivityId],
) -> f64 {
    let r = shape.trace_count as f64 / (shape.event_count as f64 / shape.alphabet_size as f64);
    let pairs = |kind: &str| -> Vec<f64> {
        s1.iter()
            .flat_map(|&a| s2.iter().map(move |&b| (a, b)))
            .map(|(a, b)| pair_score(kind, g, a, b))
            .collect()
    };
    match op {
        Operator::Xor => {
            let (m, s) = mean_sd(&pairs("xor"));
            m - s
        }
        Operator::Sequence => {
            let (m, s) = mean_sd(&pairs("seq"));
            m - s
        }
        Operator::Parallel => mean_sd(&pairs("par")).0 * r.min(1.0),
        Operator::Loop => {
            let border = |into: bool| -> Vec<ActivityId> {
                let v: Vec<ActivityId> = s2
                    .iter()
                    .copied()
                    .filter(|&b| {
                        s1.iter()
                            .any(|&a| if into { g.df(a, b) > 0 } else { g.df(b, a) > 0 })
                    })
                    .collect();
                if v.is_empty() {
                    s2.to_vec()
                } else {
                    v
                }
            };
            let (starts2, ends2) = (border(true), border(false));
            let start: Vec<ActivityId> = g
                .nodes()
                .iter()
                .copied()
                .filter(|&x| g.start(x) > 0)
                .collect();
            let end: Vec<ActivityId> = g
                .nodes()
                .iter()
                .copied()
                .filter(|&x| g.end(x) > 0)
                .collect();
            let mut special = BTreeSet::new();
            for &x in &end {
                for &y in &starts2 {
                    special.insert((x, y));
                }
            }
            for &x in &ends2 {
                for &y in &start {
                    special.insert((x, y));
                }
            }
            let mut bag: Vec<f64> = special
                .iter()
                .map(|&(x, y)| pair_score("loop_single", g, x, y))
                .collect();
            for &a in s1 {
                for &b in s2 {
                    if !special.contains(&(a, b)) {
                        bag.push(pair_score("loop_indirect", g, a, b));
                    }
                }
            }
            let m = mean_sd(&bag).0;
            m + m * (1.0 - r.min(1.0))
        }
    }
}

/// Enumerates every bipartition under every operator and returns the best
/// cut: highest score, then operator order, then smallest side one.
pub fn brute_force_cut(g: &FollowsGraphs, shape: LogShape) -> OracleCut {
    let nodes = g.nodes().to_vec();
    let k = nodes.len();
    let mut best: Option<OracleCut> = None;
    for mask in 1u32..(1 << k) - 1 {
        let s1: Vec<ActivityId> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| nodes[i])
            .collect();
        let s2: Vec<ActivityId> = (0..k)
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| nodes[i])
            .collect();
        for op in Operator::ALL {
            let score = oracle_score(g, shape, op, &s1, &s2);
            let better = match &best {
                None => true,
                Some(b) => {
                    if (score - b.score).abs() > 1e-9 {
                        score > b.score
                    } else {
                        (op, &s1) < (b.operator, &b.sigma1)
                    }
                }
            };
            if better {
                best = Some(OracleCut {
                    operator: op,
                    sigma1: s1.clone(),
                    score,
                });
            }
        }
    }
    best.expect("at least two activities")
}

/// Plays out `t` once. Loops repeat with probability `redo`.
pub fn play_out(t: &ProcessTree, rng: &mut impl Rng, redo: f64, out: &mut Vec<String>) {
    match t {
        ProcessTree::Tau => {}
        ProcessTree::Leaf(l) => out.push(l.clone()),
        ProcessTree::Node(Operator::Xor, cs) => {
            play_out(&cs[rng.gen_range(0..cs.len())], rng, redo, out)
        }
        ProcessTree::Node(Operator::Sequence, cs) => {
            cs.iter().for_each(|c| play_out(c, rng, redo, out))
        }
        ProcessTree::Node(Operator::Parallel, cs) => {
            let mut parts: Vec<Vec<String>> = cs
                .iter()
                .map(|c| {
                    let mut v = Vec::new();
                    play_out(c, rng, redo, &mut v);
                    v.reverse();
                    v
                })
                .collect();
            while parts.iter().any(|p| !p.is_empty()) {
                let open: Vec<usize> = (0..parts.len()).filter(|&i| !parts[i].is_empty()).collect();
                let i = open[rng.gen_range(0..open.len())];
                out.push(parts[i].pop().expect("non-empty"));
            }
        }
        ProcessTree::Node(Operator::Loop, cs) => {
            play_out(&cs[0], rng, redo, out);
            let mut rounds = 0;
            while rounds < 4 && rng.gen_bool(redo) {
                play_out(&cs[1 + rng.gen_range(0..cs.len() - 1)], rng, redo, out);
                play_out(&cs[0], rng, redo, out);
                rounds += 1;
            }
        }
    }
}

/// Twenty-activity model used for the synthetic timing logs.
pub const SYNTHETIC_MODEL: &str = "->(t01, x(->(t02, t03), t04), loop(/\\(t05, t06), t07), \
     /\\(t08, x(t09, t10)), x(->(t11, loop(t12, t13)), t14), /\\(t15, t16, t17), x(t18, t19), t20)";

/// `traces` traces played out from [`SYNTHETIC_MODEL`], one in ten with a
/// dropped or swapped event.
pub fn synthetic_log(traces: usize, seed: u64) -> EventLog {
    let model: ProcessTree = SYNTHETIC_MODEL.parse().expect("model parses");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(traces);
    for _ in 0..traces {
        let mut t = Vec::new();
        play_out(&model, &mut rng, 0.3, &mut t);
        if rng.gen_bool(0.1) && t.len() > 2 {
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
