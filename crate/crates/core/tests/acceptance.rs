//! Acceptance suite. Every check prints one `PASS`/`FAIL` line to stderr,
//! bypassing the test harness capture, then asserts.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use pim_core::cut::{aggregate_loop, aggregate_para, aggregate_xor_seq};
use pim_core::quality::{fitness, precision, QualityOptions};
use pim_core::scores::score;
use pim_core::{
    discover, discover_with_trace, find_cut, split, ActivityId, BlockGraph, BlockNode,
    DiscoveryOptions, EventLog, FollowsGraphs, LogShape, Operator, ProcessTree, Relation,
    ScoreKind, ScoreTable, SearchOptions, Step,
};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRunner};

const L0: &str =
    "a,b,c,e; a,c,b,f; a,b,c,d,c,b,e^2; a,c,b,d,b,c,f; a,c,b,d,b,c,d,b,c,f; a,g^9; a,g,c,g";
const L2: &str = "b,c,e; c,b,f; b,c,d,c,b,e^2; c,b,d,b,c,f; c,b,d,b,c,d,b,c,f; g^9; g,c,g";
const L5: &str = "b,c; c,b; b,c,d,c,b^2; c,b,d,b,c; c,b,d,b,c,d,b,c";
const L6: &str = "b,c^6; c,b^5";
const REFERENCE_TREE: &str = "->(a, x(g, ->(loop(/\\(b, c), d), x(e, f))))";

/// Drops exactly the frequency-one edges of L0.
const L0_FILTER: f64 = 81.0;

fn report(criterion: &str, pass: bool, detail: impl std::fmt::Display) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr().lock(),
        "[acceptance] {criterion}: {verdict} ({detail})"
    );
    pass
}

fn ids(log: &EventLog, labels: &str) -> Vec<ActivityId> {
    let mut v: Vec<ActivityId> = labels
        .split(',')
        .map(|l| log.table().get(l.trim()).expect("known label"))
        .collect();
    v.sort();
    v
}

fn id(log: &EventLog, label: &str) -> ActivityId {
    log.table().get(label).expect("known label")
}

fn assert_sound(t: &ProcessTree) -> bool {
    let g = BlockGraph::from_tree(t);
    let only_xor_and = g.nodes.iter().filter(|n| n.is_gateway()).all(|n| {
        matches!(
            n,
            BlockNode::XorSplit | BlockNode::XorJoin | BlockNode::AndSplit | BlockNode::AndJoin
        )
    });
    only_xor_and && g.check_sound().is_ok()
}

#[test]
fn criterion_1_follows_relation_golden() {
    let log = EventLog::from_notation("a,a,b,c,b,b,a,b");
    let g = FollowsGraphs::build(&log);
    let (df, idf) = (
        g.df(id(&log, "a"), id(&log, "b")),
        g.idf(id(&log, "a"), id(&log, "b")),
    );
    let ok = report(
        "criterion 1 follows relations",
        df == 2 && idf == 4,
        format!("|a->b| = {df}, |a=>b| = {idf}"),
    );
    assert!(ok);
}

#[test]
fn criterion_2_relation_score_goldens() {
    let log = EventLog::from_notation(L0);
    let g = FollowsGraphs::build(&log);
    let a = |l| id(&log, l);
    let xor_bg = score(ScoreKind::Xor, a("b"), a("g"), &g).unwrap();
    let par_bc = score(ScoreKind::Parallel, a("b"), a("c"), &g).unwrap();
    let seq_ag = score(ScoreKind::Sequence, a("a"), a("g"), &g).unwrap();
    let mut cg = g.clone();
    cg.remove_edge(Relation::Direct, a("c"), a("g"));
    cg.remove_edge(Relation::Direct, a("g"), a("c"));
    let xor_ag = score(ScoreKind::Xor, a("a"), a("g"), &cg).unwrap();

    let checks = [
        xor_bg == 1.0,
        (par_bc - 5.0 / 7.0).abs() <= 1e-9,
        (seq_ag - 11.0 / 12.0).abs() <= 0.01,
        (seq_ag - 0.92).abs() <= 0.01,
        (xor_ag - 0.156).abs() <= 0.01,
        (xor_ag - 0.16).abs() <= 0.01,
    ];
    let ok = report(
        "criterion 2 relation scores",
        checks.iter().all(|&c| c),
        format!("xor(b,g) = {xor_bg}, par(b,c) = {par_bc:.6}, seq(a,g) = {seq_ag:.4}, xor(a,g) without c<->g = {xor_ag:.4}"),
    );
    assert!(ok);
}

type CutKey = (Operator, Vec<String>, Vec<String>);

fn cut_key(cut: &pim_core::discovery::CutRecord) -> CutKey {
    let (mut s1, mut s2) = (cut.sigma1.clone(), cut.sigma2.clone());
    s1.sort();
    s2.sort();
    if cut.operator.is_symmetric() && s2 < s1 {
        std::mem::swap(&mut s1, &mut s2);
    }
    (cut.operator, s1, s2)
}

fn expected_cut(op: Operator, s1: &str, s2: &str) -> (Operator, Vec<String>, Vec<String>) {
    let split = |s: &str| s.chars().map(String::from).collect::<Vec<_>>();
    let (mut a, mut b) = (split(s1), split(s2));
    if op.is_symmetric() && b < a {
        std::mem::swap(&mut a, &mut b);
    }
    (op, a, b)
}

#[test]
fn criterion_3_end_to_end_golden() {
    let log = EventLog::from_notation(L0);
    let (tree, steps) =
        discover_with_trace(&log, &DiscoveryOptions::with_filter(L0_FILTER)).unwrap();
    let expected: ProcessTree = REFERENCE_TREE.parse().unwrap();
    let tree_ok = tree.canonical() == expected.canonical();

    let cuts: Vec<(usize, CutKey)> = steps
        .iter()
        .filter_map(|s| match s {
            Step::Cut { depth, cut, .. } => Some((*depth, cut_key(cut))),
            _ => None,
        })
        .collect();
    let mut want = vec![
        (0, expected_cut(Operator::Sequence, "a", "bcdefg")),
        (1, expected_cut(Operator::Xor, "bcdef", "g")),
        (2, expected_cut(Operator::Sequence, "bcd", "ef")),
        (3, expected_cut(Operator::Xor, "e", "f")),
        (3, expected_cut(Operator::Loop, "bc", "d")),
        (4, expected_cut(Operator::Parallel, "b", "c")),
    ];
    let mut got = cuts.clone();
    got.sort();
    want.sort();
    let trace_ok = got == want;
    let ok = report(
        "criterion 3 end-to-end L0",
        tree_ok && trace_ok,
        format!("tree {tree}, {} cuts in trace", cuts.len()),
    );
    assert!(ok);
}

#[test]
fn criterion_4_correction_terms_decide() {
    let l0 = EventLog::from_notation(L0);
    let g0 = FollowsGraphs::build(&l0).filter(L0_FILTER).unwrap();
    let t0 = ScoreTable::new(&g0);
    let c1 =
        aggregate_xor_seq(Operator::Xor, &ids(&l0, "a,b,c,d,e,f"), &ids(&l0, "g"), &t0).unwrap();
    let c2 = aggregate_xor_seq(
        Operator::Sequence,
        &ids(&l0, "a"),
        &ids(&l0, "b,c,d,e,f,g"),
        &t0,
    )
    .unwrap();

    let l5 = EventLog::from_notation(L5);
    let g5 = FollowsGraphs::build(&l5);
    let t5 = ScoreTable::new(&g5);
    let shape5 = LogShape::of(&l5);
    let c6 = aggregate_para(&ids(&l5, "b"), &ids(&l5, "c,d"), &t5, shape5).unwrap();
    let d = ids(&l5, "d");
    let c7 = aggregate_loop(&ids(&l5, "b,c"), &d, &d, &d, &t5, &g5, shape5).unwrap();

    // Selection on small alphabets agrees with exhaustive enumeration.
    let mut oracle_ok = true;
    for (text, filter) in [(L5, 100.0), (L6, 100.0), (L2, L0_FILTER)] {
        let log = EventLog::from_notation(text);
        let g = FollowsGraphs::build(&log).filter(filter).unwrap();
        let shape = LogShape::of(&log);
        let found = find_cut(&g, shape, SearchOptions::default()).unwrap();
        let oracle = common::brute_force_cut(&g, shape);
        oracle_ok &= found.operator == oracle.operator
            && found.sigma1 == oracle.sigma1
            && (found.score - oracle.score).abs() <= 1e-9;
    }
    let l5_cut = find_cut(&g5, shape5, SearchOptions::default()).unwrap();
    let l5_ok = l5_cut.operator == Operator::Loop && l5_cut.sigma1 == ids(&l5, "b,c");

    let ok = report(
        "criterion 4 correction terms decide",
        c2 > c1 && c7 > c6 && oracle_ok && l5_ok,
        format!("c2 {c2:.3} > c1 {c1:.3}; c7 {c7:.3} > c6 {c6:.3}; oracle agreement {oracle_ok}"),
    );
    assert!(ok);
}

#[test]
fn criterion_4_printed_magnitudes() {
    const TOLERANCE: f64 = 0.1;
    let l0 = EventLog::from_notation(L0);
    let g0 = FollowsGraphs::build(&l0).filter(L0_FILTER).unwrap();
    let t0 = ScoreTable::new(&g0);
    let c1 =
        aggregate_xor_seq(Operator::Xor, &ids(&l0, "a,b,c,d,e,f"), &ids(&l0, "g"), &t0).unwrap();
    let c2 = aggregate_xor_seq(
        Operator::Sequence,
        &ids(&l0, "a"),
        &ids(&l0, "b,c,d,e,f,g"),
        &t0,
    )
    .unwrap();
    let c1_ok = report(
        "criterion 4 magnitude c1",
        (c1 - 0.54).abs() <= TOLERANCE,
        format!("{c1:.3} vs .54 +/- {TOLERANCE}"),
    );
    let c2_ok = report(
        "criterion 4 magnitude c2",
        (c2 - 0.67).abs() <= TOLERANCE,
        format!("{c2:.3} vs .67 +/- {TOLERANCE}"),
    );
    assert!(c1_ok && c2_ok, "c1 = {c1}, c2 = {c2}");
}

#[test]
fn criterion_5_skip_handling() {
    let o = DiscoveryOptions::default();
    let skipping = discover(&EventLog::from_notation("a,b^4; <>^6"), &o).unwrap();
    let regular = discover(&EventLog::from_notation("a,b^6; <>^4"), &o).unwrap();
    let is_skip =
        |t: &ProcessTree| matches!(t, ProcessTree::Node(Operator::Xor, cs) if cs[0].is_tau());
    let ok = report(
        "criterion 5 skip handling",
        is_skip(&skipping)
            && !is_skip(&regular)
            && assert_sound(&skipping)
            && assert_sound(&regular),
        format!("6/4 -> {skipping}, 4/6 -> {regular}"),
    );
    assert!(ok);
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> bool
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    match runner.run(&strategy, test) {
        Ok(()) => true,
        Err(e) => {
            let _ = writeln!(
                std::io::stderr().lock(),
                "[acceptance]   property `{name}` failed: {e}"
            );
            false
        }
    }
}

#[test]
fn criterion_6_property_suites() {
    let started = Instant::now();
    let mut ok = true;

    ok &= run_property(
        "score range",
        (common::arb_log(), 0.0..=100.0f64),
        |(log, f)| {
            let g = FollowsGraphs::build(&log).filter(f).unwrap();
            for &a in g.nodes() {
                for &b in g.nodes() {
                    if a == b {
                        continue;
                    }
                    for kind in ScoreKind::ALL {
                        let s = score(kind, a, b, &g).unwrap();
                        prop_assert!((0.0..=1.0).contains(&s), "{kind:?} = {s}");
                    }
                }
            }
            Ok(())
        },
    );

    ok &= run_property(
        "filter monotonicity and tie groups",
        (common::arb_log(), 0.0..=100.0f64, 0.0..=100.0f64),
        |(log, x, y)| {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            let g = FollowsGraphs::build(&log);
            let (gl, gh) = (g.filter(lo).unwrap(), g.filter(hi).unwrap());
            for e in g.edges() {
                let kept_lo = gl.frequency(e.relation, e.from, e.to) > 0;
                let kept_hi = gh.frequency(e.relation, e.from, e.to) > 0;
                prop_assert!(!kept_lo || kept_hi);
                for other in g.edges().iter().filter(|o| o.frequency == e.frequency) {
                    prop_assert_eq!(
                        kept_lo,
                        gl.frequency(other.relation, other.from, other.to) > 0
                    );
                }
            }
            Ok(())
        },
    );

    ok &= run_property(
        "split conservation",
        (
            common::arb_log(),
            prop::sample::select(Operator::ALL.to_vec()),
            any::<u32>(),
        ),
        |(log, op, bits)| {
            let alphabet = log.alphabet();
            prop_assume!(alphabet.len() >= 2);
            let mut s1: Vec<ActivityId> = alphabet
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, &a)| a)
                .collect();
            if s1.is_empty() || s1.len() == alphabet.len() {
                s1 = vec![alphabet[0]];
            }
            let s2: Vec<ActivityId> = alphabet
                .iter()
                .copied()
                .filter(|a| !s1.contains(a))
                .collect();
            let cut = pim_core::Cut {
                operator: op,
                sigma1: s1,
                sigma2: s2,
                redo_starts: Vec::new(),
                redo_ends: Vec::new(),
                score: 0.0,
            };
            let r = split(&log, &cut).unwrap();
            prop_assert_eq!(
                r.left.event_count() + r.right.event_count() + r.filtered_events,
                log.event_count()
            );
            prop_assert!(r.left.empty_count() >= log.empty_count());
            prop_assert!(r.right.empty_count() >= log.empty_count());
            Ok(())
        },
    );

    ok &= run_property(
        "find_cut equals brute force",
        (common::arb_log(), 50.0..=100.0f64),
        |(log, f)| {
            let g = FollowsGraphs::build(&log).filter(f).unwrap();
            prop_assume!(g.nodes().len() >= 2);
            let shape = LogShape::of(&log);
            let found = find_cut(&g, shape, SearchOptions::default()).unwrap();
            let oracle = common::brute_force_cut(&g, shape);
            prop_assert_eq!(found.operator, oracle.operator);
            prop_assert_eq!(&found.sigma1, &oracle.sigma1);
            prop_assert!((found.score - oracle.score).abs() <= 1e-9);
            Ok(())
        },
    );

    ok &= run_property(
        "discovery terminates deterministically",
        (common::arb_log(), 50.0..=100.0f64),
        |(log, f)| {
            let o = DiscoveryOptions::with_filter(f);
            let t1 = discover(&log, &o).unwrap();
            let t2 = discover(&log, &o).unwrap();
            prop_assert_eq!(&t1, &t2);
            let alphabet: Vec<&str> = log.alphabet().iter().map(|&a| log.label(a)).collect();
            prop_assert!(t1.labels().iter().all(|l| alphabet.contains(l)));
            prop_assert!(assert_sound(&t1));
            Ok(())
        },
    );

    ok &= run_property(
        "self-generated logs fit perfectly",
        common::arb_tree(),
        |t| {
            let Some(log) = common::log_of_language(&t, 1) else {
                return Err(TestCaseError::reject("language too large"));
            };
            let o = QualityOptions {
                loop_bound: 1,
                ..QualityOptions::default()
            };
            prop_assert_eq!(fitness(&t, &log, o).unwrap(), 1.0);
            prop_assert_eq!(precision(&t, &log, o).unwrap(), 1.0);
            Ok(())
        },
    );

    let elapsed = started.elapsed();
    let ok = report(
        "criterion 6 property suites",
        ok && elapsed < Duration::from_secs(60),
        format!("6 properties x 256 cases in {:.1} s", elapsed.as_secs_f64()),
    );
    assert!(ok);
}

#[test]
fn criterion_7_block_structure() {
    let mut trees: Vec<ProcessTree> = vec![
        discover(
            &EventLog::from_notation(L0),
            &DiscoveryOptions::with_filter(L0_FILTER),
        )
        .unwrap(),
        discover(&EventLog::from_notation(L0), &DiscoveryOptions::default()).unwrap(),
        discover(&EventLog::from_notation(L5), &DiscoveryOptions::default()).unwrap(),
        discover(
            &EventLog::from_notation("a,b^4; <>^6"),
            &DiscoveryOptions::default(),
        )
        .unwrap(),
        discover(&common::synthetic_log(500, 7), &DiscoveryOptions::default()).unwrap(),
    ];
    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    let mut all_sound = true;
    for _ in 0..256 {
        let log = common::arb_log().new_tree(&mut runner).unwrap().current();
        let t = discover(&log, &DiscoveryOptions::default()).unwrap();
        all_sound &= assert_sound(&t);
    }
    trees.push(REFERENCE_TREE.parse().unwrap());
    let fixed_sound = trees.iter().all(assert_sound);
    let ok = report(
        "criterion 7 block structure",
        all_sound && fixed_sound,
        format!("{} fixed and 256 random discovered trees", trees.len()),
    );
    assert!(ok);
}

fn best_of(runs: usize, log: &EventLog, o: &DiscoveryOptions) -> (Duration, ProcessTree) {
    let mut best = Duration::MAX;
    let mut tree = ProcessTree::Tau;
    for _ in 0..runs {
        let start = Instant::now();
        tree = discover(log, o).unwrap();
        best = best.min(start.elapsed());
    }
    (best, tree)
}

#[test]
fn criterion_8_performance_smoke() {
    const LIMIT: Duration = Duration::from_secs(10);
    const MAX_RATIO: f64 = 2.5;
    let o = DiscoveryOptions {
        exhaustive_limit: 12,
        ..DiscoveryOptions::default()
    };
    let small = common::synthetic_log(10_000, 42);
    let large = common::synthetic_log(20_000, 42);
    assert_eq!(small.alphabet().len(), 20);
    let (t_small, tree) = best_of(3, &small, &o);
    let (t_large, _) = best_of(3, &large, &o);
    let ratio = t_large.as_secs_f64() / t_small.as_secs_f64();
    let ok = report(
        "criterion 8 performance smoke",
        t_small < LIMIT && ratio < MAX_RATIO && assert_sound(&tree),
        format!(
            "10k traces {:.3} s, 20k traces {:.3} s, ratio {ratio:.2}",
            t_small.as_secs_f64(),
            t_large.as_secs_f64()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_9_declared_not_reproducible() {
    let _ = writeln!(
        std::io::stderr().lock(),
        "[acceptance] criterion 9 benchmark tables and user study: NOT REPRODUCIBLE (declared; external logs and \
         measurement tooling, substituted by criteria 1-8)"
    );
}
