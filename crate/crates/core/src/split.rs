//! Log splitting by a cut, and the base cases of the recursion.

use serde::Serialize;

use crate::cut::{Cut, Operator};
use crate::error::{Error, Result};
use crate::log::{ActivityId, EventLog};

#[derive(Debug, Clone)]
pub struct SplitResult {
    pub left: EventLog,
    pub right: EventLog,
    /// Events removed because they deviate from the cut.
    pub filtered_events: u64,
}

/// Splits `log` into one sublog per side of `cut`, removing deviating
/// events. Both children inherit the parent's empty traces.
pub fn split(log: &EventLog, cut: &Cut) -> Result<SplitResult> {
    let n = log.table().len();
    let mut side: Vec<Option<bool>> = vec![None; n];
    for &a in &cut.sigma1 {
        side[a.index()] = Some(true);
    }
    for &a in &cut.sigma2 {
        side[a.index()] = Some(false);
    }
    let in1 = |a: ActivityId| -> Result<bool> {
        side.get(a.index()).copied().flatten().ok_or_else(|| {
            Error::Contract(format!(
                "activity `{}` is on neither side of the cut",
                log.label(a)
            ))
        })
    };

    let mut left = log.derived();
    let mut right = log.derived();
    left.add_empty(log.empty_count());
    right.add_empty(log.empty_count());
    let mut filtered = 0u64;

    for (trace, count) in log.variants() {
        let flags: Vec<bool> = trace.iter().map(|&a| in1(a)).collect::<Result<_>>()?;
        match cut.operator {
            Operator::Xor => {
                let ones = flags.iter().filter(|&&f| f).count();
                let twos = flags.len() - ones;
                let to_left = ones >= twos;
                let kept: Vec<ActivityId> = trace
                    .iter()
                    .zip(&flags)
                    .filter(|(_, &f)| f == to_left)
                    .map(|(&a, _)| a)
                    .collect();
                filtered += (trace.len() - kept.len()) as u64 * count;
                if to_left {
                    left.add_trace(&kept, count);
                } else {
                    right.add_trace(&kept, count);
                }
            }
            Operator::Sequence => {
                let at = sequence_split_index(&flags);
                let head: Vec<ActivityId> = trace[..at]
                    .iter()
                    .zip(&flags)
                    .filter(|(_, &f)| f)
                    .map(|(&a, _)| a)
                    .collect();
                let tail: Vec<ActivityId> = trace[at..]
                    .iter()
                    .zip(&flags[at..])
                    .filter(|(_, &f)| !f)
                    .map(|(&a, _)| a)
                    .collect();
                filtered += (trace.len() - head.len() - tail.len()) as u64 * count;
                left.add_trace(&head, count);
                right.add_trace(&tail, count);
            }
            Operator::Parallel => {
                let (a, b): (Vec<_>, Vec<_>) = trace.iter().zip(&flags).partition(|(_, &f)| f);
                let a: Vec<ActivityId> = a.into_iter().map(|(&x, _)| x).collect();
                let b: Vec<ActivityId> = b.into_iter().map(|(&x, _)| x).collect();
                left.add_trace(&a, count);
                right.add_trace(&b, count);
            }
            Operator::Loop => {
                if !flags[0] {
                    left.add_trace(&[], count);
                }
                let mut start = 0;
                while start < trace.len() {
                    let mut end = start;
                    while end < trace.len() && flags[end] == flags[start] {
                        end += 1;
                    }
                    let run = &trace[start..end];
                    if flags[start] {
                        left.add_trace(run, count);
                    } else {
                        right.add_trace(run, count);
                    }
                    start = end;
                }
                if !flags[trace.len() - 1] {
                    left.add_trace(&[], count);
                }
            }
        }
    }
    Ok(SplitResult {
        left,
        right,
        filtered_events: filtered,
    })
}

/// The smallest index minimizing Σ2 events before it plus Σ1 events from it
/// onwards.
fn sequence_split_index(in1: &[bool]) -> usize {
    let ones_total = in1.iter().filter(|&&f| f).count();
    let mut best = (ones_total, 0);
    let (mut twos_before, mut ones_before) = (0, 0);
    for (i, &f) in in1.iter().enumerate() {
        if f {
            ones_before += 1;
        } else {
            twos_before += 1;
        }
        let misplaced = twos_before + (ones_total - ones_before);
        if misplaced < best.0 {
            best = (misplaced, i + 1);
        }
    }
    best.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BaseCase {
    /// No activities left.
    Silent,
    /// A single activity occurring about once per trace.
    Leaf(ActivityId),
    /// A single activity that repeats: `↺(a, τ)`.
    SingleLoop(ActivityId),
    /// Most traces are empty: `×(τ, ·)` around the non-empty remainder.
    Skip,
}

/// Mean occurrences per non-empty trace above which a single activity
/// becomes a loop.
pub const SINGLE_LOOP_THRESHOLD: f64 = 1.5;

pub fn base_case(log: &EventLog) -> Option<BaseCase> {
    let alphabet = log.alphabet();
    if alphabet.is_empty() {
        return Some(BaseCase::Silent);
    }
    if log.empty_count() as f64 > 0.5 * log.trace_count() as f64 {
        return Some(BaseCase::Skip);
    }
    if let [a] = alphabet[..] {
        let mean = log.event_count() as f64 / log.non_empty_trace_count() as f64;
        return Some(if mean <= SINGLE_LOOP_THRESHOLD {
            BaseCase::Leaf(a)
        } else {
            BaseCase::SingleLoop(a)
        });
    }
    None
}
