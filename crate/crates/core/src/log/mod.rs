//! Event logs as multisets of activity-sequence variants.
//!
//! Activities are interned per log into dense [`ActivityId`]s in order of
//! first appearance. Sublogs produced during discovery share the interning
//! table of their parent, so ids stay stable across the recursion while the
//! alphabet of each sublog is computed from the variants it actually holds.

mod csv;
mod variants;
mod xes;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use self::csv::{parse_csv, write_csv, CsvConfig};
pub use self::variants::{parse_variants, write_variants};
pub use self::xes::parse_xes_lite;

/// Dense per-log activity handle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ActivityId(pub u32);

impl ActivityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ActivityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Bijection between activity labels and `0..len`.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ActivityTable {
    labels: Vec<String>,
    index: HashMap<String, ActivityId>,
}

impl ActivityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> ActivityId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = ActivityId(self.labels.len() as u32);
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<ActivityId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: ActivityId) -> &str {
        &self.labels[id.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ActivityId> {
        (0..self.labels.len() as u32).map(ActivityId)
    }
}

/// A non-empty sequence of activities. Empty traces live in
/// [`EventLog::empty_count`] instead.
pub type Trace = Vec<ActivityId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LogStats {
    pub traces: u64,
    pub events: u64,
    pub alphabet_size: usize,
    pub distinct_variants: usize,
    pub empty_traces: u64,
}

/// Multiset of traces plus a counter of empty traces.
#[derive(Debug, Clone)]
pub struct EventLog {
    table: Arc<ActivityTable>,
    variants: BTreeMap<Trace, u64>,
    empty_count: u64,
    skipped_events: u64,
}

impl EventLog {
    /// An empty log over `table`.
    pub fn with_table(table: Arc<ActivityTable>) -> Self {
        Self {
            table,
            variants: BTreeMap::new(),
            empty_count: 0,
            skipped_events: 0,
        }
    }

    pub fn empty() -> Self {
        Self::with_table(Arc::new(ActivityTable::new()))
    }

    /// Builds a log from label sequences with counts. Activity ids follow
    /// first appearance in `variants`.
    pub fn from_variants<S: AsRef<str>>(variants: &[(&[S], u64)]) -> Self {
        let mut builder = LogBuilder::new();
        for (trace, count) in variants {
            builder.push_labels(trace.iter().map(|s| s.as_ref()), *count);
        }
        builder.build()
    }

    /// Parses the compact notation used in tests and docs: traces separated by
    /// `;`, activities by `,`, optional `^count` suffix. `<>` is the empty trace.
    ///
    /// `"a,b,c^2; a,g; <>^3"`
    pub fn from_notation(text: &str) -> Self {
        let mut builder = LogBuilder::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (body, count) = match part.rsplit_once('^') {
                Some((body, n)) => (body.trim(), n.trim().parse().expect("count")),
                None => (part, 1),
            };
            if body == "<>" {
                builder.push_labels(std::iter::empty::<&str>(), count);
            } else {
                builder.push_labels(body.split(',').map(str::trim), count);
            }
        }
        builder.build()
    }

    /// An empty log sharing this log's activity table.
    pub fn derived(&self) -> Self {
        Self::with_table(Arc::clone(&self.table))
    }

    pub fn table(&self) -> &Arc<ActivityTable> {
        &self.table
    }

    pub fn label(&self, id: ActivityId) -> &str {
        self.table.label(id)
    }

    /// Adds `count` copies of `trace`; an empty trace increments the
    /// empty-trace counter.
    pub fn add_trace(&mut self, trace: &[ActivityId], count: u64) {
        if count == 0 {
            return;
        }
        if trace.is_empty() {
            self.empty_count += count;
        } else {
            *self.variants.entry(trace.to_vec()).or_insert(0) += count;
        }
    }

    pub fn add_empty(&mut self, count: u64) {
        self.empty_count += count;
    }

    pub fn variants(&self) -> impl Iterator<Item = (&Trace, u64)> {
        self.variants.iter().map(|(t, &c)| (t, c))
    }

    pub fn distinct_variants(&self) -> usize {
        self.variants.len()
    }

    pub fn empty_count(&self) -> u64 {
        self.empty_count
    }

    /// Events without `concept:name` skipped during XES import.
    pub fn skipped_events(&self) -> u64 {
        self.skipped_events
    }

    pub(crate) fn set_skipped_events(&mut self, n: u64) {
        self.skipped_events = n;
    }

    /// |L|, including empty traces.
    pub fn trace_count(&self) -> u64 {
        self.non_empty_trace_count() + self.empty_count
    }

    pub fn non_empty_trace_count(&self) -> u64 {
        self.variants.values().sum()
    }

    /// ||L||.
    pub fn event_count(&self) -> u64 {
        self.variants.iter().map(|(t, &c)| t.len() as u64 * c).sum()
    }

    /// Activities occurring in at least one variant, sorted by id.
    pub fn alphabet(&self) -> Vec<ActivityId> {
        let set: BTreeSet<ActivityId> = self.variants.keys().flatten().copied().collect();
        set.into_iter().collect()
    }

    /// |a| for every activity of the table (zero when absent).
    pub fn activity_frequencies(&self) -> Vec<u64> {
        let mut freq = vec![0u64; self.table.len()];
        for (trace, &count) in &self.variants {
            for &a in trace {
                freq[a.index()] += count;
            }
        }
        freq
    }

    pub fn stats(&self) -> LogStats {
        LogStats {
            traces: self.trace_count(),
            events: self.event_count(),
            alphabet_size: self.alphabet().len(),
            distinct_variants: self.variants.len(),
            empty_traces: self.empty_count,
        }
    }

    /// The log without its empty traces.
    pub fn without_empty(&self) -> Self {
        let mut log = self.clone();
        log.empty_count = 0;
        log
    }

    /// Keeps only events whose activity satisfies `keep`. Traces that lose
    /// all their events become empty traces. Returns the number of removed
    /// events alongside the projected log.
    pub fn project(&self, keep: impl Fn(ActivityId) -> bool) -> (Self, u64) {
        let mut out = self.derived();
        out.empty_count = self.empty_count;
        let mut removed = 0;
        for (trace, &count) in &self.variants {
            let projected: Trace = trace.iter().copied().filter(|&a| keep(a)).collect();
            removed += (trace.len() - projected.len()) as u64 * count;
            out.add_trace(&projected, count);
        }
        (out, removed)
    }

    /// Every count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Self {
        let mut out = self.clone();
        for c in out.variants.values_mut() {
            *c *= k;
        }
        out.empty_count *= k;
        out
    }

    /// Variants keyed by label sequences, independent of interning order.
    pub fn label_variants(&self) -> BTreeMap<Vec<&str>, u64> {
        self.variants
            .iter()
            .map(|(t, &c)| (t.iter().map(|&a| self.label(a)).collect(), c))
            .collect()
    }

    /// Renders a trace as `⟨a,b,c⟩`-style text without the brackets.
    pub fn trace_labels(&self, trace: &[ActivityId]) -> Vec<&str> {
        trace.iter().map(|&a| self.label(a)).collect()
    }
}

/// Logs compare by their label-level content.
impl PartialEq for EventLog {
    fn eq(&self, other: &Self) -> bool {
        self.empty_count == other.empty_count && self.label_variants() == other.label_variants()
    }
}

impl Eq for EventLog {}

/// Incremental construction with first-appearance interning.
#[derive(Debug, Default)]
pub struct LogBuilder {
    table: ActivityTable,
    traces: Vec<(Trace, u64)>,
    empty: u64,
}

impl LogBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> ActivityId {
        self.table.intern(label)
    }

    pub fn push_labels<'a>(&mut self, labels: impl IntoIterator<Item = &'a str>, count: u64) {
        let trace: Trace = labels.into_iter().map(|l| self.table.intern(l)).collect();
        self.push_ids(trace, count);
    }

    pub fn push_ids(&mut self, trace: Trace, count: u64) {
        if trace.is_empty() {
            self.empty += count;
        } else {
            self.traces.push((trace, count));
        }
    }

    pub fn build(self) -> EventLog {
        let mut log = EventLog::with_table(Arc::new(self.table));
        for (trace, count) in self.traces {
            log.add_trace(&trace, count);
        }
        log.empty_count += self.empty;
        log
    }
}
