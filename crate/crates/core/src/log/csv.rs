use std::collections::HashMap;
use std::io::{Read, Write};

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::{ActivityId, EventLog, LogBuilder};
use crate::error::{Error, Result};

/// Column mapping for CSV ingestion. Columns are referenced by header name,
/// or by zero-based index when the input has no header row.
#[derive(Debug, Clone)]
pub struct CsvConfig {
    pub case_column: String,
    pub activity_column: String,
    pub timestamp_column: Option<String>,
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for CsvConfig {
    fn default() -> Self {
        Self {
            case_column: "case".into(),
            activity_column: "activity".into(),
            timestamp_column: None,
            delimiter: b',',
            has_header: true,
        }
    }
}

fn resolve_column(name: &str, headers: Option<&csv::StringRecord>) -> Result<usize> {
    if let Some(headers) = headers {
        if let Some(i) = headers.iter().position(|h| h.trim() == name) {
            return Ok(i);
        }
    }
    name.parse::<usize>()
        .ok()
        .filter(|&i| headers.is_none_or(|h| i < h.len()))
        .ok_or_else(|| Error::MissingColumn(name.to_owned()))
}

/// Timestamp as an ordering key in nanoseconds.
fn parse_timestamp(raw: &str) -> Option<i128> {
    let raw = raw.trim();
    if let Ok(n) = raw.parse::<i64>() {
        return Some(n as i128 * 1_000_000_000);
    }
    if let Ok(x) = raw.parse::<f64>() {
        if x.is_finite() {
            return Some((x * 1e9) as i128);
        }
    }
    let nanos = |dt: NaiveDateTime| {
        let utc = dt.and_utc();
        utc.timestamp() as i128 * 1_000_000_000 + utc.timestamp_subsec_nanos() as i128
    };
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(nanos(dt.naive_utc()));
    }
    const FORMATS: [&str; 4] = [
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y/%m/%d %H:%M:%S%.f",
        "%Y-%m-%d %H:%M",
    ];
    for fmt in FORMATS {
        if let Ok(dt) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(nanos(dt));
        }
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(nanos)
}

struct Case {
    events: Vec<(Option<i128>, usize, ActivityId)>,
}

/// Reads an event log from CSV. Events are grouped per case; within a case
/// they are ordered by timestamp when one is mapped (ties keep input order),
/// otherwise by input order. A row with an empty activity field registers its
/// case without adding an event, so a case made only of such rows becomes an
/// empty trace.
pub fn parse_csv<R: Read>(input: R, config: &CsvConfig) -> Result<EventLog> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(config.delimiter)
        .has_headers(config.has_header)
        .flexible(true)
        .from_reader(input);

    let headers = if config.has_header {
        match reader.headers() {
            Ok(h) => Some(h.clone()),
            Err(e) => return Err(csv_error(e)),
        }
    } else {
        None
    };
    // A header-only or fully empty input is an empty log.
    if headers.as_ref().is_some_and(|h| h.is_empty()) {
        return Ok(EventLog::empty());
    }

    let case_col = resolve_column(&config.case_column, headers.as_ref())?;
    let act_col = resolve_column(&config.activity_column, headers.as_ref())?;
    let ts_col = config
        .timestamp_column
        .as_deref()
        .map(|c| resolve_column(c, headers.as_ref()))
        .transpose()?;

    let mut builder = LogBuilder::new();
    let mut cases: Vec<Case> = Vec::new();
    let mut case_index: HashMap<String, usize> = HashMap::new();

    for (seq, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| {
            record.get(i).ok_or_else(|| Error::Row {
                line,
                message: format!("row has no column {i}"),
            })
        };
        let case_id = field(case_col)?;
        let activity = field(act_col)?.trim();
        let ts = match ts_col {
            Some(c) if !activity.is_empty() => {
                let raw = field(c)?;
                Some(parse_timestamp(raw).ok_or_else(|| Error::Row {
                    line,
                    message: format!("unparsable timestamp `{raw}`"),
                })?)
            }
            _ => None,
        };
        let idx = *case_index.entry(case_id.to_owned()).or_insert_with(|| {
            cases.push(Case { events: Vec::new() });
            cases.len() - 1
        });
        if !activity.is_empty() {
            let id = builder.intern(activity);
            cases[idx].events.push((ts, seq, id));
        }
    }

    for mut case in cases {
        if ts_col.is_some() {
            case.events.sort_by_key(|&(ts, seq, _)| (ts, seq));
        }
        builder.push_ids(case.events.into_iter().map(|(_, _, a)| a).collect(), 1);
    }
    Ok(builder.build())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Row {
            line,
            message: format!("{kind:?}"),
        },
    }
}

/// Writes the log as `case,activity` rows, one case per trace occurrence.
/// Empty traces are written as a single row with an empty activity.
pub fn write_csv<W: Write>(log: &EventLog, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    writer.write_record(["case", "activity"]).map_err(io)?;
    let mut case = 0u64;
    for (trace, count) in log.variants() {
        for _ in 0..count {
            case += 1;
            let id = format!("c{case}");
            for &a in trace {
                writer
                    .write_record([id.as_str(), log.label(a)])
                    .map_err(io)?;
            }
        }
    }
    for _ in 0..log.empty_count() {
        case += 1;
        writer
            .write_record([format!("c{case}").as_str(), ""])
            .map_err(io)?;
    }
    writer.flush()?;
    Ok(())
}
