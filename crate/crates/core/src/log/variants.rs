//! The variants dump: a header line `empty=n` followed by one
//! `count<TAB>a,b,c` line per variant. Labels escape `\`, `,`, tab and
//! newline with a backslash.

use std::io::{BufRead, Write};

use super::{EventLog, LogBuilder};
use crate::error::{Error, Result};

fn escape(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for ch in label.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            ',' => out.push_str("\\,"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

fn split_labels(field: &str, line: u64) -> Result<Vec<String>> {
    let mut labels = Vec::new();
    let mut cur = String::new();
    let mut chars = field.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '\\' => match chars.next() {
                Some('t') => cur.push('\t'),
                Some('n') => cur.push('\n'),
                Some(c @ ('\\' | ',')) => cur.push(c),
                other => {
                    return Err(Error::Row {
                        line,
                        message: format!(
                            "bad escape `\\{}`",
                            other.map_or(String::new(), String::from)
                        ),
                    })
                }
            },
            ',' => labels.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    labels.push(cur);
    if labels.iter().any(|l| l.is_empty()) {
        return Err(Error::Row {
            line,
            message: "empty activity label".into(),
        });
    }
    Ok(labels)
}

/// Parses the variants dump. The `empty=n` header is optional; blank lines
/// and lines starting with `#` are ignored.
pub fn parse_variants<R: BufRead>(input: R) -> Result<EventLog> {
    let mut builder = LogBuilder::new();
    let mut empty = 0u64;
    let mut seen_content = false;
    for (i, line) in input.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line?;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(n) = trimmed.strip_prefix("empty=") {
            if seen_content {
                return Err(Error::Row {
                    line: line_no,
                    message: "`empty=` header must come first".into(),
                });
            }
            empty = n.trim().parse().map_err(|_| Error::Row {
                line: line_no,
                message: format!("bad empty-trace count `{n}`"),
            })?;
            seen_content = true;
            continue;
        }
        seen_content = true;
        let (count, trace) = trimmed.split_once('\t').ok_or_else(|| Error::Row {
            line: line_no,
            message: "expected `count<TAB>activities`".into(),
        })?;
        let count: u64 = count.trim().parse().map_err(|_| Error::Row {
            line: line_no,
            message: format!("bad count `{count}`"),
        })?;
        if count == 0 {
            return Err(Error::Row {
                line: line_no,
                message: "variant count must be at least 1".into(),
            });
        }
        let labels = split_labels(trace, line_no)?;
        builder.push_labels(labels.iter().map(String::as_str), count);
    }
    let mut log = builder.build();
    log.add_empty(empty);
    Ok(log)
}

/// Writes the variants dump, most frequent variant first.
pub fn write_variants<W: Write>(log: &EventLog, mut out: W) -> Result<()> {
    writeln!(out, "empty={}", log.empty_count())?;
    let mut rows: Vec<(u64, String)> = log
        .variants()
        .map(|(t, c)| {
            let labels: Vec<String> = t.iter().map(|&a| escape(log.label(a))).collect();
            (c, labels.join(","))
        })
        .collect();
    rows.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
    for (count, labels) in rows {
        writeln!(out, "{count}\t{labels}")?;
    }
    Ok(())
}
