//! Minimal XES reader: `<trace>` elements holding `<event>` elements whose
//! direct `<string key="concept:name" value=".."/>` child names the activity.
//! Everything else is ignored.

use std::io::BufRead;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{EventLog, LogBuilder};
use crate::error::{Error, Result};

const NAME_KEY: &[u8] = b"concept:name";

struct OpenEvent {
    depth: usize,
    name: Option<String>,
}

fn concept_name(e: &BytesStart<'_>, offset: u64) -> Result<Option<String>> {
    let mut key_matches = false;
    let mut value = None;
    for attr in e.attributes() {
        let attr = attr.map_err(|err| Error::Xml {
            offset,
            message: err.to_string(),
        })?;
        match attr.key.as_ref() {
            b"key" => key_matches = attr.value.as_ref() == NAME_KEY,
            b"value" => {
                value = Some(
                    attr.unescape_value()
                        .map_err(|err| Error::Xml {
                            offset,
                            message: err.to_string(),
                        })?
                        .into_owned(),
                )
            }
            _ => {}
        }
    }
    Ok(if key_matches { value } else { None })
}

/// Reads an XES-lite document. Events lacking a `concept:name` string are
/// skipped and counted in [`EventLog::skipped_events`].
pub fn parse_xes_lite<R: BufRead>(input: R) -> Result<EventLog> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().check_end_names = true;

    let mut builder = LogBuilder::new();
    let mut buf = Vec::new();
    let mut depth = 0usize;
    let mut trace: Option<(usize, Vec<String>)> = None;
    let mut event: Option<OpenEvent> = None;
    let mut skipped = 0u64;

    loop {
        let offset = reader.buffer_position();
        let ev = reader.read_event_into(&mut buf).map_err(|err| Error::Xml {
            offset: reader.error_position(),
            message: err.to_string(),
        })?;
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(ev, Event::Empty(_));
                let name = e.local_name();
                let this_depth = depth;
                match name.as_ref() {
                    b"trace" if trace.is_none() => {
                        if is_empty {
                            builder.push_ids(Vec::new(), 1);
                        } else {
                            trace = Some((this_depth, Vec::new()));
                        }
                    }
                    b"event" if trace.is_some() && event.is_none() => {
                        if is_empty {
                            skipped += 1;
                        } else {
                            event = Some(OpenEvent {
                                depth: this_depth,
                                name: None,
                            });
                        }
                    }
                    b"string" => {
                        if let Some(open) = event.as_mut() {
                            if this_depth == open.depth + 1 && open.name.is_none() {
                                open.name = concept_name(e, offset)?;
                            }
                        }
                    }
                    _ => {}
                }
                if !is_empty {
                    depth += 1;
                }
            }
            Event::End(_) => {
                depth = depth.saturating_sub(1);
                if event.as_ref().is_some_and(|o| o.depth == depth) {
                    let open = event.take().expect("open event");
                    match (open.name, trace.as_mut()) {
                        (Some(name), Some((_, events))) => events.push(name),
                        _ => skipped += 1,
                    }
                } else if trace.as_ref().is_some_and(|(d, _)| *d == depth) {
                    let (_, events) = trace.take().expect("open trace");
                    builder.push_labels(events.iter().map(String::as_str), 1);
                }
            }
            Event::Eof => {
                if depth != 0 {
                    return Err(Error::Xml {
                        offset,
                        message: "unexpected end of document: unclosed elements".into(),
                    });
                }
                break;
            }
            _ => {}
        }
        buf.clear();
    }

    let mut log = builder.build();
    log.set_skipped_events(skipped);
    Ok(log)
}
