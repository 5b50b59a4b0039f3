use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

use super::LobEvent;

/// Share of malformed data lines above which parsing aborts.
pub const MAX_MALFORMED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct Malformed {
    /// 1-based line number in the file, counting the header.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedLog {
    pub records: Vec<LobEvent>,
    pub malformed: Vec<Malformed>,
}

pub fn parse_events(path: impl AsRef<Path>) -> Result<ParsedLog> {
    let file = std::fs::File::open(path.as_ref())?;
    parse_events_from_reader(std::io::BufReader::new(file))
}

/// Parses `timestamp,side,event,level,size` rows; `#` lines are comments.
pub fn parse_events_from_reader<R: Read>(reader: R) -> Result<ParsedLog> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["timestamp", "side", "event", "level", "size"];
    if !headers.is_empty() && headers.iter().ne(expected.iter().copied()) {
        return Err(Error::InvalidInput(format!(
            "expected header {}, found {}",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = ParsedLog::default();
    let mut total = 0usize;
    let mut last_time = f64::NEG_INFINITY;
    let mut row = csv::StringRecord::new();
    loop {
        let line = rdr.position().line() + 1;
        let more = match rdr.read_record(&mut row) {
            Ok(more) => more,
            Err(e) => {
                total += 1;
                out.malformed.push(Malformed {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if !more {
            break;
        }
        total += 1;
        let line = row.position().map(|p| p.line()).unwrap_or(line);
        match row.deserialize::<LobEvent>(Some(&headers)) {
            Ok(ev) if !(ev.timestamp.is_finite() && ev.timestamp >= 0.0) => out.malformed.push(Malformed {
                line,
                reason: format!("invalid timestamp {}", ev.timestamp),
            }),
            Ok(ev) if ev.timestamp < last_time => out.malformed.push(Malformed {
                line,
                reason: format!("timestamp {} precedes {last_time}", ev.timestamp),
            }),
            Ok(ev) if ev.size == 0 => out.malformed.push(Malformed {
                line,
                reason: "size must be at least 1".into(),
            }),
            Ok(ev) if ev.level == 0 => out.malformed.push(Malformed {
                line,
                reason: "level must be at least 1".into(),
            }),
            Ok(ev) => {
                last_time = ev.timestamp;
                out.records.push(ev);
            }
            Err(e) => out.malformed.push(Malformed {
                line,
                reason: e.to_string(),
            }),
        }
    }
    let bad = out.malformed.len();
    if bad as f64 > MAX_MALFORMED_FRACTION * total as f64 {
        let first = &out.malformed[0];
        return Err(Error::TooManyMalformed {
            malformed: bad,
            total,
            first_line: first.line as usize,
            first_reason: first.reason.clone(),
        });
    }
    Ok(out)
}

pub fn write_events(path: impl AsRef<Path>, events: &[LobEvent]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    for ev in events {
        w.serialize(ev)?;
    }
    w.flush()?;
    Ok(())
}
