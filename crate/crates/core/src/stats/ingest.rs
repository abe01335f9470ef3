use std::collections::HashMap;
use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simulator::{NodeTrack, Sample, Trace, TraceMeta};

/// Reads a `t,node,x,y,on` trace. Nodes keep their order of first
/// appearance; the sample interval is taken from the first node.
pub fn ingest_csv<R: BufRead>(source: R) -> Result<Trace> {
    let mut lines = source.lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(Error::Parse { line: 1, message: "missing header".into() }),
    };
    if header.trim() != "t,node,x,y,on" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header t,node,x,y,on, got {:?}", header.trim()),
        });
    }
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut nodes: Vec<NodeTrack> = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.trim().split(',').collect();
        if parts.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 5 fields, got {}", parts.len()),
            });
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse { line: line_no, message: format!("bad {what} {s:?}") })
        };
        let t = num(parts[0], "time")?;
        let x = num(parts[2], "x")?;
        let y = num(parts[3], "y")?;
        let on = match parts[4] {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(Error::Parse { line: line_no, message: format!("bad on flag {other:?}") }),
        };
        let id = parts[1];
        let k = *index.entry(id.to_owned()).or_insert_with(|| {
            nodes.push(NodeTrack { id: id.to_owned(), ..Default::default() });
            nodes.len() - 1
        });
        let track = &mut nodes[k];
        if let Some(last) = track.samples.last() {
            if !(t > last.t) {
                return Err(Error::NonMonotoneTime { line: line_no, node: id.to_owned() });
            }
        }
        track.samples.push(Sample { t, x, y, on });
    }
    if nodes.is_empty() {
        return Err(Error::Parse { line: 2, message: "no samples".into() });
    }
    let first = &nodes[0].samples;
    let dt = if first.len() > 1 { first[1].t - first[0].t } else { 1.0 };
    let duration = nodes.iter().filter_map(|n| n.samples.last()).map(|s| s.t).fold(0.0, f64::max);
    Ok(Trace {
        meta: TraceMeta {
            seed: None,
            duration,
            dt,
            profile_digest: None,
        },
        nodes,
    })
}

/// An encounter between two nodes over `[start, end)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContactEvent {
    pub a: String,
    pub b: String,
    pub start: f64,
    pub end: f64,
}

impl ContactEvent {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Reads an external encounter log with header `a,b,start_s,end_s`.
pub fn ingest_contacts_csv<R: BufRead>(source: R) -> Result<Vec<ContactEvent>> {
    let mut lines = source.lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(Error::Parse { line: 1, message: "missing header".into() }),
    };
    if header.trim() != "a,b,start_s,end_s" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header a,b,start_s,end_s, got {:?}", header.trim()),
        });
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.trim().split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse { line: line_no, message: format!("expected 4 fields, got {}", parts.len()) });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse { line: line_no, message: format!("bad time {s:?}") })
        };
        let (start, end) = (num(parts[2])?, num(parts[3])?);
        if !(end > start) {
            return Err(Error::Parse { line: line_no, message: format!("contact ends at {end}, not after its start {start}") });
        }
        out.push(ContactEvent { a: parts[0].into(), b: parts[1].into(), start, end });
    }
    Ok(out)
}
