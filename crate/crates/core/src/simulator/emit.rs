use std::io::Write;

use super::mobility::Phase;
use super::trace::Trace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Ns2,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ns2" => Ok(Format::Ns2),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidArgument(format!("unknown trace format {other:?}, expected ns2 or csv"))),
        }
    }
}

struct Counting<W> {
    inner: W,
    bytes: u64,
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Writes the trace and returns the number of bytes written.
pub fn emit<W: Write>(trace: &Trace, format: Format, sink: W) -> Result<u64> {
    if trace.is_empty() {
        return Err(Error::InvalidArgument("cannot emit an empty trace".into()));
    }
    let mut out = Counting { inner: std::io::BufWriter::new(sink), bytes: 0 };
    match format {
        Format::Ns2 => write_ns2(trace, &mut out)?,
        Format::Csv => write_csv(trace, &mut out)?,
    }
    out.flush()?;
    Ok(out.bytes)
}

/// `t,node,x,y,on` rows ordered by time, then node. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_csv<W: Write>(trace: &Trace, out: &mut W) -> Result<()> {
    writeln!(out, "t,node,x,y,on")?;
    for k in 0..trace.len() {
        for n in &trace.nodes {
            let s = &n.samples[k];
            writeln!(out, "{},{},{},{},{}", s.t, n.id, s.x, s.y, u8::from(s.on))?;
        }
    }
    Ok(())
}

/// ns-2 movement script: initial positions, a `setdest` for every moving
/// segment, and a position reset wherever a torus wrap teleports the node.
pub fn write_ns2<W: Write>(trace: &Trace, out: &mut W) -> Result<()> {
    for (i, n) in trace.nodes.iter().enumerate() {
        let p = n.samples[0];
        writeln!(out, "$node_({i}) set X_ {:.2}", p.x)?;
        writeln!(out, "$node_({i}) set Y_ {:.2}", p.y)?;
        writeln!(out, "$node_({i}) set Z_ 0.00")?;
    }
    let mut events: Vec<(f64, usize, usize, String)> = Vec::new();
    for (i, n) in trace.nodes.iter().enumerate() {
        let mut prev_end: Option<crate::geometry::Point> = None;
        for s in &n.segments {
            if s.t0 >= trace.meta.duration {
                break;
            }
            let seq = events.len();
            if let Some(end) = prev_end {
                if end.distance(s.start) > 1e-6 && s.t0 > 0.0 {
                    events.push((s.t0, i, seq, format!("$ns_ at {:.2} \"$node_({i}) set X_ {:.2}\"", s.t0, s.start.x)));
                    events.push((s.t0, i, seq + 1, format!("$ns_ at {:.2} \"$node_({i}) set Y_ {:.2}\"", s.t0, s.start.y)));
                }
            }
            if s.phase != Phase::Paused {
                let e = s.end();
                events.push((
                    s.t0,
                    i,
                    events.len(),
                    format!("$ns_ at {:.2} \"$node_({i}) setdest {:.2} {:.2} {:.2}\"", s.t0, e.x, e.y, s.speed()),
                ));
            }
            prev_end = Some(s.end());
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (_, _, _, line) in events {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// JSON sidecar with the seed, duration, sample interval and profile digest.
pub fn write_metadata<W: Write>(trace: &Trace, out: &mut W) -> Result<()> {
    let text = serde_json::to_string_pretty(&trace.meta).expect("metadata serialises");
    writeln!(out, "{text}")?;
    Ok(())
}
