use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::trace::RunTrace;

pub const DEFAULT_SNAPSHOTS: [usize; 4] = [50, 100, 150, 190];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuartileRow {
    pub count: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub count: usize,
    /// Best-so-far of every trace at `count`, ascending.
    pub values: Vec<f64>,
}

impl Snapshot {
    pub fn quartiles(&self) -> QuartileRow {
        QuartileRow {
            count: self.count,
            q1: quantile_linear(&self.values, 0.25),
            median: quantile_linear(&self.values, 0.5),
            q3: quantile_linear(&self.values, 0.75),
        }
    }
}

/// Quantile of an ascending, non-empty sample, interpolating linearly between
/// order statistics at position `p·(len − 1)`.
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sample_at(traces: &[RunTrace], count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidInput("screen counts start at 1".into()));
    }
    let mut values = traces
        .iter()
        .enumerate()
        .map(|(i, t)| {
            t.best_at(count)
                .ok_or_else(|| Error::InvalidInput(format!("trace {i} has no screens")))
        })
        .collect::<Result<Vec<_>>>()?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Best-so-far distribution of every trace at each count in `at`.
pub fn snapshots(traces: &[RunTrace], at: &[usize]) -> Result<Vec<Snapshot>> {
    if traces.is_empty() {
        return Err(Error::InvalidInput("no traces".into()));
    }
    at.iter()
        .map(|&count| {
            Ok(Snapshot {
                count,
                values: sample_at(traces, count)?,
            })
        })
        .collect()
}

/// First quartile, median and third quartile of best-so-far at each count in `grid`.
pub fn quartile_curves(traces: &[RunTrace], grid: &[usize]) -> Result<Vec<QuartileRow>> {
    Ok(snapshots(traces, grid)?.iter().map(Snapshot::quartiles).collect())
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn write_curves_csv(rows: &[QuartileRow], path: impl AsRef<Path>) -> Result<()> {
    let mut body = String::from("count,q1,median,q3\n");
    for r in rows {
        body.push_str(&format!("{},{},{},{}\n", r.count, r.q1, r.median, r.q3));
    }
    write_file(path.as_ref(), &body)
}

pub fn write_snapshots_csv(snaps: &[Snapshot], path: impl AsRef<Path>) -> Result<()> {
    let mut body = String::from("count,value\n");
    for s in snaps {
        for v in &s.values {
            body.push_str(&format!("{},{}\n", s.count, v));
        }
    }
    write_file(path.as_ref(), &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{TraceHeader, TraceRecord};

    fn trace(bests: &[f64]) -> RunTrace {
        let mut t = RunTrace::new(TraceHeader::new("test", 0, serde_json::json!({})));
        for (i, &b) in bests.iter().enumerate() {
            t.records.push(TraceRecord {
                step: i + 1,
                variant: format!("V{i}"),
                fitness: b,
                best: b,
                theta: None,
            });
        }
        t
    }

    #[test]
    fn four_traces_hand_quartiles() {
        let traces: Vec<_> = [4.0, 1.0, 3.0, 2.0].iter().map(|&b| trace(&[b])).collect();
        let rows = quartile_curves(&traces, &[1]).unwrap();
        assert_eq!(
            rows[0],
            QuartileRow { count: 1, q1: 1.75, median: 2.5, q3: 3.25 }
        );
    }

    #[test]
    fn identical_traces_collapse() {
        let traces = vec![trace(&[1.0, 2.0]); 5];
        for r in quartile_curves(&traces, &[1, 2, 10]).unwrap() {
            assert_eq!(r.q1, r.median);
            assert_eq!(r.median, r.q3);
        }
    }

    #[test]
    fn short_traces_extend_with_final_best() {
        let traces = vec![trace(&[1.0]), trace(&[0.0, 0.0, 5.0])];
        let s = snapshots(&traces, &[3]).unwrap();
        assert_eq!(s[0].values, vec![1.0, 5.0]);
    }

    #[test]
    fn errors() {
        assert!(quartile_curves(&[], &[1]).is_err());
        assert!(snapshots(&[trace(&[])], &[1]).is_err());
        assert!(snapshots(&[trace(&[1.0])], &[0]).is_err());
    }

    #[test]
    fn quantile_endpoints() {
        let s = [1.0, 2.0, 10.0];
        assert_eq!(quantile_linear(&s, 0.0), 1.0);
        assert_eq!(quantile_linear(&s, 1.0), 10.0);
        assert_eq!(quantile_linear(&s, 0.75), 6.0);
        assert_eq!(quantile_linear(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let traces = vec![trace(&[1.0, 3.0]), trace(&[2.0])];
        let curves = quartile_curves(&traces, &[1, 2]).unwrap();
        let p = dir.path().join("c.csv");
        write_curves_csv(&curves, &p).unwrap();
        assert_eq!(
            fs::read_to_string(&p).unwrap(),
            "count,q1,median,q3\n1,1.25,1.5,1.75\n2,2.25,2.5,2.75\n"
        );
        let snaps = snapshots(&traces, &[2]).unwrap();
        write_snapshots_csv(&snaps, &p).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "count,value\n2,2\n2,3\n");
    }
}
