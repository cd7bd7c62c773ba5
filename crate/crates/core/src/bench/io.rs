//! CSV traces, calibration records, sweep tables and JSON configs.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sweep::{SweepEntry, SweepResult, SweepSpec, SweepSummary};
use crate::geometry::RangeTriple;
use crate::sensing::CalibrationRecord;
use crate::sim::{ScenarioConfig, ScenarioTrace};
use crate::{Error, Result, Vec2};

/// One row of a trace CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub t: f64,
    pub r_x: f64,
    pub r_y: f64,
    pub rhat_x: f64,
    pub rhat_y: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub rmeas_x: f64,
    pub rmeas_y: f64,
    pub v0x_cmd: f64,
    pub v0y_cmd: f64,
    pub err: f64,
}

impl TraceRow {
    pub fn ranges(&self) -> RangeTriple {
        RangeTriple::new([self.d1, self.d2, self.d3], self.k)
    }

    pub fn v0_cmd(&self) -> Vec2 {
        Vec2::new(self.v0x_cmd, self.v0y_cmd)
    }

    pub fn r_true(&self) -> Vec2 {
        Vec2::new(self.r_x, self.r_y)
    }
}

pub fn trace_rows(trace: &ScenarioTrace) -> Vec<TraceRow> {
    trace
        .steps
        .iter()
        .map(|s| TraceRow {
            k: s.k,
            t: s.t,
            r_x: s.r_true.x,
            r_y: s.r_true.y,
            rhat_x: s.r_hat.x,
            rhat_y: s.r_hat.y,
            d1: s.ranges.d[0],
            d2: s.ranges.d[1],
            d3: s.ranges.d[2],
            rmeas_x: s.r_meas.x,
            rmeas_y: s.r_meas.y,
            v0x_cmd: s.v0_cmd.x,
            v0y_cmd: s.v0_cmd.y,
            err: s.err,
        })
        .collect()
}

pub fn write_trace_to<W: Write>(rows: &[TraceRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(trace: &ScenarioTrace, path: impl AsRef<Path>) -> Result<()> {
    write_trace_to(&trace_rows(trace), fs::File::create(path)?)
}

pub fn read_trace_from<R: Read>(reader: R) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let rows = r.deserialize().collect::<std::result::Result<Vec<TraceRow>, _>>()?;
    Ok(rows)
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    read_trace_from(fs::File::open(path)?)
}

pub fn read_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    ScenarioConfig::from_json(&fs::read_to_string(path)?)
}

pub fn read_sweep_spec(path: impl AsRef<Path>) -> Result<SweepSpec> {
    SweepSpec::from_json(&fs::read_to_string(path)?)
}

#[derive(Debug, Deserialize)]
struct CalibrationRow {
    anchor_id: usize,
    measured_m: f64,
    truth_m: f64,
}

/// Reads `anchor_id,measured_m,truth_m` rows; anchor ids are 1, 2 or 3.
pub fn read_calibration_from<R: Read>(reader: R) -> Result<CalibrationRecord> {
    let mut rec = CalibrationRecord::default();
    let mut r = csv::Reader::from_reader(reader);
    for row in r.deserialize() {
        let row: CalibrationRow = row?;
        if !(1..=3).contains(&row.anchor_id) {
            return Err(Error::InvalidInput(format!(
                "anchor_id must be 1, 2 or 3, got {}",
                row.anchor_id
            )));
        }
        rec.push(row.anchor_id - 1, row.measured_m, row.truth_m)?;
    }
    Ok(rec)
}

pub fn read_calibration(path: impl AsRef<Path>) -> Result<CalibrationRecord> {
    read_calibration_from(fs::File::open(path)?)
}

/// Raw sweep table: `value,seed,rmse`.
pub fn write_sweep_entries_to<W: Write>(result: &SweepResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for e in &result.entries {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_entries_from<R: Read>(reader: R) -> Result<Vec<SweepEntry>> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<std::result::Result<Vec<SweepEntry>, _>>()?)
}

/// Aggregated sweep table: `value,runs,mean_rmse,std_rmse`.
pub fn write_sweep_summary_to<W: Write>(summary: &[SweepSummary], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in summary {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{presets, run_scenario};

    #[test]
    fn trace_round_trip() {
        let mut cfg = presets::case1();
        cfg.n_steps = 25;
        let trace = run_scenario(&cfg).unwrap();
        let rows = trace_rows(&trace);
        let mut buf = Vec::new();
        write_trace_to(&rows, &mut buf).unwrap();
        let header = String::from_utf8(buf.clone()).unwrap();
        assert!(header.starts_with(
            "k,t,r_x,r_y,rhat_x,rhat_y,d1,d2,d3,rmeas_x,rmeas_y,v0x_cmd,v0y_cmd,err\n"
        ));
        let back = read_trace_from(buf.as_slice()).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            let fa = [a.t, a.r_x, a.r_y, a.rhat_x, a.rhat_y, a.d1, a.d2, a.d3, a.rmeas_x, a.rmeas_y, a.v0x_cmd, a.v0y_cmd, a.err];
            let fb = [b.t, b.r_x, b.r_y, b.rhat_x, b.rhat_y, b.d1, b.d2, b.d3, b.rmeas_x, b.rmeas_y, b.v0x_cmd, b.v0y_cmd, b.err];
            assert_eq!(a.k, b.k);
            for (x, y) in fa.iter().zip(fb) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn calibration_csv() {
        let text = "anchor_id,measured_m,truth_m\n1,2.3,2.0\n1,2.3,2.0\n2,1.1,1.0\n2,1.1,1.0\n3,0.5,0.5\n3,0.5,0.5\n";
        let rec = read_calibration_from(text.as_bytes()).unwrap();
        assert_eq!(rec.pairs[0], vec![(2.3, 2.0); 2]);
        assert_eq!(rec.pairs[2].len(), 2);
        assert!(read_calibration_from("anchor_id,measured_m,truth_m\n4,1,1\n".as_bytes()).is_err());
        assert!(read_calibration_from("anchor_id,measured_m\n1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn sweep_aggregates_recomputable_from_raw_table() {
        let entries = vec![
            SweepEntry { value: "0.1".into(), seed: 1, rmse: 0.7 },
            SweepEntry { value: "0.1".into(), seed: 2, rmse: 0.9 },
            SweepEntry { value: "1".into(), seed: 1, rmse: 0.31 },
            SweepEntry { value: "1".into(), seed: 2, rmse: 0.29 },
            SweepEntry { value: "1".into(), seed: 3, rmse: 0.4 },
        ];
        let res = SweepResult::from_entries("sigma_obs", entries);
        let mut buf = Vec::new();
        write_sweep_entries_to(&res, &mut buf).unwrap();
        let again = SweepResult::from_entries("sigma_obs", read_sweep_entries_from(buf.as_slice()).unwrap());
        for (a, b) in res.summary.iter().zip(&again.summary) {
            assert_eq!(a.value, b.value);
            assert!((a.mean_rmse - b.mean_rmse).abs() < 1e-9);
            assert!((a.std_rmse - b.std_rmse).abs() < 1e-9);
        }
    }
}
