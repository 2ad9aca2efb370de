//! Trajectory CSV: `#` metadata lines, header `t,x1,...,xN`, one row per
//! stored state. Opinions are written with 17 significant digits, enough to
//! parse back to the same bits.

use std::io::{self, Write};

use super::Trajectory;
use crate::error::{Error, Result};

pub fn write_trajectory_csv<W: Write>(
    traj: &Trajectory,
    out: &mut W,
    metadata: &[(&str, String)],
) -> io::Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k}: {v}")?;
    }
    write!(out, "t")?;
    for i in 1..=traj.n() {
        write!(out, ",x{i}")?;
    }
    writeln!(out)?;
    for s in traj.states() {
        write!(out, "{}", s.t)?;
        for v in s.x {
            write!(out, ",{v:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Parsed trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub metadata: Vec<(String, String)>,
    pub times: Vec<u64>,
    pub states: Vec<Vec<f64>>,
}

pub fn read_trajectory_csv(text: &str) -> Result<TrajectoryTable> {
    let mut metadata = Vec::new();
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut width = None;
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((key, value)) = meta.split_once(':') {
                metadata.push((key.trim().to_string(), value.trim().to_string()));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let Some(n) = width else {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.first() != Some(&"t") {
                return Err(Error::parse(line_no, "expected header starting with `t`"));
            }
            width = Some(cols.len() - 1);
            continue;
        };
        let mut cells = line.split(',');
        let t = cells
            .next()
            .and_then(|c| c.trim().parse::<u64>().ok())
            .ok_or_else(|| Error::parse(line_no, "invalid time index"))?;
        let row = cells
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(line_no, format!("invalid number `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(Error::parse(
                line_no,
                format!("expected {n} opinions, found {}", row.len()),
            ));
        }
        times.push(t);
        states.push(row);
    }
    if width.is_none() {
        return Err(Error::parse(1, "missing header"));
    }
    Ok(TrajectoryTable {
        metadata,
        times,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, SimulationConfig};
    use crate::graph::WeightMatrix;
    use proptest::prelude::*;

    #[test]
    fn header_and_metadata() {
        let traj = Trajectory::from_states(vec![vec![0.25, 1.0], vec![0.0, 0.1]], 0.5).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf, &[("seed", "7".into())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# seed: 7"));
        assert_eq!(lines.next(), Some("t,x1,x2"));
        assert_eq!(
            lines.next(),
            Some("1,2.5000000000000000e-1,1.0000000000000000e0")
        );
        let table = read_trajectory_csv(&text).unwrap();
        assert_eq!(table.metadata, vec![("seed".to_string(), "7".to_string())]);
        assert_eq!(table.times, vec![1, 2]);
    }

    #[test]
    fn malformed_rows_report_lines() {
        let err = read_trajectory_csv("t,x1\n1,0.5\n2,0.5,0.1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    proptest! {
        #[test]
        fn csv_round_trips_bit_exactly(seed in any::<u64>(), alpha in 0.01f64..0.99) {
            let w = WeightMatrix::new(vec![
                vec![0.2, 0.8, 0.0],
                vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
                vec![0.9, 0.0, 0.1],
            ]).unwrap();
            let cfg = SimulationConfig::new(w, alpha, vec![0.3, 0.6, 0.9], 40, seed).unwrap();
            let traj = simulate(&cfg).unwrap();
            let mut buf = Vec::new();
            write_trajectory_csv(&traj, &mut buf, &[]).unwrap();
            let table = read_trajectory_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
            for (row, s) in table.states.iter().zip(traj.states()) {
                prop_assert_eq!(row.as_slice(), s.x);
            }
        }
    }
}
