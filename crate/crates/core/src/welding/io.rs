//! CSV form of a [`MonotoneMap`]: rows `breakpoint,value,run,rise`, where
//! `run` and `rise` are the exact width and image length of the segment
//! starting at that breakpoint (empty on the last row). Files with only the
//! first two columns are also accepted; segments are then recomputed from
//! consecutive points.

use std::io::{Read, Write};

use super::MonotoneMap;
use crate::error::{Error, Result};

pub fn write_csv<W: Write>(map: &MonotoneMap, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["breakpoint", "value", "run", "rise"])?;
    let n = map.breakpoints().len();
    for i in 0..n {
        let run = map.runs().get(i).map(|r| r.to_string()).unwrap_or_default();
        let rise = map.rises().get(i).map(|r| r.to_string()).unwrap_or_default();
        w.write_record([
            map.breakpoints()[i].to_string(),
            map.values()[i].to_string(),
            run,
            rise,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::invalid("csv", format!("not a number: {field:?}")))
}

pub fn read_csv<R: Read>(input: R) -> Result<MonotoneMap> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    let mut runs = Vec::new();
    let mut rises = Vec::new();
    for record in r.records() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::invalid("csv", "need at least breakpoint and value columns"));
        }
        breakpoints.push(parse(&record[0])?);
        values.push(parse(&record[1])?);
        let extra = |k: usize| record.get(k).filter(|s| !s.trim().is_empty());
        if let (Some(run), Some(rise)) = (extra(2), extra(3)) {
            runs.push(parse(run)?);
            rises.push(parse(rise)?);
        }
    }
    if rises.is_empty() {
        return MonotoneMap::from_points(breakpoints, values);
    }
    if rises.len() + 1 != breakpoints.len() {
        return Err(Error::invalid("csv", "run/rise columns incomplete"));
    }
    // validates the segments; the stored points are kept as written
    let map = MonotoneMap::from_increments(runs, rises)?;
    let monotone = |v: &[f64]| v.first() == Some(&0.0) && v.last() == Some(&1.0) && v.windows(2).all(|w| w[0] <= w[1]);
    if !monotone(&breakpoints) || !monotone(&values) {
        return Err(Error::DegenerateMap("stored points are not monotone from 0 to 1".into()));
    }
    Ok(MonotoneMap {
        breakpoints,
        values,
        runs: map.runs,
        rises: map.rises,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{DyadicMeasure, Provenance};
    use crate::welding::cdf;

    #[test]
    fn lossless_round_trip() {
        let masses: Vec<f64> = (0..32).map(|j| 1.0 / (1.0 + j as f64).powf(1.7)).collect();
        let mu = DyadicMeasure::from_masses(masses, Provenance::Synthetic { tag: "c".into() }).unwrap();
        let m = cdf(&mu).unwrap();
        let mut buf = Vec::new();
        write_csv(&m, &mut buf).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap(), m);
        let inv = m.invert();
        let mut buf = Vec::new();
        write_csv(&inv, &mut buf).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap(), inv);
    }

    #[test]
    fn two_column_input() {
        let text = "breakpoint,value\n0,0\n0.5,0.75\n1,1\n";
        let m = read_csv(text.as_bytes()).unwrap();
        assert_eq!(m.eval(0.5), 0.75);
        assert!(read_csv("breakpoint,value\n0,0\n0.5,0\n1,1\n".as_bytes()).is_err());
    }
}
