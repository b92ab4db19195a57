use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{DyadicMeasure, Normalization, Provenance};
use crate::error::Result;

/// JSON sidecar describing a dumped measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureMetadata {
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub epsilon_exponent: Option<u32>,
    pub resolution: u32,
    pub seed: Option<u64>,
    pub normalization: Option<Normalization>,
    pub tag: Option<String>,
}

impl MeasureMetadata {
    pub fn of(measure: &DyadicMeasure) -> Self {
        match measure.provenance() {
            Provenance::Gmc { seed, params } => Self {
                gamma: Some(params.gamma),
                epsilon: Some(params.epsilon.epsilon()),
                epsilon_exponent: Some(params.epsilon.exponent()),
                resolution: measure.resolution(),
                seed: Some(*seed),
                normalization: Some(params.normalization),
                tag: None,
            },
            Provenance::Synthetic { tag } => Self {
                gamma: None,
                epsilon: None,
                epsilon_exponent: None,
                resolution: measure.resolution(),
                seed: None,
                normalization: None,
                tag: Some(tag.clone()),
            },
        }
    }
}

/// One row per cell: `index,left_endpoint,mass`.
pub fn write_csv<W: Write>(measure: &DyadicMeasure, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "left_endpoint", "mass"])?;
    let h = measure.cell_length();
    for (j, m) in measure.masses().iter().enumerate() {
        w.write_record([j.to_string(), (j as f64 * h).to_string(), m.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows() {
        let mu = DyadicMeasure::lebesgue(2).unwrap();
        let mut buf = Vec::new();
        write_csv(&mu, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,left_endpoint,mass");
        assert_eq!(lines[2], "1,0.25,0.25");
        assert_eq!(lines.len(), 5);
        let meta = MeasureMetadata::of(&mu);
        assert_eq!(meta.tag.as_deref(), Some("lebesgue"));
        assert_eq!(meta.resolution, 2);
    }
}
