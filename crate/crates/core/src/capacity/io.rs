use std::io::Write;

use crate::chaos::DyadicMeasure;
use crate::error::Result;

/// One row per cell: `index,mass`.
pub fn write_density_csv<W: Write>(measure: &DyadicMeasure, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "mass"])?;
    for (i, m) in measure.masses().iter().enumerate() {
        w.write_record([i.to_string(), format!("{m:e}")])?;
    }
    w.flush()?;
    Ok(())
}
