//! Binary dump of a [`FieldSample`]: five little-endian 64-bit header words
//! `(n, m, seed, method, clip_magnitude)` followed by 2^n little-endian `f64`
//! values. `method` is 0 for dense factorisation and 1 for circulant embedding.

use std::io::{Read, Write};

use super::{DyadicGrid, FieldSample, SamplingMethod, ScaleParameter};
use crate::error::{Error, Result};

pub fn write_binary<W: Write>(sample: &FieldSample, mut out: W) -> Result<()> {
    out.write_all(&u64::from(sample.grid.resolution()).to_le_bytes())?;
    out.write_all(&u64::from(sample.epsilon.exponent()).to_le_bytes())?;
    out.write_all(&sample.seed.to_le_bytes())?;
    out.write_all(&sample.method.code().to_le_bytes())?;
    out.write_all(&sample.clip_magnitude.to_le_bytes())?;
    for v in &sample.values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn word<R: Read>(input: &mut R) -> Result<[u8; 8]> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    Ok(buf)
}

/// Reads a dump written by [`write_binary`]. The jitter is not part of the format and reads as 0.
pub fn read_binary<R: Read>(mut input: R) -> Result<FieldSample> {
    let n = u64::from_le_bytes(word(&mut input)?);
    let m = u64::from_le_bytes(word(&mut input)?);
    let seed = u64::from_le_bytes(word(&mut input)?);
    let code = u64::from_le_bytes(word(&mut input)?);
    let clip_magnitude = f64::from_le_bytes(word(&mut input)?);
    let grid = DyadicGrid::new(u32::try_from(n).map_err(|_| Error::invalid("resolution", "header overflow"))?)?;
    let epsilon = ScaleParameter::from_exponent(
        u32::try_from(m).map_err(|_| Error::invalid("epsilon", "header overflow"))?,
    )?;
    let method = SamplingMethod::from_code(code)
        .ok_or_else(|| Error::invalid("method", format!("unknown method code {code}")))?;
    let values = (0..grid.len())
        .map(|_| word(&mut input).map(f64::from_le_bytes))
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldSample {
        grid,
        epsilon,
        values,
        seed,
        method,
        clip_magnitude,
        jitter: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logfield::sample_field;

    #[test]
    fn binary_layout_and_round_trip() {
        let g = DyadicGrid::new(5).unwrap();
        let e = ScaleParameter::from_exponent(5).unwrap();
        let s = sample_field(g, e, 1234, SamplingMethod::CirculantEmbedding).unwrap();
        let mut buf = Vec::new();
        write_binary(&s, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 * (5 + 32));
        assert_eq!(&buf[0..8], &5u64.to_le_bytes());
        assert_eq!(&buf[16..24], &1234u64.to_le_bytes());
        assert_eq!(&buf[24..32], &1u64.to_le_bytes());
        let back = read_binary(&buf[..]).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn truncated_input_fails() {
        let g = DyadicGrid::new(3).unwrap();
        let e = ScaleParameter::from_exponent(3).unwrap();
        let s = sample_field(g, e, 1, SamplingMethod::DenseFactorization).unwrap();
        let mut buf = Vec::new();
        write_binary(&s, &mut buf).unwrap();
        assert!(read_binary(&buf[..buf.len() - 1]).is_err());
    }
}
