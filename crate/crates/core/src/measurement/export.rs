//! Binary and CSV dumps of assembled ensembles.
//!
//! Binary layout (all integers and floats little-endian):
//!
//! ```text
//! magic      8 bytes  "GRADCSE1"
//! complex    u8       0 = real, 1 = complex
//! mode       u8       0 unaugmented, 1 full, 2 fractional, 3 independent
//! fraction   f64      gradient fraction (0 unless fractional)
//! rows       u64
//! cols       u64
//! dim        u64
//! seed       u64
//! m_o, m_g   u64, u64
//! matrix     rows*cols scalars, column-major
//! rhs        rows scalars
//! q          cols f64
//! ```
//!
//! A complex scalar is stored as its real part followed by its imaginary part.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{MeasurementEnsemble, SamplingMode};

const MAGIC: &[u8; 8] = b"GRADCSE1";

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleHeader {
    pub complex: bool,
    pub mode: SamplingMode,
    pub rows: usize,
    pub cols: usize,
    pub dim: usize,
    pub seed: u64,
    pub function_samples: usize,
    pub gradient_samples: usize,
}

fn mode_tag(mode: SamplingMode) -> (u8, f64) {
    match mode {
        SamplingMode::Unaugmented => (0, 0.0),
        SamplingMode::FullGradient => (1, 0.0),
        SamplingMode::FractionalGradient(p) => (2, p),
        SamplingMode::IndependentGradient => (3, 0.0),
    }
}

fn put_scalar<T: Scalar>(out: &mut Vec<u8>, v: T) {
    let z = v.to_complex();
    out.extend_from_slice(&z.re.to_le_bytes());
    if T::IS_COMPLEX {
        out.extend_from_slice(&z.im.to_le_bytes());
    }
}

pub fn write_binary<T: Scalar>(ens: &MeasurementEnsemble<T>, mut w: impl Write) -> Result<()> {
    let (tag, p) = mode_tag(ens.mode);
    let mut buf = Vec::with_capacity(64 + 8 * ens.matrix.len() * if T::IS_COMPLEX { 2 } else { 1 });
    buf.extend_from_slice(MAGIC);
    buf.push(T::IS_COMPLEX as u8);
    buf.push(tag);
    buf.extend_from_slice(&p.to_le_bytes());
    for v in [ens.matrix.nrows(), ens.matrix.ncols(), ens.index_set.dim()] {
        buf.extend_from_slice(&(v as u64).to_le_bytes());
    }
    buf.extend_from_slice(&ens.seed.to_le_bytes());
    buf.extend_from_slice(&(ens.function_samples as u64).to_le_bytes());
    buf.extend_from_slice(&(ens.gradient_samples as u64).to_le_bytes());
    // nalgebra storage is column-major already
    for &v in ens.matrix.iter() {
        put_scalar(&mut buf, v);
    }
    for &v in ens.rhs.iter() {
        put_scalar(&mut buf, v);
    }
    for q in &ens.q {
        buf.extend_from_slice(&q.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self
            .at
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(Error::Parse {
                line: 0,
                msg: format!("truncated ensemble file at byte {}", self.at),
            })?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn scalar<T: Scalar>(&mut self, complex: bool) -> Result<T> {
        let re = self.f64()?;
        let im = if complex { self.f64()? } else { 0.0 };
        Ok(T::from_complex(Complex64::new(re, im)))
    }
}

/// Ensemble contents read back from [`write_binary`] output.
pub type EnsembleDump<T> = (EnsembleHeader, DMatrix<T>, DVector<T>, Vec<f64>);

pub fn read_binary<T: Scalar>(mut r: impl Read) -> Result<EnsembleDump<T>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let bad = |msg: &str| Error::Parse {
        line: 0,
        msg: msg.to_string(),
    };
    let mut c = Cursor {
        bytes: &bytes,
        at: 0,
    };
    if c.take(8)? != MAGIC {
        return Err(bad("not an ensemble file"));
    }
    let complex = c.u8()? == 1;
    if complex != T::IS_COMPLEX {
        return Err(bad("scalar kind does not match the requested type"));
    }
    let tag = c.u8()?;
    let p = c.f64()?;
    let mode = match tag {
        0 => SamplingMode::Unaugmented,
        1 => SamplingMode::FullGradient,
        2 => SamplingMode::FractionalGradient(p),
        3 => SamplingMode::IndependentGradient,
        _ => return Err(bad("unknown sampling mode tag")),
    };
    let rows = c.u64()? as usize;
    let cols = c.u64()? as usize;
    let dim = c.u64()? as usize;
    let seed = c.u64()?;
    let function_samples = c.u64()? as usize;
    let gradient_samples = c.u64()? as usize;
    let width = if complex { 16 } else { 8 };
    let expected = rows
        .checked_mul(cols)
        .and_then(|e| e.checked_add(rows))
        .and_then(|e| e.checked_mul(width))
        .and_then(|e| e.checked_add(8 * cols))
        .ok_or_else(|| bad("dimensions overflow"))?;
    if bytes.len() - c.at != expected {
        return Err(bad("payload size does not match the header"));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(c.scalar::<T>(complex)?);
    }
    let matrix = DMatrix::from_vec(rows, cols, data);
    let mut rhs = Vec::with_capacity(rows);
    for _ in 0..rows {
        rhs.push(c.scalar::<T>(complex)?);
    }
    let mut q = Vec::with_capacity(cols);
    for _ in 0..cols {
        q.push(c.f64()?);
    }
    Ok((
        EnsembleHeader {
            complex,
            mode,
            rows,
            cols,
            dim,
            seed,
            function_samples,
            gradient_samples,
        },
        matrix,
        DVector::from_vec(rhs),
        q,
    ))
}

fn fmt_scalar<T: Scalar>(v: T) -> String {
    let z = v.to_complex();
    if T::IS_COMPLEX {
        format!("{:.16e}{:+.16e}i", z.re, z.im)
    } else {
        format!("{:.16e}", z.re)
    }
}

/// One line per row: block, point, the row of `A`, then the right-hand side.
pub fn write_csv<T: Scalar>(ens: &MeasurementEnsemble<T>, mut w: impl Write) -> Result<()> {
    let mut header = vec!["block".to_string(), "point".to_string()];
    for n in &ens.index_set {
        let parts: Vec<String> = n.entries().iter().map(i32::to_string).collect();
        header.push(format!("n_{}", parts.join("_")));
    }
    header.push("rhs".into());
    writeln!(w, "{}", header.join(","))?;
    for block in &ens.blocks {
        for p in 0..block.len {
            let row = block.start + p;
            let mut cells = vec![block.k.to_string(), p.to_string()];
            cells.extend((0..ens.matrix.ncols()).map(|j| fmt_scalar(ens.matrix[(row, j)])));
            cells.push(fmt_scalar(ens.rhs[row]));
            writeln!(w, "{}", cells.join(","))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis1d::{BasisFamily, Density};
    use crate::index_sets::{hyperbolic_cross, hyperbolic_cross_signed};
    use crate::measurement::{assemble_matrix, sample_points, AssemblyOptions};

    #[test]
    fn binary_round_trip_real() {
        let set = hyperbolic_cross(2, 3).unwrap();
        let pts = sample_points(
            &BasisFamily::LEGENDRE,
            &Density::MatchOrthogonality,
            2,
            7,
            4,
        )
        .unwrap();
        let ens = assemble_matrix::<f64>(
            &set,
            &pts,
            SamplingMode::FractionalGradient(0.5),
            &AssemblyOptions::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_binary(&ens, &mut buf).unwrap();
        let (h, a, b, q) = read_binary::<f64>(&buf[..]).unwrap();
        assert_eq!(h.mode, SamplingMode::FractionalGradient(0.5));
        assert_eq!((h.rows, h.cols, h.dim, h.seed), (7 + 8, 8, 2, 4));
        assert_eq!((h.function_samples, h.gradient_samples), (7, 4));
        assert_eq!(a, ens.matrix);
        assert_eq!(b, ens.rhs);
        assert_eq!(q, ens.q);
        assert!(read_binary::<Complex64>(&buf[..]).is_err());
        assert!(read_binary::<f64>(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn binary_round_trip_complex() {
        let set = hyperbolic_cross_signed(1, 3).unwrap();
        let pts = sample_points(&BasisFamily::Fourier, &Density::Uniform, 1, 5, 2).unwrap();
        let ens = assemble_matrix::<Complex64>(
            &set,
            &pts,
            SamplingMode::FullGradient,
            &AssemblyOptions::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_binary(&ens, &mut buf).unwrap();
        let (_, a, _, _) = read_binary::<Complex64>(&buf[..]).unwrap();
        assert_eq!(a, ens.matrix);
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let set = hyperbolic_cross(2, 2).unwrap();
        let pts = sample_points(
            &BasisFamily::CHEBYSHEV,
            &Density::MatchOrthogonality,
            2,
            3,
            4,
        )
        .unwrap();
        let ens = assemble_matrix::<f64>(
            &set,
            &pts,
            SamplingMode::FullGradient,
            &AssemblyOptions::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&ens, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 9);
        assert_eq!(lines[0], "block,point,n_0_0,n_1_0,n_0_1,n_2_0,n_0_2,rhs");
        assert!(lines[4].starts_with("1,0,"));
    }
}
