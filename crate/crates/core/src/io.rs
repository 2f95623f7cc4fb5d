//! Plain-text and binary artifacts: trace CSVs, wavefunction checkpoints and Q grids.
//!
//! Floats are written with `{:.16e}` (17 significant digits), which round-trips
//! every `f64` exactly.

use std::io::{BufRead, Write};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::Trace;
use crate::quantum::QGrid;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes named columns of equal length.
pub fn write_columns<W: Write>(mut w: W, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
    let n = columns.first().map_or(0, |c| c.len());
    if headers.len() != columns.len() || columns.iter().any(|c| c.len() != n) {
        return Err(Error::Format("column count or length mismatch".into()));
    }
    writeln!(w, "{}", headers.join(","))?;
    for i in 0..n {
        let row: Vec<String> = columns.iter().map(|c| fmt(c[i])).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Observable trace: t, phi, Phi, x_com, n_plus, n_minus, norm.
pub fn write_trace_csv<W: Write>(w: W, trace: &Trace) -> Result<()> {
    write_columns(
        w,
        &["t", "phi", "Phi", "x_com", "n_plus", "n_minus", "norm"],
        &[&trace.times, &trace.rel_phase, &trace.tot_phase, &trace.com, &trace.n_plus, &trace.n_minus, &trace.norm],
    )
}

/// Cavity trace with absolute amplitudes √N·α±: t, re/im α+, re/im α−, norm.
pub fn write_cavity_csv<W: Write>(w: W, trace: &Trace, n_atoms: f64) -> Result<()> {
    let s = n_atoms.sqrt();
    let part = |v: &[Complex<f64>], f: fn(&Complex<f64>) -> f64| v.iter().map(|z| s * f(z)).collect::<Vec<_>>();
    let (rp, ip) = (part(&trace.alpha_plus, |z| z.re), part(&trace.alpha_plus, |z| z.im));
    let (rm, im) = (part(&trace.alpha_minus, |z| z.re), part(&trace.alpha_minus, |z| z.im));
    write_columns(
        w,
        &["t", "re_alpha_plus", "im_alpha_plus", "re_alpha_minus", "im_alpha_minus", "norm"],
        &[&trace.times, &rp, &ip, &rm, &im, &trace.norm],
    )
}

/// Reads a CSV written by [`write_columns`] back into (headers, columns).
pub fn read_columns<R: BufRead>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = r.lines();
    let headers: Vec<String> = match lines.next() {
        Some(h) => h?.split(',').map(str::to_owned).collect(),
        None => return Err(Error::Format("empty CSV".into())),
    };
    let mut cols = vec![Vec::new(); headers.len()];
    for (k, line) in lines.enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != headers.len() {
            return Err(Error::Format(format!("row {} has {} fields", k + 1, fields.len())));
        }
        for (c, f) in cols.iter_mut().zip(fields) {
            c.push(f.parse().map_err(|e| Error::Format(format!("row {}: {e}", k + 1)))?);
        }
    }
    Ok((headers, cols))
}

/// Q grid: re_beta, im_beta, q.
pub fn write_q_grid_csv<W: Write>(w: W, grid: &QGrid) -> Result<()> {
    let re: Vec<f64> = grid.betas.iter().map(|b| b.re).collect();
    let im: Vec<f64> = grid.betas.iter().map(|b| b.im).collect();
    write_columns(w, &["re_beta", "im_beta", "q"], &[&re, &im, &grid.q])
}

/// Metadata line preceding the raw amplitudes of a checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format: String,
    pub len: usize,
    /// Free-form context, e.g. time, frame momentum, cavity amplitudes, parameters.
    #[serde(default)]
    pub meta: serde_json::Value,
}

const CHECKPOINT_FORMAT: &str = "complex64-le";

/// One JSON header line, then `len` little-endian (re, im) f32 pairs.
pub fn write_checkpoint<W: Write>(mut w: W, amplitudes: &[Complex<f64>], meta: serde_json::Value) -> Result<()> {
    let header = CheckpointHeader { format: CHECKPOINT_FORMAT.into(), len: amplitudes.len(), meta };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(8 * amplitudes.len());
    for z in amplitudes {
        buf.extend_from_slice(&(z.re as f32).to_le_bytes());
        buf.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_checkpoint<R: BufRead>(mut r: R) -> Result<(CheckpointHeader, Vec<Complex<f32>>)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: CheckpointHeader = serde_json::from_str(line.trim_end())?;
    if header.format != CHECKPOINT_FORMAT {
        return Err(Error::Format(format!("unknown checkpoint format {:?}", header.format)));
    }
    let mut buf = vec![0u8; 8 * header.len];
    r.read_exact(&mut buf)?;
    let data = buf
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex::new(re, im)
        })
        .collect();
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes after checkpoint data", rest.len())));
    }
    Ok((header, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn columns_roundtrip_bit_exact() {
        let a = [0.1, 1.0 / 3.0, -2.5e-300, f64::MAX];
        let b = [std::f64::consts::PI, 0.0, -0.0, 1e-17];
        let mut out = Vec::new();
        write_columns(&mut out, &["a", "b"], &[&a, &b]).unwrap();
        let (h, cols) = read_columns(Cursor::new(out)).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        for (x, y) in cols[0].iter().zip(&a).chain(cols[1].iter().zip(&b)) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn trace_header() {
        let t = Trace { times: vec![0.0], rel_phase: vec![0.1], tot_phase: vec![0.2], com: vec![0.0], n_plus: vec![1.0], n_minus: vec![1.0], norm: vec![1.0], ..Trace::default() };
        let mut out = Vec::new();
        write_trace_csv(&mut out, &t).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("t,phi,Phi,x_com,n_plus,n_minus,norm\n"));
        assert_eq!(s.lines().count(), 2);
    }

    #[test]
    fn mismatched_columns_rejected() {
        let mut out = Vec::new();
        assert!(write_columns(&mut out, &["a", "b"], &[&[1.0], &[1.0, 2.0]]).is_err());
    }

    #[test]
    fn checkpoint_roundtrip() {
        let psi: Vec<Complex<f64>> = (0..5).map(|k| Complex::new(k as f64 * 0.25, -(k as f64))).collect();
        let mut out = Vec::new();
        write_checkpoint(&mut out, &psi, serde_json::json!({"time": 1.5})).unwrap();
        let (h, back) = read_checkpoint(Cursor::new(&out)).unwrap();
        assert_eq!(h.len, 5);
        assert_eq!(h.meta["time"], 1.5);
        for (a, b) in psi.iter().zip(&back) {
            assert_eq!(a.re as f32, b.re);
            assert_eq!(a.im as f32, b.im);
        }
        // the payload after the header is exactly 8 bytes per amplitude
        let nl = out.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(out.len() - nl - 1, 40);
    }

    #[test]
    fn truncated_checkpoint_is_an_error() {
        let mut out = Vec::new();
        write_checkpoint(&mut out, &[Complex::new(1.0, 2.0)], serde_json::Value::Null).unwrap();
        out.pop();
        assert!(read_checkpoint(Cursor::new(out)).is_err());
    }
}
