//! Reading and writing tensors, convergence histories and spectra.
//!
//! Tensor files come in two flavours sharing one layout: a header with
//! `n, m, p`, the scalar kind and free-form metadata, followed by entries in
//! slice-major order with column-major frontal slices.
//!
//! Text:
//!
//! ```text
//! tubal-tensor 1
//! dims 2 2 3
//! kind real
//! meta family blur
//! data
//! 0.5
//! ...
//! ```
//!
//! Complex entries are written `re im` on one line. Binary files start with
//! the magic `TUBT`, then little-endian `u32` version, three `u64`
//! dimensions, a `u8` kind (0 real, 1 complex), a `u32` metadata count with
//! length-prefixed UTF-8 key/value pairs, and the `f64` entries.

use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::solvers::ConvergenceHistory;
use crate::spectra::SliceSpectrum;
use crate::tensor::{Tensor3, C64};
use crate::tubal::Tubular;

const TEXT_MAGIC: &str = "tubal-tensor 1";
const BINARY_MAGIC: &[u8; 4] = b"TUBT";
const BINARY_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarKind {
    Real,
    Complex,
}

/// A tensor with the metadata stored alongside it.
#[derive(Clone, Debug)]
pub struct TensorFile {
    pub tensor: Tensor3,
    pub metadata: Vec<(String, String)>,
}

fn kind_of(t: &Tensor3) -> ScalarKind {
    if t.is_real() {
        ScalarKind::Real
    } else {
        ScalarKind::Complex
    }
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn write_text<W: Write>(mut w: W, t: &Tensor3, metadata: &[(String, String)]) -> Result<()> {
    let kind = kind_of(t);
    writeln!(w, "{TEXT_MAGIC}")?;
    writeln!(w, "dims {} {} {}", t.n(), t.m(), t.p())?;
    writeln!(w, "kind {}", if kind == ScalarKind::Real { "real" } else { "complex" })?;
    for (k, v) in metadata {
        if k.contains(char::is_whitespace) || v.contains('\n') {
            return Err(format_err(format!("metadata key '{k}' must be a single word on one line")));
        }
        writeln!(w, "meta {k} {v}")?;
    }
    writeln!(w, "data")?;
    for v in t.as_slice() {
        match kind {
            ScalarKind::Real => writeln!(w, "{:e}", v.re)?,
            ScalarKind::Complex => writeln!(w, "{:e} {:e}", v.re, v.im)?,
        }
    }
    Ok(())
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    f64::from_str(s).map_err(|e| format_err(format!("line {line}: bad number '{s}': {e}")))
}

pub fn read_text<R: BufRead>(r: R) -> Result<TensorFile> {
    let mut lines = r.lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, l)) => Ok((i + 1, l?)),
            None => Err(format_err(format!("unexpected end of file, expected {what}"))),
        }
    };
    let (_, magic) = next("header")?;
    if magic.trim() != TEXT_MAGIC {
        return Err(format_err(format!("not a tensor file (header '{}')", magic.trim())));
    }
    let (ln, dims) = next("dims")?;
    let parts: Vec<&str> = dims.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "dims" {
        return Err(format_err(format!("line {ln}: expected 'dims n m p'")));
    }
    let dim = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|e| format_err(format!("line {ln}: bad dimension '{s}': {e}")))
    };
    let (n, m, p) = (dim(parts[1])?, dim(parts[2])?, dim(parts[3])?);
    let (ln, kind_line) = next("kind")?;
    let kind = match kind_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["kind", "real"] => ScalarKind::Real,
        ["kind", "complex"] => ScalarKind::Complex,
        _ => return Err(format_err(format!("line {ln}: expected 'kind real|complex'"))),
    };
    let mut metadata = Vec::new();
    loop {
        let (ln, l) = next("data")?;
        let l = l.trim_end();
        if l == "data" {
            break;
        }
        let rest = l
            .strip_prefix("meta ")
            .ok_or_else(|| format_err(format!("line {ln}: expected 'meta key value' or 'data'")))?;
        let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
        metadata.push((k.to_string(), v.to_string()));
    }
    let count = n
        .checked_mul(m)
        .and_then(|x| x.checked_mul(p))
        .ok_or_else(|| format_err("dimensions overflow"))?;
    let mut data = Vec::with_capacity(count);
    while data.len() < count {
        let (ln, l) = next("entry")?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        let v = match (kind, fields.as_slice()) {
            (ScalarKind::Real, [re]) => C64::new(parse_f64(re, ln)?, 0.0),
            (ScalarKind::Complex, [re, im]) => C64::new(parse_f64(re, ln)?, parse_f64(im, ln)?),
            _ => return Err(format_err(format!("line {ln}: wrong number of fields"))),
        };
        data.push(v);
    }
    Ok(TensorFile {
        tensor: Tensor3::from_vec(n, m, p, data)?,
        metadata,
    })
}

pub fn write_binary<W: Write>(mut w: W, t: &Tensor3, metadata: &[(String, String)]) -> Result<()> {
    let kind = kind_of(t);
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&BINARY_VERSION.to_le_bytes())?;
    for d in [t.n(), t.m(), t.p()] {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    w.write_all(&[if kind == ScalarKind::Real { 0u8 } else { 1u8 }])?;
    w.write_all(&(metadata.len() as u32).to_le_bytes())?;
    for (k, v) in metadata {
        for s in [k, v] {
            w.write_all(&(s.len() as u32).to_le_bytes())?;
            w.write_all(s.as_bytes())?;
        }
    }
    for v in t.as_slice() {
        w.write_all(&v.re.to_le_bytes())?;
        if kind == ScalarKind::Complex {
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| format_err(format!("truncated binary tensor: {e}")))?;
    Ok(buf)
}

fn read_string<R: Read>(r: &mut R) -> Result<String> {
    let len = u32::from_le_bytes(read_array(r)?) as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf).map_err(|e| format_err(format!("truncated metadata: {e}")))?;
    String::from_utf8(buf).map_err(|e| format_err(format!("metadata is not UTF-8: {e}")))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<TensorFile> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != BINARY_MAGIC {
        return Err(format_err("not a binary tensor file"));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != BINARY_VERSION {
        return Err(format_err(format!("unsupported version {version}")));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = u64::from_le_bytes(read_array(&mut r)?) as usize;
    }
    let kind = match read_array::<1, _>(&mut r)?[0] {
        0 => ScalarKind::Real,
        1 => ScalarKind::Complex,
        other => return Err(format_err(format!("unknown scalar kind {other}"))),
    };
    let meta_count = u32::from_le_bytes(read_array(&mut r)?);
    let mut metadata = Vec::with_capacity(meta_count as usize);
    for _ in 0..meta_count {
        let k = read_string(&mut r)?;
        let v = read_string(&mut r)?;
        metadata.push((k, v));
    }
    let [n, m, p] = dims;
    let count = n
        .checked_mul(m)
        .and_then(|x| x.checked_mul(p))
        .ok_or_else(|| format_err("dimensions overflow"))?;
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        let re = f64::from_le_bytes(read_array(&mut r)?);
        let im = match kind {
            ScalarKind::Real => 0.0,
            ScalarKind::Complex => f64::from_le_bytes(read_array(&mut r)?),
        };
        data.push(C64::new(re, im));
    }
    Ok(TensorFile {
        tensor: Tensor3::from_vec(n, m, p, data)?,
        metadata,
    })
}

/// Reads either format, detected from the first bytes.
pub fn read_tensor_file(path: &std::path::Path) -> Result<TensorFile> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        read_binary(bytes.as_slice())
    } else {
        read_text(bytes.as_slice())
    }
}

/// Frontal slices from CSV in the unfolded layout: `n·p` rows of `m`
/// entries, slice 1 on top. Entries parse as complex numbers (`1.5`,
/// `2-0.5i`, …); blank lines and lines starting with `#` are skipped.
pub fn read_slices_csv<R: Read>(r: R, p: usize) -> Result<Tensor3> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| format_err(format!("csv row {}: {e}", i + 1)))?;
        let row = rec
            .iter()
            .map(|f| {
                C64::from_str(f).map_err(|e| format_err(format!("csv row {}: bad entry '{f}': {e}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let m = rows.first().map_or(0, Vec::len);
    if m == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(format_err("csv rows must be non-empty and equally long"));
    }
    let mat = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
    Tensor3::fold(&mat, p)
}

/// History CSV: `k,delta,log10_delta,rel_error,seconds`. `rel_error` is
/// empty when no reference solution was tracked.
pub fn write_history_csv<W: Write>(w: W, h: &ConvergenceHistory) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k", "delta", "log10_delta", "rel_error", "seconds"])
        .map_err(csv_err)?;
    for (k, d) in h.delta.iter().enumerate() {
        let err = h
            .rel_error
            .as_ref()
            .map(|e| format!("{:e}", e[k]))
            .unwrap_or_default();
        out.write_record([
            k.to_string(),
            format!("{d:e}"),
            format!("{:.6}", d.log10()),
            err,
            format!("{:.6}", h.seconds[k]),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    format_err(format!("csv: {e}"))
}

/// Reads back the `delta` and `rel_error` columns of a history CSV.
pub fn read_history_csv<R: Read>(r: R) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let mut reader = csv::Reader::from_reader(r);
    let mut delta = Vec::new();
    let mut err = Vec::new();
    let mut have_err = true;
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        delta.push(parse_f64(&rec[1], delta.len() + 2)?);
        if rec[3].is_empty() {
            have_err = false;
        } else {
            err.push(parse_f64(&rec[3], delta.len() + 1)?);
        }
    }
    Ok((delta, if have_err && !err.is_empty() { Some(err) } else { None }))
}

/// Spectrum CSV: one row per slice eigenvalue, `slice,index,re,im`.
pub fn write_spectrum_csv<W: Write>(w: W, spec: &SliceSpectrum) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["slice", "index", "re", "im"]).map_err(csv_err)?;
    for k in 0..spec.p() {
        for (j, v) in spec.values(k).iter().enumerate() {
            out.write_record([k.to_string(), j.to_string(), format!("{:e}", v.re), format!("{:e}", v.im)])
                .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Tubular-eigenvalue CSV: `selection,k,re,im` with the selection written as
/// `;`-separated slice indices and one row per tube entry.
pub fn write_tubular_eigenvalues_csv<W: Write>(w: W, eigs: &[(Vec<usize>, Tubular)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["selection", "k", "re", "im"]).map_err(csv_err)?;
    for (sel, t) in eigs {
        let s = sel.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
        for (k, v) in t.entries().iter().enumerate() {
            out.write_record([s.clone(), k.to_string(), format!("{:e}", v.re), format!("{:e}", v.im)])
                .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}
