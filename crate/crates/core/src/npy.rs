//! Minimal reader/writer for the NPY array format (version 1.0).
//!
//! Feature stacks are exchanged with other tooling as single-array NPY
//! files: little-endian `f32`, C order, with the standard dictionary
//! header padded to a 64-byte boundary. Only what the pipeline needs is
//! implemented — writing `<f4` arrays and reading them back — plus a
//! header-only probe used for inspection.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{ArrayD, ArrayViewD, IxDyn};

use crate::error::{CoreError, Result};

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const VERSION: [u8; 2] = [1, 0];
const ALIGN: usize = 64;

/// Parsed NPY header fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpyHeader {
    pub dtype: String,
    pub fortran_order: bool,
    pub shape: Vec<usize>,
}

impl NpyHeader {
    pub fn n_elements(&self) -> usize {
        self.shape.iter().product()
    }
}

fn format_error(path: &Path, detail: impl Into<String>) -> CoreError {
    CoreError::NpyFormat {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> CoreError {
    CoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

// ===== writing =====

fn header_bytes(shape: &[usize]) -> Vec<u8> {
    let dims: Vec<String> = shape.iter().map(|d| d.to_string()).collect();
    let shape_str = if dims.len() == 1 {
        format!("({},)", dims[0])
    } else {
        format!("({})", dims.join(", "))
    };
    let dict = format!("{{'descr': '<f4', 'fortran_order': False, 'shape': {shape_str}, }}");

    // Magic + version + u16 length prefix + dict + padding + b'\n',
    // padded so the payload starts on a 64-byte boundary.
    let prefix = MAGIC.len() + VERSION.len() + 2;
    let total = (prefix + dict.len() + 1).div_ceil(ALIGN) * ALIGN;
    let header_len = total - prefix;

    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION);
    out.extend_from_slice(&(header_len as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out.resize(total - 1, b' ');
    out.push(b'\n');
    out
}

/// Writes an array as a version-1.0 NPY file: little-endian `f32`, C order.
pub fn write_npy_f32(path: &Path, array: ArrayViewD<'_, f32>) -> Result<()> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&header_bytes(array.shape()))
        .map_err(|e| io_error(path, e))?;
    // Logical (row-major) order regardless of the view's memory layout.
    for &v in array.iter() {
        w.write_all(&v.to_le_bytes()).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

// ===== reading =====

fn parse_header_dict(path: &Path, dict: &str) -> Result<NpyHeader> {
    let field = |key: &str| -> Result<String> {
        let pat = format!("'{key}':");
        let at = dict
            .find(&pat)
            .ok_or_else(|| format_error(path, format!("header is missing {key:?}")))?;
        Ok(dict[at + pat.len()..].trim_start().to_string())
    };

    let descr_rest = field("descr")?;
    let dtype = descr_rest
        .strip_prefix('\'')
        .and_then(|r| r.split('\'').next())
        .ok_or_else(|| format_error(path, "descr value is not a quoted string"))?
        .to_string();

    let order_rest = field("fortran_order")?;
    let fortran_order = if order_rest.starts_with("False") {
        false
    } else if order_rest.starts_with("True") {
        true
    } else {
        return Err(format_error(path, "fortran_order is not True or False"));
    };

    let shape_rest = field("shape")?;
    let inner = shape_rest
        .strip_prefix('(')
        .and_then(|r| r.split(')').next())
        .ok_or_else(|| format_error(path, "shape value is not a tuple"))?;
    let mut shape = Vec::new();
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue; // trailing comma, e.g. "(862,)"
        }
        let dim: usize = part
            .parse()
            .map_err(|_| format_error(path, format!("bad shape dimension {part:?}")))?;
        shape.push(dim);
    }
    Ok(NpyHeader {
        dtype,
        fortran_order,
        shape,
    })
}

fn read_header_from(path: &Path, r: &mut impl Read) -> Result<NpyHeader> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic).map_err(|e| io_error(path, e))?;
    if &magic != MAGIC {
        return Err(format_error(path, "not an NPY file (bad magic)"));
    }
    let mut version = [0u8; 2];
    r.read_exact(&mut version).map_err(|e| io_error(path, e))?;
    if version != VERSION {
        return Err(format_error(
            path,
            format!("unsupported NPY version {}.{}", version[0], version[1]),
        ));
    }
    let mut len_bytes = [0u8; 2];
    r.read_exact(&mut len_bytes).map_err(|e| io_error(path, e))?;
    let header_len = u16::from_le_bytes(len_bytes) as usize;
    let mut dict = vec![0u8; header_len];
    r.read_exact(&mut dict).map_err(|e| io_error(path, e))?;
    let dict = std::str::from_utf8(&dict)
        .map_err(|_| format_error(path, "header is not valid UTF-8"))?;
    parse_header_dict(path, dict)
}

/// Reads only the header: dtype, order, and shape.
pub fn read_npy_header(path: &Path) -> Result<NpyHeader> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    read_header_from(path, &mut BufReader::new(file))
}

/// Reads a full `<f4`, C-order NPY file into a dynamic-dimensional array.
pub fn read_npy_f32(path: &Path) -> Result<ArrayD<f32>> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut r = BufReader::new(file);
    let header = read_header_from(path, &mut r)?;
    if header.dtype != "<f4" {
        return Err(format_error(
            path,
            format!("expected dtype '<f4', found {:?}", header.dtype),
        ));
    }
    if header.fortran_order {
        return Err(format_error(path, "Fortran-order arrays are not supported"));
    }
    let n = header.n_elements();
    let mut payload = Vec::new();
    r.read_to_end(&mut payload).map_err(|e| io_error(path, e))?;
    if payload.len() != n * 4 {
        return Err(format_error(
            path,
            format!(
                "payload is {} bytes but shape {:?} needs {}",
                payload.len(),
                header.shape,
                n * 4
            ),
        ));
    }
    let data: Vec<f32> = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    ArrayD::from_shape_vec(IxDyn(&header.shape), data)
        .map_err(|e| format_error(path, format!("shape/data mismatch: {e}")))
}
