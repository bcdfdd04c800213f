//! Quasi-cyclic base matrices and their circulant expansion.
//!
//! Text form: a header line `rows cols z`, then `rows` lines of `cols`
//! integer shifts. `-1` marks an all-zero block, `s >= 0` the identity
//! cyclically shifted by `s`.

use super::{CodeError, TannerGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcBaseMatrix {
    rows: usize,
    cols: usize,
    z: usize,
    shifts: Vec<i64>,
}

impl QcBaseMatrix {
    /// `shifts` is row-major, `rows * cols` entries.
    pub fn new(rows: usize, cols: usize, z: usize, shifts: Vec<i64>) -> Result<Self, CodeError> {
        if rows == 0 || cols == 0 || z == 0 {
            return Err(CodeError::InvalidBaseMatrix("rows, cols and z must be positive".into()));
        }
        if shifts.len() != rows * cols {
            return Err(CodeError::InvalidBaseMatrix(format!(
                "expected {} shifts, got {}",
                rows * cols,
                shifts.len()
            )));
        }
        if let Some((i, &s)) = shifts.iter().enumerate().find(|(_, &s)| s < -1 || s >= z as i64) {
            return Err(CodeError::InvalidBaseMatrix(format!(
                "shift {s} at ({}, {}) outside -1 or [0, {z})",
                i / cols,
                i % cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            z,
            shifts,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn z(&self) -> usize {
        self.z
    }

    /// Shift of cell `(r, c)`, `None` for an all-zero block.
    pub fn shift(&self, r: usize, c: usize) -> Option<usize> {
        let s = self.shifts[r * self.cols + c];
        (s >= 0).then_some(s as usize)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.z);
        for row in self.shifts.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Parses the shift-grid text form.
pub fn load_qc(text: &str) -> Result<QcBaseMatrix, CodeError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(CodeError::Parse {
        line: 1,
        msg: "empty input, expected \"rows cols z\"".into(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| CodeError::Parse {
            line: hline,
            msg: "header must be three non-negative integers".into(),
        })?;
    let [rows, cols, z] = dims[..] else {
        return Err(CodeError::Parse {
            line: hline,
            msg: "header must be \"rows cols z\"".into(),
        });
    };
    let mut shifts = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (line, text) = lines.next().ok_or(CodeError::Parse {
            line: hline + r + 1,
            msg: format!("missing row {}", r + 1),
        })?;
        let row: Vec<i64> = text
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| CodeError::Parse {
                line,
                msg: "shifts must be integers".into(),
            })?;
        if row.len() != cols {
            return Err(CodeError::Parse {
                line,
                msg: format!("expected {cols} shifts, found {}", row.len()),
            });
        }
        if let Some(&s) = row.iter().find(|&&s| s < -1 || s >= z as i64) {
            return Err(CodeError::Parse {
                line,
                msg: format!("shift {s} outside -1 or [0, {z})"),
            });
        }
        shifts.extend(row);
    }
    if let Some((line, _)) = lines.next() {
        return Err(CodeError::Parse {
            line,
            msg: "trailing content after base matrix".into(),
        });
    }
    QcBaseMatrix::new(rows, cols, z, shifts)
}

/// Expands every circulant block: cell `(r, c)` with shift `s` connects
/// variable `c*z + (k+s) mod z` to check `r*z + k` for `k` in `0..z`.
pub fn expand_qc(base: &QcBaseMatrix) -> Result<TannerGraph, CodeError> {
    let z = base.z;
    let mut edges = Vec::new();
    for r in 0..base.rows {
        for c in 0..base.cols {
            if let Some(s) = base.shift(r, c) {
                edges.extend((0..z).map(|k| (c * z + (k + s) % z, r * z + k)));
            }
        }
    }
    TannerGraph::from_edges(base.cols * z, base.rows * z, &edges)
}
