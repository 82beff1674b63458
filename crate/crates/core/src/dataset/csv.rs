//! Plain comma-separated numeric tables: `,` separator, `.` decimal point,
//! optional single header row, no quoting.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// Header name; requires a header row.
    Name(String),
    /// Zero-based column index.
    Index(usize),
    Last,
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub label_column: LabelColumn,
    pub positive_label: String,
    pub has_header: bool,
}

impl CsvOptions {
    pub fn new(positive_label: impl Into<String>) -> Self {
        Self {
            label_column: LabelColumn::Last,
            positive_label: positive_label.into(),
            has_header: true,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, opts)
}

pub(crate) fn parse_number(cell: &str, line: usize, column: usize) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NonNumeric {
            line,
            column,
            value: cell.to_string(),
        }),
    }
}

pub fn parse_csv(text: &str, opts: &CsvOptions) -> Result<LabeledDataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let header: Option<Vec<String>> = if opts.has_header {
        let (_, line) = lines.next().ok_or_else(|| Error::InvalidDataset("empty file".into()))?;
        Some(line.split(',').map(|c| c.trim().to_string()).collect())
    } else {
        None
    };

    let mut width = header.as_ref().map(Vec::len);
    let mut label_idx: Option<usize> = None;
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;

    for (lineno, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let w = *width.get_or_insert(cells.len());
        if cells.len() != w {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {w} fields, found {}", cells.len()),
            });
        }
        let li = match label_idx {
            Some(i) => i,
            None => {
                let i = resolve_label_column(&opts.label_column, header.as_deref(), w)?;
                label_idx = Some(i);
                i
            }
        };
        for (c, cell) in cells.iter().enumerate() {
            if c == li {
                continue;
            }
            data.push(parse_number(cell, lineno, c + 1)?);
        }
        labels.push(if cells[li] == opts.positive_label {
            Label::Positive
        } else {
            Label::Negative
        });
        rows += 1;
    }

    let w = width.ok_or_else(|| Error::InvalidDataset("no data rows".into()))?;
    let li = match label_idx {
        Some(i) => i,
        None => resolve_label_column(&opts.label_column, header.as_deref(), w)?,
    };
    let names = match header {
        Some(h) => h
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| i != li)
            .map(|(_, n)| n)
            .collect(),
        None => (0..w).filter(|&i| i != li).map(|i| format!("a{i}")).collect(),
    };
    let features = DenseMatrix::new(rows, w - 1, data)?;
    LabeledDataset::new(features, labels, names)
}

/// Reads a table with no label column: every field is an attribute.
pub fn parse_feature_csv(text: &str, has_header: bool) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .skip(usize::from(has_header));
    for (lineno, line) in lines {
        let row = line
            .split(',')
            .enumerate()
            .map(|(c, cell)| parse_number(cell.trim(), lineno, c + 1))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidDataset("no data rows".into()));
    }
    DenseMatrix::from_rows(&rows)
}

fn resolve_label_column(col: &LabelColumn, header: Option<&[String]>, width: usize) -> Result<usize> {
    let idx = match col {
        LabelColumn::Last => width.checked_sub(1),
        LabelColumn::Index(i) => Some(*i).filter(|&i| i < width),
        LabelColumn::Name(name) => header.and_then(|h| h.iter().position(|c| c == name)),
    };
    let idx = idx.ok_or_else(|| Error::MissingLabelColumn(format!("{col:?}")))?;
    if width < 2 {
        return Err(Error::InvalidDataset(
            "need at least one attribute besides the label".into(),
        ));
    }
    Ok(idx)
}

/// Writes a header row and one line per row, label last. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv(
    ds: &LabeledDataset,
    path: impl AsRef<Path>,
    positive_label: &str,
    negative_label: &str,
) -> Result<()> {
    let mut out = String::new();
    for name in ds.attribute_names() {
        out.push_str(name);
        out.push(',');
    }
    out.push_str("label\n");
    for (row, label) in ds.features().row_iter().zip(ds.labels()) {
        for v in row {
            write!(out, "{v},").unwrap();
        }
        out.push_str(match label {
            Label::Positive => positive_label,
            Label::Negative => negative_label,
        });
        out.push('\n');
    }
    crate::fsutil::write_atomic(path.as_ref(), out.as_bytes())
}
