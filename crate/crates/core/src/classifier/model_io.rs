//! Versioned text format for fitted models.
//!
//! ```text
//! FRLSTSVM/1 linear|gaussian
//! <section> <line count>
//! <lines...>
//! ```
//!
//! Sections, in order: `config` (one JSON line), `summary` (one JSON line),
//! `scaling` (`min`, `range`, `constant` lines, or empty), then `plane1` and
//! `plane2` (`w`, `b` lines) for linear models or `xref` (one row per line),
//! `surface1` and `surface2` (`coef`, `b` lines) for kernel models. Reals are
//! written with 17 significant digits so they read back bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::dataset::ScalingParams;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::linalg::DenseMatrix;

use super::{Hyperplane, Kernel, KernelModel, LinearModel, Model, TrainConfig, TrainingSummary};

const MAGIC: &str = "FRLSTSVM/1";

fn reals(v: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{x:.16e}").unwrap();
    }
    s
}

fn section(out: &mut String, name: &str, lines: &[String]) {
    writeln!(out, "{name} {}", lines.len()).unwrap();
    for l in lines {
        out.push_str(l);
        out.push('\n');
    }
}

pub fn write_model(model: &Model) -> String {
    let mut out = String::new();
    let kind = match model {
        Model::Linear(_) => "linear",
        Model::Kernel(_) => "gaussian",
    };
    writeln!(out, "{MAGIC} {kind}").unwrap();
    section(&mut out, "config", &[serde_json::to_string(model.config()).unwrap()]);
    section(&mut out, "summary", &[serde_json::to_string(model.summary()).unwrap()]);
    let scaling = match model.scaling() {
        Some(s) => vec![
            format!("min {}", reals(&s.min)),
            format!("range {}", reals(&s.range)),
            format!(
                "constant {}",
                s.constant
                    .iter()
                    .map(|&c| if c { "1" } else { "0" })
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
        ],
        None => Vec::new(),
    };
    section(&mut out, "scaling", &scaling);
    match model {
        Model::Linear(m) => {
            for (name, p) in [("plane1", &m.plane1), ("plane2", &m.plane2)] {
                section(
                    &mut out,
                    name,
                    &[format!("w {}", reals(&p.w)), format!("b {}", reals(&[p.b]))],
                );
            }
        }
        Model::Kernel(m) => {
            let rows: Vec<String> = m.xref.row_iter().map(reals).collect();
            section(&mut out, "xref", &rows);
            for (name, s) in [("surface1", &m.surface1), ("surface2", &m.surface2)] {
                section(
                    &mut out,
                    name,
                    &[format!("coef {}", reals(&s.coef)), format!("b {}", reals(&[s.b]))],
                );
            }
        }
    }
    out
}

pub fn save_model(path: impl AsRef<Path>, model: &Model) -> Result<()> {
    write_atomic(path.as_ref(), write_model(model).as_bytes())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_model(&text)
}

struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::ModelFormat {
        line,
        message: message.into(),
    }
}

impl<'a> Reader<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        self.lines
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| format_err(0, "unexpected end of model file"))
    }

    /// Reads a `<name> <count>` header and its body lines.
    fn section(&mut self, name: &str) -> Result<Vec<(usize, &'a str)>> {
        let (no, header) = self.next_line()?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(name) {
            return Err(format_err(no, format!("expected section {name:?}")));
        }
        let count: usize = parts
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| format_err(no, format!("section {name:?} needs a line count")))?;
        (0..count).map(|_| self.next_line()).collect()
    }
}

fn parse_reals(no: usize, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format_err(no, format!("bad number {t:?}")))
        })
        .collect()
}

fn keyed<'a>(line: (usize, &'a str), key: &str) -> Result<(usize, &'a str)> {
    let (no, text) = line;
    match text.split_once(' ') {
        Some((k, rest)) if k == key => Ok((no, rest)),
        _ if text == key => Ok((no, "")),
        _ => Err(format_err(no, format!("expected {key:?} line"))),
    }
}

fn keyed_reals(line: (usize, &str), key: &str) -> Result<Vec<f64>> {
    let (no, rest) = keyed(line, key)?;
    parse_reals(no, rest)
}

fn scalar(line: (usize, &str), key: &str) -> Result<f64> {
    let v = keyed_reals(line, key)?;
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(format_err(line.0, format!("{key:?} takes one value"))),
    }
}

fn json<T: serde::de::DeserializeOwned>(body: &[(usize, &str)], what: &str) -> Result<T> {
    match body {
        [(no, text)] => serde_json::from_str(text).map_err(|e| format_err(*no, format!("{what}: {e}"))),
        _ => Err(format_err(0, format!("{what} section must hold one line"))),
    }
}

fn two_lines<'a>(body: Vec<(usize, &'a str)>, name: &str) -> Result<[(usize, &'a str); 2]> {
    body.try_into()
        .map_err(|_| format_err(0, format!("section {name:?} must hold two lines")))
}

pub fn read_model(text: &str) -> Result<Model> {
    let mut r = Reader {
        lines: text.lines().enumerate(),
    };
    let (no, first) = r.next_line()?;
    let kind = match first.split_once(' ') {
        Some((MAGIC, k)) => k.trim(),
        _ => return Err(format_err(no, format!("not a {MAGIC} model file"))),
    };
    let config: TrainConfig = json(&r.section("config")?, "config")?;
    config.validate()?;
    let summary: TrainingSummary = json(&r.section("summary")?, "summary")?;

    let body = r.section("scaling")?;
    let scaling = match body.len() {
        0 => None,
        3 => {
            let min = keyed_reals(body[0], "min")?;
            let range = keyed_reals(body[1], "range")?;
            let (cno, flags) = keyed(body[2], "constant")?;
            let constant = flags
                .split_whitespace()
                .map(|t| match t {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(format_err(cno, format!("bad flag {t:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if range.len() != min.len() || constant.len() != min.len() || range.iter().any(|&v| !(v > 0.0)) {
                return Err(format_err(body[0].0, "inconsistent scaling section"));
            }
            Some(ScalingParams { min, range, constant })
        }
        _ => return Err(format_err(no, "scaling section must hold zero or three lines")),
    };

    let model = match (kind, config.kernel) {
        ("linear", Kernel::Linear) => {
            let mut planes = Vec::new();
            for name in ["plane1", "plane2"] {
                let [w, b] = two_lines(r.section(name)?, name)?;
                let mut u = keyed_reals(w, "w")?;
                u.push(scalar(b, "b")?);
                planes.push(Hyperplane::from_augmented(&u));
            }
            let plane2 = planes.pop().unwrap();
            let plane1 = planes.pop().unwrap();
            if plane1.w.len() != plane2.w.len() || plane1.w.is_empty() {
                return Err(format_err(0, "plane widths differ"));
            }
            Model::Linear(LinearModel {
                plane1,
                plane2,
                scaling,
                config,
                summary,
            })
        }
        ("gaussian", Kernel::Gaussian { sigma }) => {
            let rows = r
                .section("xref")?
                .into_iter()
                .map(|(no, l)| parse_reals(no, l))
                .collect::<Result<Vec<_>>>()?;
            if rows.is_empty() {
                return Err(format_err(0, "empty reference matrix"));
            }
            let xref = DenseMatrix::from_rows(&rows).map_err(|e| format_err(0, e.to_string()))?;
            let mut us = Vec::new();
            for name in ["surface1", "surface2"] {
                let [c, b] = two_lines(r.section(name)?, name)?;
                let mut u = keyed_reals(c, "coef")?;
                u.push(scalar(b, "b")?);
                us.push(u);
            }
            let mut m = KernelModel::assemble(xref, &us[0], &us[1], sigma, config, summary)?;
            m.scaling = scaling;
            Model::Kernel(m)
        }
        _ => return Err(format_err(1, format!("model kind {kind:?} does not match its config"))),
    };
    if let Some(s) = model.scaling() {
        if s.n_attributes() != model.n_attributes() {
            return Err(format_err(0, "scaling width does not match the model"));
        }
    }
    if let Some((no, extra)) = r.lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(format_err(no + 1, format!("trailing content {extra:?}")));
    }
    Ok(model)
}
