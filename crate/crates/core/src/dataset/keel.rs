//! KEEL `.dat` files.
//!
//! ```text
//! @relation haberman
//! @attribute Age integer [30, 83]
//! @attribute Class {positive, negative}
//! @inputs Age
//! @outputs Class
//! @data
//! 38, positive
//! ```
//!
//! Keywords are case-insensitive, `%` starts a comment line. Without
//! `@outputs` the last attribute is the label.

use std::path::Path;

use super::csv::parse_number;
use super::{Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug)]
struct Attribute {
    name: String,
    nominal: bool,
}

pub fn load_keel(path: impl AsRef<Path>, positive_label: &str) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_keel(&text, positive_label)
}

/// Splits `@keyword rest` into a lowercase keyword and the trimmed rest.
fn directive(line: &str) -> Option<(String, &str)> {
    let body = line.strip_prefix('@')?;
    let end = body.find(char::is_whitespace).unwrap_or(body.len());
    Some((body[..end].to_ascii_lowercase(), body[end..].trim()))
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute> {
    let malformed = |message: &str| Error::Parse {
        line,
        message: message.to_string(),
    };
    let (name, spec) = if let Some(quoted) = rest.strip_prefix('\'') {
        let end = quoted
            .find('\'')
            .ok_or_else(|| malformed("unterminated quoted attribute name"))?;
        (&quoted[..end], quoted[end + 1..].trim())
    } else {
        // the name ends at whitespace or at the opening brace of a value list
        let end = rest.find(|c: char| c.is_whitespace() || c == '{').unwrap_or(rest.len());
        (&rest[..end], rest[end..].trim())
    };
    if name.is_empty() {
        return Err(malformed("attribute without a name"));
    }
    if spec.is_empty() {
        return Err(malformed("attribute without a type"));
    }
    let nominal = if spec.starts_with('{') {
        if !spec.ends_with('}') {
            return Err(malformed("unterminated nominal value list"));
        }
        true
    } else {
        let kind = spec
            .split(|c: char| c.is_whitespace() || c == '[')
            .next()
            .unwrap_or("")
            .to_ascii_lowercase();
        match kind.as_str() {
            "real" | "integer" | "numeric" => false,
            other => return Err(malformed(&format!("unknown attribute type {other:?}"))),
        }
    };
    Ok(Attribute {
        name: name.to_string(),
        nominal,
    })
}

fn name_list(rest: &str) -> Vec<String> {
    rest.split(',')
        .map(|s| s.trim().trim_matches('\'').to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn parse_keel(text: &str, positive_label: &str) -> Result<LabeledDataset> {
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut saw_data = false;

    for (lineno, line) in lines.by_ref() {
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let Some((keyword, rest)) = directive(line) else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected a header directive, found {line:?}"),
            });
        };
        match keyword.as_str() {
            "relation" => {}
            "attribute" => attributes.push(parse_attribute(rest, lineno)?),
            "inputs" | "input" => inputs = Some(name_list(rest)),
            "outputs" | "output" => outputs = Some(name_list(rest)),
            "data" => {
                saw_data = true;
                break;
            }
            other => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("unknown directive @{other}"),
                })
            }
        }
    }
    if !saw_data {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: "missing @data section".into(),
        });
    }
    if attributes.len() < 2 {
        return Err(Error::InvalidDataset(
            "need at least one input and one output attribute".into(),
        ));
    }

    let position = |name: &str| -> Result<usize> {
        attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::InvalidDataset(format!("undeclared attribute {name:?}")))
    };

    let output = match &outputs {
        Some(o) if o.len() > 1 => {
            return Err(Error::InvalidDataset(format!(
                "{} output attributes; exactly one is supported",
                o.len()
            )))
        }
        Some(o) if o.len() == 1 => position(&o[0])?,
        _ => attributes.len() - 1,
    };
    let input_idx: Vec<usize> = match &inputs {
        Some(names) => names.iter().map(|n| position(n)).collect::<Result<_>>()?,
        None => (0..attributes.len()).filter(|&i| i != output).collect(),
    };
    if input_idx.contains(&output) {
        return Err(Error::InvalidDataset(format!(
            "attribute {:?} is both input and output",
            attributes[output].name
        )));
    }
    if let Some(&i) = input_idx.iter().find(|&&i| attributes[i].nominal) {
        return Err(Error::InvalidDataset(format!(
            "nominal input attribute {:?} is not supported",
            attributes[i].name
        )));
    }

    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != attributes.len() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {} values, found {}", attributes.len(), cells.len()),
            });
        }
        for &i in &input_idx {
            data.push(parse_number(cells[i], lineno, i + 1)?);
        }
        labels.push(if cells[output] == positive_label {
            Label::Positive
        } else {
            Label::Negative
        });
    }
    let names = input_idx.iter().map(|&i| attributes[i].name.clone()).collect();
    let features = DenseMatrix::new(labels.len(), input_idx.len(), data)?;
    LabeledDataset::new(features, labels, names)
}
