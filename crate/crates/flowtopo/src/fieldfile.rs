//! Plain-text field and family files.
//!
//! ```text
//! # comment
//! field nf
//! u 0 1 1        # coefficient 1 of x^0 y^1 in u
//! u 2 0 1
//! v 3 0 1
//! v 1 1 -2
//! ```
//!
//! A family file adds `t0 <real>` and two blocks opened by lines `u0` and
//! `u1`, each holding `u`/`v` lines.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use flowtopo_core::{DivergenceReport, FieldError, Poly, PolyVectorField, TimeFamily};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate coefficient {component} {i} {j} (first given on line {first})")]
    Duplicate {
        line: usize,
        first: usize,
        component: char,
        i: u32,
        j: u32,
    },
    #[error("missing `field <name>` header")]
    MissingHeader,
    #[error("family file needs both `u0` and `u1` blocks")]
    MissingBlock,
    #[error("{0}")]
    Field(#[from] FieldError),
}

/// Contents of a field file.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldFile {
    Field { name: String, field: PolyVectorField },
    Family { name: String, family: TimeFamily },
}

impl FieldFile {
    pub fn name(&self) -> &str {
        match self {
            FieldFile::Field { name, .. } | FieldFile::Family { name, .. } => name,
        }
    }

    /// The field at `t` for a family (default `t₀`), or the field itself.
    pub fn field_at(&self, t: Option<f64>) -> PolyVectorField {
        match self {
            FieldFile::Field { field, .. } => field.clone(),
            FieldFile::Family { family, .. } => family.at_time(t.unwrap_or(family.t0)),
        }
    }

    pub fn family(&self) -> Option<&TimeFamily> {
        match self {
            FieldFile::Family { family, .. } => Some(family),
            FieldFile::Field { .. } => None,
        }
    }

    /// Divergence reports, tagged `u`, `u0` or `u1`.
    pub fn divergence(&self) -> Vec<(&'static str, DivergenceReport)> {
        match self {
            FieldFile::Field { field, .. } => vec![("u", field.check_divergence_free())],
            FieldFile::Family { family, .. } => vec![
                ("u0", family.u0.check_divergence_free()),
                ("u1", family.u1.check_divergence_free()),
            ],
        }
    }
}

#[derive(Default)]
struct Block {
    // (component, i, j) -> (coefficient, line)
    terms: BTreeMap<(char, u32, u32), (f64, usize)>,
}

impl Block {
    fn build(&self) -> Result<PolyVectorField, FieldError> {
        let mut u = Poly::zero();
        let mut v = Poly::zero();
        for (&(c, i, j), &(coef, _)) in &self.terms {
            if c == 'u' {
                u.add_term(i, j, coef);
            } else {
                v.add_term(i, j, coef);
            }
        }
        PolyVectorField::new(u, v)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Plain,
    U0,
    U1,
}

pub fn parse_field_file(path: &Path) -> Result<FieldFile, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_field_str(&text)
}

pub fn parse_field_str(text: &str) -> Result<FieldFile, ParseError> {
    let mut name = None;
    let mut t0 = None;
    let mut blocks = [Block::default(), Block::default(), Block::default()];
    let mut seen = [false; 3];
    let mut slot = Slot::Plain;

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        let Some(&head) = words.first() else { continue };
        let syntax = |msg: String| ParseError::Syntax { line, msg };
        match head {
            "field" => {
                if name.is_some() {
                    return Err(syntax("second `field` header".into()));
                }
                if words.len() != 2 {
                    return Err(syntax("expected `field <name>`".into()));
                }
                name = Some(words[1].to_string());
            }
            _ if name.is_none() => return Err(ParseError::MissingHeader),
            "t0" => {
                if t0.is_some() {
                    return Err(syntax("`t0` given twice".into()));
                }
                if words.len() != 2 {
                    return Err(syntax("expected `t0 <real>`".into()));
                }
                t0 = Some(real(words[1]).map_err(syntax)?);
            }
            "u0" | "u1" => {
                if words.len() != 1 {
                    return Err(syntax(format!("`{head}` opens a block and takes no arguments")));
                }
                if seen[Slot::Plain as usize] {
                    return Err(syntax("field terms before the first block".into()));
                }
                slot = if head == "u0" { Slot::U0 } else { Slot::U1 };
                if seen[slot as usize] {
                    return Err(syntax(format!("block `{head}` opened twice")));
                }
                seen[slot as usize] = true;
            }
            "u" | "v" => {
                if words.len() != 4 {
                    return Err(syntax(format!("expected `{head} <i> <j> <coefficient>`")));
                }
                let i = exponent(words[1]).map_err(syntax)?;
                let j = exponent(words[2]).map_err(syntax)?;
                let c = real(words[3]).map_err(syntax)?;
                if slot == Slot::Plain {
                    seen[Slot::Plain as usize] = true;
                }
                let component = head.chars().next().unwrap_or('u');
                let block = &mut blocks[slot as usize];
                if let Some(&(_, first)) = block.terms.get(&(component, i, j)) {
                    return Err(ParseError::Duplicate { line, first, component, i, j });
                }
                block.terms.insert((component, i, j), (c, line));
            }
            other => return Err(syntax(format!("unknown keyword `{other}`"))),
        }
    }

    let name = name.ok_or(ParseError::MissingHeader)?;
    if seen[Slot::U0 as usize] || seen[Slot::U1 as usize] || t0.is_some() {
        if !(seen[Slot::U0 as usize] && seen[Slot::U1 as usize]) {
            return Err(ParseError::MissingBlock);
        }
        let family = TimeFamily::new(
            blocks[Slot::U0 as usize].build()?,
            blocks[Slot::U1 as usize].build()?,
            t0.unwrap_or(0.0),
        );
        Ok(FieldFile::Family { name, family })
    } else {
        Ok(FieldFile::Field {
            name,
            field: blocks[Slot::Plain as usize].build()?,
        })
    }
}

fn exponent(s: &str) -> Result<u32, String> {
    s.parse().map_err(|_| format!("`{s}` is not a nonnegative integer exponent"))
}

fn real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a finite real")),
    }
}

/// Writes a field back in file syntax, one nonzero term per line, sorted.
pub struct Terms<'a>(pub &'a PolyVectorField);

impl fmt::Display for Terms<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (comp, i, j, c) in self.0.coefficients() {
            let tag = if comp == 0 { 'u' } else { 'v' };
            writeln!(f, "{tag} {i} {j} {c:e}")?;
        }
        Ok(())
    }
}
