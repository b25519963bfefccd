//! CPE 2.3 formatted-string parsing.
//!
//! A formatted string has exactly 13 colon-separated fields:
//! `cpe:2.3:part:vendor:product:version:update:edition:language:sw_edition:target_sw:target_hw:other`.
//! Field values may contain escaped characters (`\:` in particular), so the
//! split has to be escape-aware. Fields are kept in their raw (escaped) form
//! so that re-serialising a parsed string is byte-identical to the input.

use std::fmt;

/// Number of colon-separated fields in a formatted string, including the
/// leading `cpe` and `2.3` markers.
const FIELD_COUNT: usize = 13;

/// A parsed CPE 2.3 formatted string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cpe {
    // The eleven value fields after `cpe:2.3`, raw (still escaped).
    fields: [String; FIELD_COUNT - 2],
}

/// Attribute positions within the value fields of a formatted string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpeAttribute {
    Part = 0,
    Vendor = 1,
    Product = 2,
    Version = 3,
    Update = 4,
    Edition = 5,
    Language = 6,
    SwEdition = 7,
    TargetSw = 8,
    TargetHw = 9,
    Other = 10,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CpeError {
    #[error("CPE formatted string must begin with `cpe:2.3:`")]
    BadPrefix,
    #[error("CPE formatted string must have {FIELD_COUNT} colon-separated fields, found {0}")]
    FieldCount(usize),
    #[error("CPE part must be one of a, h, o, * or -, found `{0}`")]
    BadPart(String),
    #[error("CPE field {0} is empty")]
    EmptyField(usize),
    #[error("CPE field {0} contains whitespace")]
    Whitespace(usize),
    #[error("CPE formatted string ends with a dangling escape")]
    DanglingEscape,
}

impl Cpe {
    /// Parses a CPE 2.3 formatted string. The raw field text is preserved, so
    /// [`Cpe::to_formatted_string`] returns the input bytes unchanged.
    pub fn parse(input: &str) -> Result<Self, CpeError> {
        let raw = split_escaped(input)?;
        if raw.len() != FIELD_COUNT {
            return Err(CpeError::FieldCount(raw.len()));
        }
        if raw[0] != "cpe" || raw[1] != "2.3" {
            return Err(CpeError::BadPrefix);
        }
        match raw[2].as_str() {
            "a" | "h" | "o" | "*" | "-" => {}
            other => return Err(CpeError::BadPart(other.to_string())),
        }
        for (i, field) in raw.iter().enumerate().skip(2) {
            if field.is_empty() {
                return Err(CpeError::EmptyField(i));
            }
            if field.chars().any(char::is_whitespace) {
                return Err(CpeError::Whitespace(i));
            }
        }
        let mut fields: [String; FIELD_COUNT - 2] = Default::default();
        for (slot, value) in fields.iter_mut().zip(raw.into_iter().skip(2)) {
            *slot = value;
        }
        Ok(Cpe { fields })
    }

    /// Raw (escaped) text of one attribute.
    pub fn attribute(&self, attr: CpeAttribute) -> &str {
        &self.fields[attr as usize]
    }

    pub fn to_formatted_string(&self) -> String {
        let mut out = String::from("cpe:2.3");
        for field in &self.fields {
            out.push(':');
            out.push_str(field);
        }
        out
    }
}

impl fmt::Display for Cpe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_formatted_string())
    }
}

impl std::str::FromStr for Cpe {
    type Err = CpeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Cpe::parse(s)
    }
}

// Splits on `:` while treating `\x` as an opaque two-character sequence.
fn split_escaped(input: &str) -> Result<Vec<String>, CpeError> {
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut chars = input.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                let escaped = chars.next().ok_or(CpeError::DanglingEscape)?;
                current.push('\\');
                current.push(escaped);
            }
            ':' => fields.push(std::mem::take(&mut current)),
            other => current.push(other),
        }
    }
    fields.push(current);
    Ok(fields)
}
