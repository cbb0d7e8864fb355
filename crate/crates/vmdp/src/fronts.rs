//! Reading and writing front CSV files.
//!
//! Each row is one vector of a front. The exact rational and its
//! rounded decimal rendering sit in adjacent columns, so the files are
//! machine-exact yet easy to eyeball:
//!
//! ```text
//! objective_1_exact,objective_1_rounded,objective_2_exact,objective_2_rounded
//! 47/2,23.5,31/2,15.5
//! ```
//!
//! An optional trailing `generator_action` column records which action
//! produced each vector. The parser is total: any input is either
//! accepted or mapped to a [`FrontCsvError`], never a panic, and every
//! rounded entry must agree with its exact neighbor at the precision it
//! is written with.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::model::RewardVector;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontRow {
    pub exact: RewardVector,
    /// Rounded renderings, verbatim as they appear in the file.
    pub rounded: Vec<String>,
    pub generator_action: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontCsv {
    pub objectives: usize,
    pub has_generator_column: bool,
    pub rows: Vec<FrontRow>,
}

impl FrontCsv {
    pub fn exact_vectors(&self) -> Vec<RewardVector> {
        self.rows.iter().map(|r| r.exact.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontCsvError {
    #[error("file is empty")]
    Empty,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

fn malformed(line: usize, reason: impl Into<String>) -> FrontCsvError {
    FrontCsvError::Malformed { line, reason: reason.into() }
}

/// Renders a front. `actions[i]`, when given, becomes the
/// `generator_action` of row `i`; pass an empty string for rows without
/// one (terminal fronts).
pub fn render_front_csv(vectors: &[RewardVector], places: u32, actions: Option<&[String]>) -> String {
    let m = vectors.first().map_or(0, |v| v.len());
    let mut out = String::new();
    let mut header: Vec<String> = Vec::new();
    for i in 1..=m {
        header.push(format!("objective_{i}_exact"));
        header.push(format!("objective_{i}_rounded"));
    }
    if actions.is_some() {
        header.push("generator_action".into());
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, v) in vectors.iter().enumerate() {
        let mut fields: Vec<String> = Vec::new();
        for c in v.components() {
            fields.push(c.to_string());
            fields.push(c.decimal_string(places));
        }
        if let Some(actions) = actions {
            fields.push(escape_field(&actions[i]));
        }
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

fn escape_field(field: &str) -> String {
    let needs_quotes = field.contains([',', '"', '\n', '\r'])
        || field.starts_with(' ')
        || field.ends_with(' ');
    if needs_quotes {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Parses a front file, checking the header shape, the field arity of
/// every row, that exact entries are rationals, and that each rounded
/// entry reproduces its exact neighbor when rounded to the precision it
/// is written with.
pub fn parse_front_csv(text: &str) -> Result<FrontCsv, FrontCsvError> {
    let records = split_records(text)?;
    let mut records = records.into_iter();
    let (header_line, header) = records.next().ok_or(FrontCsvError::Empty)?;
    let (objectives, has_generator_column) = check_header(header_line, &header)?;

    let width = header.len();
    let mut rows = Vec::new();
    for (line, fields) in records {
        if fields.len() != width {
            return Err(malformed(line, format!("expected {} fields, found {}", width, fields.len())));
        }
        let mut exact = Vec::with_capacity(objectives);
        let mut rounded = Vec::with_capacity(objectives);
        for i in 0..objectives {
            let exact_text = &fields[2 * i];
            let rounded_text = &fields[2 * i + 1];
            let value = Rational::from_str(exact_text)
                .map_err(|e| malformed(line, format!("objective {} exact entry {exact_text:?}: {e}", i + 1)))?;
            let shown = Rational::from_str(rounded_text)
                .map_err(|e| malformed(line, format!("objective {} rounded entry {rounded_text:?}: {e}", i + 1)))?;
            let places = decimal_places(rounded_text);
            if value.round_dp(places) != shown {
                return Err(malformed(
                    line,
                    format!(
                        "objective {} rounded entry {rounded_text:?} disagrees with exact value {exact_text}",
                        i + 1
                    ),
                ));
            }
            exact.push(value);
            rounded.push(rounded_text.clone());
        }
        let generator_action = has_generator_column.then(|| fields[width - 1].clone());
        rows.push(FrontRow { exact: RewardVector::new(exact), rounded, generator_action });
    }
    Ok(FrontCsv { objectives, has_generator_column, rows })
}

fn check_header(line: usize, header: &[String]) -> Result<(usize, bool), FrontCsvError> {
    let has_generator = header.last().map(String::as_str) == Some("generator_action");
    let value_columns = if has_generator { header.len() - 1 } else { header.len() };
    if value_columns == 0 || value_columns % 2 != 0 {
        return Err(malformed(line, "header must pair objective_<i>_exact with objective_<i>_rounded"));
    }
    let objectives = value_columns / 2;
    for i in 0..objectives {
        let exact = format!("objective_{}_exact", i + 1);
        let rounded = format!("objective_{}_rounded", i + 1);
        if header[2 * i] != exact || header[2 * i + 1] != rounded {
            return Err(malformed(
                line,
                format!("expected columns {exact},{rounded}, found {},{}", header[2 * i], header[2 * i + 1]),
            ));
        }
    }
    Ok((objectives, has_generator))
}

fn decimal_places(text: &str) -> u32 {
    match text.trim().split_once('.') {
        Some((_, frac)) => frac.len() as u32,
        None => 0,
    }
}

/// Splits CSV text into records of fields, honoring quoted fields
/// (doubled quotes escape a quote; quoted fields may contain commas and
/// newlines). Returns each record with the line it starts on.
fn split_records(text: &str) -> Result<Vec<(usize, Vec<String>)>, FrontCsvError> {
    let mut records = Vec::new();
    let mut fields: Vec<String> = Vec::new();
    let mut field = String::new();
    let mut field_started = false;
    let mut line = 1;
    let mut record_line = 1;
    let mut chars = text.chars().peekable();

    #[derive(PartialEq)]
    enum Mode {
        Plain,
        Quoted,
        QuoteClosed,
    }
    let mut mode = Mode::Plain;

    macro_rules! end_field {
        () => {{
            fields.push(std::mem::take(&mut field));
            field_started = false;
            mode = Mode::Plain;
        }};
    }

    while let Some(c) = chars.next() {
        match mode {
            Mode::Quoted => match c {
                '"' => {
                    if chars.peek() == Some(&'"') {
                        chars.next();
                        field.push('"');
                    } else {
                        mode = Mode::QuoteClosed;
                    }
                }
                '\n' => {
                    field.push(c);
                    line += 1;
                }
                _ => field.push(c),
            },
            Mode::Plain | Mode::QuoteClosed => match c {
                ',' => end_field!(),
                '\r' => {
                    if chars.peek() == Some(&'\n') {
                        chars.next();
                    } else {
                        return Err(malformed(line, "bare carriage return"));
                    }
                    end_field!();
                    records.push((record_line, std::mem::take(&mut fields)));
                    line += 1;
                    record_line = line;
                }
                '\n' => {
                    end_field!();
                    records.push((record_line, std::mem::take(&mut fields)));
                    line += 1;
                    record_line = line;
                }
                '"' if mode == Mode::Plain && !field_started => {
                    mode = Mode::Quoted;
                    field_started = true;
                }
                '"' => return Err(malformed(line, "stray quote inside a field")),
                _ if mode == Mode::QuoteClosed => {
                    return Err(malformed(line, "text after a closing quote"))
                }
                _ => {
                    field.push(c);
                    field_started = true;
                }
            },
        }
    }
    if mode == Mode::Quoted {
        return Err(malformed(record_line, "unterminated quoted field"));
    }
    if field_started || !fields.is_empty() || mode == Mode::QuoteClosed {
        fields.push(field);
        records.push((record_line, fields));
    }
    Ok(records)
}
