//! Binary and many-valued contexts, their file formats, and binarization.
//!
//! Binary contexts are read and written in the Burmeister CXT format:
//!
//! ```text
//! B
//!
//! 2
//! 2
//!
//! o1
//! o2
//! a1
//! a2
//! X.
//! .X
//! ```
//!
//! Many-valued contexts use a header CSV whose first row holds the attribute
//! names (after an ignored corner cell) and whose remaining rows hold an
//! object name followed by one membership degree in `[0, 1]` per attribute.

use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bitset::BitSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameKind {
    Object,
    Attribute,
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameKind::Object => f.write_str("object"),
            NameKind::Attribute => f.write_str("attribute"),
        }
    }
}

fn at(line: &Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

/// Errors raised while building or parsing a context. `line` is 1-based and
/// absent for contexts built in memory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContextError {
    #[error("{}malformed header: {reason}", at(line))]
    MalformedHeader { line: Option<usize>, reason: String },
    #[error("{}dimension mismatch: {reason}", at(line))]
    DimensionMismatch { line: Option<usize>, reason: String },
    #[error("{}duplicate {kind} name {name:?}", at(line))]
    DuplicateName {
        line: Option<usize>,
        kind: NameKind,
        name: String,
    },
    #[error("{}empty {kind} name", at(line))]
    EmptyName { line: Option<usize>, kind: NameKind },
    #[error("{}illegal incidence character {found:?} at column {column}", at(line))]
    IllegalCharacter {
        line: Option<usize>,
        column: usize,
        found: char,
    },
    #[error("{}non-numeric value {value:?}", at(line))]
    NonNumeric { line: Option<usize>, value: String },
    #[error("{}value outside [0,1]: {value}", at(line))]
    ValueOutOfRange { line: Option<usize>, value: f64 },
    #[error("threshold {0} outside [0,1]")]
    ThresholdOutOfRange(f64),
    #[error("{}csv: {message}", at(line))]
    Csv { line: Option<usize>, message: String },
}

fn check_names(
    names: &[String],
    kind: NameKind,
    first_line: Option<usize>,
) -> Result<(), ContextError> {
    let mut seen = HashSet::with_capacity(names.len());
    for (k, name) in names.iter().enumerate() {
        let line = first_line.map(|l| l + k);
        if name.is_empty() {
            return Err(ContextError::EmptyName { line, kind });
        }
        if !seen.insert(name.as_str()) {
            return Err(ContextError::DuplicateName {
                line,
                kind,
                name: name.clone(),
            });
        }
    }
    Ok(())
}

/// A binary incidence structure over named objects and attributes.
///
/// Rows and columns are both kept as bit sets so that either derivation
/// operator is a sequence of word-wise intersections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    rows: Vec<BitSet>,
    columns: Vec<BitSet>,
}

impl FormalContext {
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: &[Vec<bool>],
    ) -> Result<Self, ContextError> {
        if incidence.len() != objects.len() {
            return Err(ContextError::DimensionMismatch {
                line: None,
                reason: format!(
                    "{} incidence rows for {} objects",
                    incidence.len(),
                    objects.len()
                ),
            });
        }
        let m = attributes.len();
        let mut rows = Vec::with_capacity(objects.len());
        for (i, row) in incidence.iter().enumerate() {
            if row.len() != m {
                return Err(ContextError::DimensionMismatch {
                    line: None,
                    reason: format!("row {i} has {} cells, expected {m}", row.len()),
                });
            }
            let mut bits = BitSet::new(m);
            for (j, &cell) in row.iter().enumerate() {
                if cell {
                    bits.insert(j);
                }
            }
            rows.push(bits);
        }
        Self::from_rows(objects, attributes, rows)
    }

    /// Builds a context from row bit sets, each over the attribute universe.
    pub fn from_rows(
        objects: Vec<String>,
        attributes: Vec<String>,
        rows: Vec<BitSet>,
    ) -> Result<Self, ContextError> {
        check_names(&objects, NameKind::Object, None)?;
        check_names(&attributes, NameKind::Attribute, None)?;
        if rows.len() != objects.len() || rows.iter().any(|r| r.universe() != attributes.len()) {
            return Err(ContextError::DimensionMismatch {
                line: None,
                reason: "row sets do not match the name lists".into(),
            });
        }
        Ok(Self::assemble(objects, attributes, rows))
    }

    fn assemble(objects: Vec<String>, attributes: Vec<String>, rows: Vec<BitSet>) -> Self {
        let mut columns = vec![BitSet::new(objects.len()); attributes.len()];
        for (i, row) in rows.iter().enumerate() {
            for j in row {
                columns[j].insert(i);
            }
        }
        FormalContext {
            objects,
            attributes,
            rows,
            columns,
        }
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn incidence(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].contains(attribute)
    }

    /// Attributes of one object.
    pub fn row(&self, object: usize) -> &BitSet {
        &self.rows[object]
    }

    /// Objects having one attribute.
    pub fn column(&self, attribute: usize) -> &BitSet {
        &self.columns[attribute]
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == name)
    }

    /// Number of incident (object, attribute) pairs.
    pub fn density(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum()
    }
}

/// Parses a Burmeister CXT document.
///
/// Accepts LF or CRLF line endings, an arbitrary context name on line 2,
/// lowercase `x` in rows and trailing blank lines; everything else is strict.
pub fn parse_cxt(text: &str) -> Result<FormalContext, ContextError> {
    let lines: Vec<&str> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    let get = |idx: usize| lines.get(idx).copied();
    let header = |idx: usize, reason: &str| ContextError::MalformedHeader {
        line: Some(idx + 1),
        reason: reason.to_string(),
    };

    match get(0) {
        Some(l) if l.trim() == "B" => {}
        _ => return Err(header(0, "expected \"B\"")),
    }
    if get(1).is_none() {
        return Err(header(1, "unexpected end of input"));
    }
    let count = |idx: usize, what: &str| -> Result<usize, ContextError> {
        let l = get(idx).ok_or_else(|| header(idx, "unexpected end of input"))?;
        l.trim()
            .parse::<usize>()
            .map_err(|_| header(idx, &format!("{what} count {:?} is not a number", l.trim())))
    };
    let n = count(2, "object")?;
    let m = count(3, "attribute")?;
    match get(4) {
        Some(l) if l.trim().is_empty() => {}
        Some(_) => return Err(header(4, "expected an empty line")),
        None => return Err(header(4, "unexpected end of input")),
    }

    let mut cursor = 5;
    let mut take_names = |count: usize, kind: NameKind| -> Result<Vec<String>, ContextError> {
        let first = cursor;
        let mut names = Vec::with_capacity(count);
        for _ in 0..count {
            let l = get(cursor).ok_or_else(|| ContextError::DimensionMismatch {
                line: Some(cursor + 1),
                reason: format!("expected {count} {kind} names, input ended"),
            })?;
            names.push(l.to_string());
            cursor += 1;
        }
        check_names(&names, kind, Some(first + 1))?;
        Ok(names)
    };
    let objects = take_names(n, NameKind::Object)?;
    let attributes = take_names(m, NameKind::Attribute)?;

    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let line = cursor + 1;
        let l = get(cursor).ok_or_else(|| ContextError::DimensionMismatch {
            line: Some(line),
            reason: format!("expected {n} incidence rows, found {i}"),
        })?;
        let mut bits = BitSet::new(m);
        let mut width = 0;
        for (j, c) in l.chars().enumerate() {
            match c {
                'X' | 'x' if j < m => {
                    bits.insert(j);
                }
                '.' if j < m => {}
                'X' | 'x' | '.' => {}
                other => {
                    return Err(ContextError::IllegalCharacter {
                        line: Some(line),
                        column: j + 1,
                        found: other,
                    })
                }
            }
            width += 1;
        }
        if width != m {
            return Err(ContextError::DimensionMismatch {
                line: Some(line),
                reason: format!("row has {width} cells, expected {m}"),
            });
        }
        rows.push(bits);
        cursor += 1;
    }

    if let Some(extra) = lines[cursor.min(lines.len())..]
        .iter()
        .position(|l| !l.trim().is_empty())
    {
        return Err(ContextError::DimensionMismatch {
            line: Some(cursor + extra + 1),
            reason: format!("content after the {n} declared rows"),
        });
    }

    Ok(FormalContext::assemble(objects, attributes, rows))
}

/// Writes the canonical CXT form: empty name line, LF endings, uppercase `X`,
/// trailing newline.
pub fn serialize_cxt(ctx: &FormalContext) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "B\n\n{}\n{}\n\n",
        ctx.object_count(),
        ctx.attribute_count()
    );
    for name in ctx.objects.iter().chain(&ctx.attributes) {
        out.push_str(name);
        out.push('\n');
    }
    for row in &ctx.rows {
        out.extend((0..ctx.attribute_count()).map(|j| if row.contains(j) { 'X' } else { '.' }));
        out.push('\n');
    }
    out
}

/// A context whose incidence is a membership degree in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyValuedContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl ManyValuedContext {
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self, ContextError> {
        check_names(&objects, NameKind::Object, None)?;
        check_names(&attributes, NameKind::Attribute, None)?;
        if values.len() != objects.len() {
            return Err(ContextError::DimensionMismatch {
                line: None,
                reason: format!("{} value rows for {} objects", values.len(), objects.len()),
            });
        }
        for row in &values {
            if row.len() != attributes.len() {
                return Err(ContextError::DimensionMismatch {
                    line: None,
                    reason: format!("row has {} values, expected {}", row.len(), attributes.len()),
                });
            }
            if let Some(&value) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(ContextError::ValueOutOfRange { line: None, value });
            }
        }
        Ok(ManyValuedContext {
            objects,
            attributes,
            values,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn value(&self, object: usize, attribute: usize) -> f64 {
        self.values[object][attribute]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Smallest strictly positive entry, if any.
    pub fn min_positive(&self) -> Option<f64> {
        self.values
            .iter()
            .flatten()
            .copied()
            .filter(|&v| v > 0.0)
            .min_by(f64::total_cmp)
    }

    pub fn max_value(&self) -> Option<f64> {
        self.values.iter().flatten().copied().max_by(f64::total_cmp)
    }
}

/// A binary context read as degrees 0 and 1.
impl From<&FormalContext> for ManyValuedContext {
    fn from(ctx: &FormalContext) -> Self {
        let values = (0..ctx.object_count())
            .map(|i| {
                (0..ctx.attribute_count())
                    .map(|j| if ctx.incidence(i, j) { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        ManyValuedContext {
            objects: ctx.objects.clone(),
            attributes: ctx.attributes.clone(),
            values,
        }
    }
}

pub fn parse_mv_csv(text: &str) -> Result<ManyValuedContext, ContextError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let csv_err = |e: csv::Error| ContextError::Csv {
        line: e.position().map(|p| p.line() as usize),
        message: e.to_string(),
    };

    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(csv_err)?,
        None => {
            return Err(ContextError::MalformedHeader {
                line: Some(1),
                reason: "missing attribute header row".into(),
            })
        }
    };
    let attributes: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    check_names(&attributes, NameKind::Attribute, None).map_err(|e| match e {
        ContextError::DuplicateName { kind, name, .. } => ContextError::DuplicateName {
            line: Some(1),
            kind,
            name,
        },
        ContextError::EmptyName { kind, .. } => ContextError::EmptyName {
            line: Some(1),
            kind,
        },
        other => other,
    })?;

    let mut objects = Vec::new();
    let mut values = Vec::new();
    let mut seen = HashSet::new();
    for record in records {
        let record = record.map_err(csv_err)?;
        let line = record.position().map(|p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != attributes.len() + 1 {
            return Err(ContextError::DimensionMismatch {
                line,
                reason: format!(
                    "ragged row: {} cells, expected {}",
                    record.len(),
                    attributes.len() + 1
                ),
            });
        }
        let name = record[0].to_string();
        if name.is_empty() {
            return Err(ContextError::EmptyName {
                line,
                kind: NameKind::Object,
            });
        }
        if !seen.insert(name.clone()) {
            return Err(ContextError::DuplicateName {
                line,
                kind: NameKind::Object,
                name,
            });
        }
        let mut row = Vec::with_capacity(attributes.len());
        for cell in record.iter().skip(1) {
            let value: f64 = cell.parse().map_err(|_| ContextError::NonNumeric {
                line,
                value: cell.to_string(),
            })?;
            if !(0.0..=1.0).contains(&value) {
                return Err(ContextError::ValueOutOfRange { line, value });
            }
            row.push(value);
        }
        objects.push(name);
        values.push(row);
    }

    Ok(ManyValuedContext {
        objects,
        attributes,
        values,
    })
}

pub fn serialize_mv_csv(mv: &ManyValuedContext) -> String {
    let mut out = String::new();
    for a in &mv.attributes {
        out.push(',');
        out.push_str(a);
    }
    out.push('\n');
    for (name, row) in mv.objects.iter().zip(&mv.values) {
        out.push_str(name);
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub(crate) fn check_theta(theta: f64) -> Result<(), ContextError> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(ContextError::ThresholdOutOfRange(theta))
    }
}

/// Binarizes with an inclusive cut: a cell is incident iff its degree is
/// at least `theta`.
pub fn threshold(mv: &ManyValuedContext, theta: f64) -> Result<FormalContext, ContextError> {
    check_theta(theta)?;
    let m = mv.attribute_count();
    let rows = mv
        .values
        .iter()
        .map(|row| {
            let mut bits = BitSet::new(m);
            for (j, &v) in row.iter().enumerate() {
                if v >= theta {
                    bits.insert(j);
                }
            }
            bits
        })
        .collect();
    Ok(FormalContext::assemble(
        mv.objects.clone(),
        mv.attributes.clone(),
        rows,
    ))
}
