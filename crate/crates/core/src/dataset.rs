//! Immutable typed columnar tables ingested from delimited text.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Rows sampled into the content fingerprint.
const FINGERPRINT_SAMPLE_ROWS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub null_token: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            has_header: true,
            null_token: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    /// Invalid slots hold `0.0`; consult the validity flags.
    Numeric(Vec<f64>),
    /// Codes index `dictionary`, which is in first-seen order and has no unused entries.
    Categorical {
        codes: Vec<u32>,
        dictionary: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    data: ColumnData,
    valid: Vec<bool>,
}

impl Column {
    /// Builds a numeric column; `None` and non-finite values become nulls.
    pub fn numeric(name: impl Into<String>, values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let (data, valid): (Vec<f64>, Vec<bool>) = values
            .into_iter()
            .map(|v| match v {
                Some(x) if x.is_finite() => (x, true),
                _ => (0.0, false),
            })
            .unzip();
        Self {
            name: name.into(),
            data: ColumnData::Numeric(data),
            valid,
        }
    }

    pub fn categorical<S: AsRef<str>>(
        name: impl Into<String>,
        values: impl IntoIterator<Item = Option<S>>,
    ) -> Self {
        let mut lookup: HashMap<String, u32> = HashMap::new();
        let mut dictionary = Vec::new();
        let mut codes = Vec::new();
        let mut valid = Vec::new();
        for v in values {
            match v {
                Some(s) => {
                    let s = s.as_ref();
                    let code = match lookup.get(s) {
                        Some(&c) => c,
                        None => {
                            let c = dictionary.len() as u32;
                            dictionary.push(s.to_string());
                            lookup.insert(s.to_string(), c);
                            c
                        }
                    };
                    codes.push(code);
                    valid.push(true);
                }
                None => {
                    codes.push(0);
                    valid.push(false);
                }
            }
        }
        Self {
            name: name.into(),
            data: ColumnData::Categorical { codes, dictionary },
            valid,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ColumnKind {
        match self.data {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Categorical { .. } => ColumnKind::Categorical,
        }
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.valid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valid.is_empty()
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn is_valid(&self, row: usize) -> bool {
        self.valid[row]
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    pub fn has_nulls(&self) -> bool {
        self.valid.iter().any(|v| !*v)
    }

    /// Raw numeric slots (including zero placeholders at null rows).
    pub fn as_numeric(&self) -> Option<&[f64]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_categorical(&self) -> Option<(&[u32], &[String])> {
        match &self.data {
            ColumnData::Categorical { codes, dictionary } => Some((codes, dictionary)),
            _ => None,
        }
    }

    /// Valid numeric values in row order. Empty for categorical columns.
    pub fn valid_values(&self) -> impl Iterator<Item = f64> + '_ {
        let values = self.as_numeric().unwrap_or(&[]);
        values
            .iter()
            .zip(&self.valid)
            .filter(|(_, ok)| **ok)
            .map(|(x, _)| *x)
    }

    /// Token for a row as it would be written back out; `None` for nulls.
    pub fn token(&self, row: usize) -> Option<String> {
        if !self.valid[row] {
            return None;
        }
        Some(match &self.data {
            ColumnData::Numeric(v) => v[row].to_string(),
            ColumnData::Categorical { codes, dictionary } => {
                dictionary[codes[row] as usize].clone()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    n_rows: usize,
    columns: Vec<Column>,
    index: HashMap<String, usize>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, Column::len);
        let mut index = HashMap::with_capacity(columns.len());
        for (i, c) in columns.iter().enumerate() {
            if c.len() != n_rows {
                return Err(Error::RaggedRow {
                    row: n_rows.min(c.len()),
                    expected: n_rows,
                    found: c.len(),
                });
            }
            if index.insert(c.name.clone(), i).is_some() {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Self {
            name: name.into(),
            n_rows,
            columns,
            index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, idx: usize) -> &Column {
        &self.columns[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn column_by_name(&self, name: &str) -> Option<&Column> {
        self.index_of(name).map(|i| &self.columns[i])
    }

    pub fn indices_of_kind(&self, kind: ColumnKind) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&i| self.columns[i].kind() == kind)
            .collect()
    }

    /// 64-bit content digest over names, kinds, row count and a sample of values.
    ///
    /// Detects accidental mismatches only; it is not a tamper-proof hash of all data.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        h.update((self.n_rows as u64).to_le_bytes());
        for c in &self.columns {
            h.update((c.name.len() as u64).to_le_bytes());
            h.update(c.name.as_bytes());
            h.update([c.kind() as u8]);
        }
        let step = (self.n_rows / FINGERPRINT_SAMPLE_ROWS).max(1);
        for row in (0..self.n_rows).step_by(step) {
            for c in &self.columns {
                if !c.valid[row] {
                    h.update([0u8]);
                    continue;
                }
                match &c.data {
                    ColumnData::Numeric(v) => {
                        h.update([1u8]);
                        h.update(v[row].to_bits().to_le_bytes());
                    }
                    ColumnData::Categorical { codes, dictionary } => {
                        let s = &dictionary[codes[row] as usize];
                        h.update([2u8]);
                        h.update((s.len() as u64).to_le_bytes());
                        h.update(s.as_bytes());
                    }
                }
            }
        }
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("sha256 has 32 bytes"))
    }

    pub fn fingerprint_hex(&self) -> String {
        format!("{:016x}", self.fingerprint())
    }
}

fn parse_real(token: &str) -> Option<f64> {
    token.trim().parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Reads delimited text into a [`Dataset`].
///
/// A column is numeric iff every non-null token parses as a finite real.
pub fn ingest_csv<R: Read>(name: &str, source: R, options: &CsvOptions) -> Result<Dataset> {
    ingest(name, source, options, None)
}

/// Like [`ingest_csv`] but with column kinds given instead of inferred.
pub fn ingest_csv_with_kinds<R: Read>(
    name: &str,
    source: R,
    options: &CsvOptions,
    kinds: &[ColumnKind],
) -> Result<Dataset> {
    ingest(name, source, options, Some(kinds))
}

fn ingest<R: Read>(
    name: &str,
    source: R,
    options: &CsvOptions,
    kinds: Option<&[ColumnKind]>,
) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(source);

    let mut records = reader.records();
    let header: Vec<String> = if options.has_header {
        match records.next() {
            Some(r) => r?.iter().map(str::to_string).collect(),
            None => return Err(Error::EmptyDataset),
        }
    } else {
        Vec::new()
    };

    let mut raw: Vec<Vec<Option<String>>> = Vec::new();
    let mut width = if options.has_header {
        Some(header.len())
    } else {
        None
    };
    for (row, rec) in records.enumerate() {
        let rec = rec?;
        let expected = *width.get_or_insert(rec.len());
        if rec.len() != expected {
            return Err(Error::RaggedRow {
                row,
                expected,
                found: rec.len(),
            });
        }
        if raw.is_empty() {
            raw = vec![Vec::new(); expected];
        }
        for (col, tok) in rec.iter().enumerate() {
            raw[col].push((tok != options.null_token).then(|| tok.to_string()));
        }
    }
    if raw.first().is_none_or(|c| c.is_empty()) {
        return Err(Error::EmptyDataset);
    }

    let names: Vec<String> = if options.has_header {
        header
    } else {
        (0..raw.len()).map(|i| format!("col{i}")).collect()
    };
    let mut seen = HashSet::new();
    for n in &names {
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateColumn(n.clone()));
        }
    }

    if let Some(k) = kinds {
        if k.len() != names.len() {
            return Err(Error::Malformed(format!(
                "{} kinds for {} columns",
                k.len(),
                names.len()
            )));
        }
    }

    let columns = names
        .into_iter()
        .zip(raw)
        .enumerate()
        .map(|(i, (name, tokens))| {
            let all_real = || tokens.iter().flatten().all(|t| parse_real(t).is_some());
            let numeric = match kinds {
                Some(k) if k[i] == ColumnKind::Numeric => {
                    if !all_real() {
                        return Err(Error::Malformed(format!("column `{name}` is not numeric")));
                    }
                    true
                }
                Some(_) => false,
                None => all_real(),
            };
            Ok(if numeric {
                Column::numeric(
                    name,
                    tokens.iter().map(|t| t.as_deref().and_then(parse_real)),
                )
            } else {
                Column::categorical(name, tokens)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(name, columns)
}

/// Writes the dataset back out; nulls become `options.null_token`.
///
/// Numeric values are written in shortest round-trip form, so re-ingesting the
/// output reproduces every value bit for bit.
pub fn write_csv<W: Write>(ds: &Dataset, sink: W, options: &CsvOptions) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(options.delimiter)
        .from_writer(sink);
    if options.has_header {
        w.write_record(ds.columns.iter().map(|c| c.name.as_str()))?;
    }
    let mut row_buf: Vec<String> = Vec::with_capacity(ds.n_cols());
    for row in 0..ds.n_rows {
        row_buf.clear();
        row_buf.extend(
            ds.columns
                .iter()
                .map(|c| c.token(row).unwrap_or_else(|| options.null_token.clone())),
        );
        w.write_record(&row_buf)?;
    }
    w.flush()?;
    Ok(())
}
