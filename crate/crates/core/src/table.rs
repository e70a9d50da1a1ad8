//! CSV ingestion and validation for observation tables and importance vectors.
//!
//! Column order of the data file is the canonical feature index. Importance
//! vectors are reordered to it by [`align`]. Nothing is imputed or repaired:
//! any invariant violation is an error.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use crate::error::{PieError, Result};

/// An n×m matrix of finite reals with named columns and optional row ids.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTable {
    column_names: Vec<String>,
    // row-major, n * m
    values: Vec<f64>,
    n_rows: usize,
    row_ids: Option<Vec<String>>,
}

impl ObservationTable {
    pub fn new(
        column_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        row_ids: Option<Vec<String>>,
    ) -> Result<Self> {
        let m = column_names.len();
        let n = rows.len();
        if m == 0 {
            return Err(PieError::Empty("table has no feature columns"));
        }
        if n == 0 {
            return Err(PieError::Empty("table has no data rows"));
        }
        check_unique(&column_names).map_err(PieError::DuplicateColumn)?;
        if let Some(ids) = &row_ids {
            if ids.len() != n {
                return Err(PieError::DimensionMismatch {
                    expected: n,
                    found: ids.len(),
                });
            }
        }
        let mut values = Vec::with_capacity(n * m);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != m {
                return Err(PieError::Ragged {
                    row: i + 1,
                    expected: m,
                    found: row.len(),
                });
            }
            for (k, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(PieError::NonFinite {
                        row: i + 1,
                        column: k + 1,
                        name: column_names[k].clone(),
                        value: v.to_string(),
                    });
                }
            }
            values.extend(row);
        }
        Ok(Self {
            column_names,
            values,
            n_rows: n,
            row_ids,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.column_names.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn row_ids(&self) -> Option<&[String]> {
        self.row_ids.as_deref()
    }

    /// Id of row `i`: the stored id, or the 1-based row number.
    pub fn row_label(&self, i: usize) -> String {
        match &self.row_ids {
            Some(ids) => ids[i].clone(),
            None => (i + 1).to_string(),
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.n_cols();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols())
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.n_cols() + k]
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows().map(|r| r[k]).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    /// Splits off one column, returning the remaining table and that column.
    pub fn split_column(&self, name: &str) -> Result<(ObservationTable, Vec<f64>)> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| PieError::UnknownColumn(name.to_string()))?;
        let names: Vec<String> = self
            .column_names
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != idx)
            .map(|(_, c)| c.clone())
            .collect();
        let rows = self
            .rows()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != idx)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let table = ObservationTable::new(names, rows, self.row_ids.clone())?;
        Ok((table, self.column(idx)))
    }

    pub(crate) fn from_parts_unchecked(
        column_names: Vec<String>,
        values: Vec<f64>,
        n_rows: usize,
        row_ids: Option<Vec<String>>,
    ) -> Self {
        debug_assert_eq!(values.len(), n_rows * column_names.len());
        Self {
            column_names,
            values,
            n_rows,
            row_ids,
        }
    }
}

/// A global importance vector β aligned to feature names.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureImportance {
    column_names: Vec<String>,
    beta: Vec<f64>,
}

impl FeatureImportance {
    pub fn new(column_names: Vec<String>, beta: Vec<f64>) -> Result<Self> {
        if column_names.len() != beta.len() {
            return Err(PieError::DimensionMismatch {
                expected: column_names.len(),
                found: beta.len(),
            });
        }
        if beta.is_empty() {
            return Err(PieError::Empty("importance vector has no features"));
        }
        check_unique(&column_names).map_err(PieError::DuplicateFeature)?;
        if let Some(k) = beta.iter().position(|b| !b.is_finite()) {
            return Err(PieError::NonFinite {
                row: k + 1,
                column: 2,
                name: column_names[k].clone(),
                value: beta[k].to_string(),
            });
        }
        Ok(Self { column_names, beta })
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }
}

fn check_unique(names: &[String]) -> std::result::Result<(), String> {
    let mut seen = HashSet::with_capacity(names.len());
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(n.clone());
        }
    }
    Ok(())
}

/// Parses one numeric cell. `str::parse::<f64>` is locale independent and
/// only accepts a period as decimal separator.
fn parse_cell(raw: &str, row: usize, column: usize, name: &str) -> Result<f64> {
    let s = raw.trim();
    if s.is_empty() {
        return Err(PieError::MissingCell {
            row,
            column,
            name: name.to_string(),
        });
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(PieError::NonFinite {
            row,
            column,
            name: name.to_string(),
            value: s.to_string(),
        }),
        Err(_) => Err(PieError::ParseCell {
            row,
            column,
            name: name.to_string(),
            value: s.to_string(),
        }),
    }
}

fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source)
}

/// Reads a feature table. When `has_row_ids` is set, the first column holds
/// row identifiers and is not a feature.
///
/// Row numbers in errors are 1-based data rows (the header is not counted);
/// column numbers are 1-based positions in the file.
pub fn load_table<R: Read>(source: R, has_row_ids: bool) -> Result<ObservationTable> {
    let mut reader = csv_reader(source);
    let mut records = reader.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(PieError::Empty("file is empty")),
    };
    let width = header.len();
    let skip = usize::from(has_row_ids);
    let names: Vec<String> = header
        .iter()
        .skip(skip)
        .map(|s| s.trim().to_string())
        .collect();
    if names.is_empty() {
        return Err(PieError::Empty("table has no feature columns"));
    }
    check_unique(&names).map_err(PieError::DuplicateColumn)?;

    let mut rows = Vec::new();
    let mut ids = has_row_ids.then(Vec::new);
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        let row_no = i + 1;
        if rec.len() != width {
            return Err(PieError::Ragged {
                row: row_no,
                expected: width,
                found: rec.len(),
            });
        }
        if let Some(ids) = ids.as_mut() {
            ids.push(rec[0].trim().to_string());
        }
        let row = rec
            .iter()
            .skip(skip)
            .enumerate()
            .map(|(k, cell)| parse_cell(cell, row_no, k + skip + 1, &names[k]))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    ObservationTable::new(names, rows, ids)
}

/// Writes a table in the format accepted by [`load_table`]. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_table<W: Write>(table: &ObservationTable, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header: Vec<&str> = Vec::with_capacity(table.n_cols() + 1);
    if table.row_ids.is_some() {
        header.push("id");
    }
    header.extend(table.column_names.iter().map(String::as_str));
    w.write_record(&header)?;
    for (i, row) in table.rows().enumerate() {
        let mut rec: Vec<String> = Vec::with_capacity(row.len() + 1);
        if let Some(ids) = &table.row_ids {
            rec.push(ids[i].clone());
        }
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an importance file with the exact header `feature,importance`.
pub fn load_importance<R: Read>(source: R) -> Result<FeatureImportance> {
    let mut reader = csv_reader(source);
    let mut records = reader.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(PieError::Empty("importance file is empty")),
    };
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    if cols != ["feature", "importance"] {
        return Err(PieError::BadImportanceHeader(cols.join(",")));
    }
    let mut names = Vec::new();
    let mut beta = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        let row_no = i + 1;
        if rec.len() != 2 {
            return Err(PieError::Ragged {
                row: row_no,
                expected: 2,
                found: rec.len(),
            });
        }
        let name = rec[0].trim().to_string();
        if name.is_empty() {
            return Err(PieError::MissingCell {
                row: row_no,
                column: 1,
                name: "feature".to_string(),
            });
        }
        beta.push(parse_cell(&rec[1], row_no, 2, &name)?);
        names.push(name);
    }
    FeatureImportance::new(names, beta)
}

/// Writes an importance vector with full round-trip precision.
pub fn write_importance<W: Write>(imp: &FeatureImportance, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["feature", "importance"])?;
    for (name, b) in imp.column_names.iter().zip(&imp.beta) {
        w.write_record([name.as_str(), &b.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reorders `imp` to the table's column order. Both name sets must match.
pub fn align(imp: &FeatureImportance, table: &ObservationTable) -> Result<FeatureImportance> {
    let lookup: HashMap<&str, f64> = imp
        .column_names
        .iter()
        .map(String::as_str)
        .zip(imp.beta.iter().copied())
        .collect();
    let missing: Vec<String> = table
        .column_names
        .iter()
        .filter(|c| !lookup.contains_key(c.as_str()))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(PieError::MissingFeatures(missing));
    }
    let in_table: HashSet<&str> = table.column_names.iter().map(String::as_str).collect();
    let unknown: Vec<String> = imp
        .column_names
        .iter()
        .filter(|c| !in_table.contains(c.as_str()))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(PieError::UnknownFeatures(unknown));
    }
    let beta = table
        .column_names
        .iter()
        .map(|c| lookup[c.as_str()])
        .collect();
    Ok(FeatureImportance {
        column_names: table.column_names.clone(),
        beta,
    })
}
