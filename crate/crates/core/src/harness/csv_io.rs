//! CSV ingestion and emission.
//!
//! The first row is a header. Missing cells are empty or `NaN`
//! (case-insensitive); every other feature cell must parse as a finite
//! decimal. An optional label column is mapped to dense integer codes in
//! order of first appearance. Emission writes missing cells as empty strings.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::data::{rearrange_columns, Mask, MaskedDataset, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LoadedCsv {
    /// Columns rearranged so fully observed ones come first.
    pub dataset: MaskedDataset,
    /// `permutation[new] = old` column index into `feature_names`.
    pub permutation: Vec<usize>,
    /// Feature column names in file order (label column excluded).
    pub feature_names: Vec<String>,
    pub label_column: Option<String>,
    /// Original label strings, indexed by code.
    pub label_names: Vec<String>,
}

impl LoadedCsv {
    /// Feature names in the dataset's (rearranged) column order.
    pub fn rearranged_names(&self) -> Vec<String> {
        self.permutation
            .iter()
            .map(|&j| self.feature_names[j].clone())
            .collect()
    }

    /// Label strings per row, if a label column was read.
    pub fn label_strings(&self) -> Option<Vec<String>> {
        self.dataset
            .labels()
            .map(|codes| codes.iter().map(|&c| self.label_names[c].clone()).collect())
    }
}

fn is_missing_cell(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("nan")
}

pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<LoadedCsv> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let label_idx = match label_column {
        Some(name) => Some(header.iter().position(|h| h == name).ok_or_else(|| Error::Input {
            path: path.to_owned(),
            message: format!("unknown label column {name:?}"),
        })?),
        None => None,
    };
    let feature_idx: Vec<usize> = (0..header.len()).filter(|&j| Some(j) != label_idx).collect();
    if feature_idx.is_empty() {
        return Err(Error::Input {
            path: path.to_owned(),
            message: "no feature columns".into(),
        });
    }

    let mut values = Vec::new();
    let mut missing = Vec::new();
    let mut codes = Vec::new();
    let mut label_names: Vec<String> = Vec::new();
    let mut code_of: HashMap<String, usize> = HashMap::new();
    let parse_err = |row: usize, column: usize, message: String| Error::Parse {
        path: PathBuf::from(path),
        row,
        column,
        message,
    };

    for (r, record) in reader.records().enumerate() {
        let record = record?;
        // 1-based file line, counting the header
        let line = r + 2;
        for &j in &feature_idx {
            let cell = record.get(j).unwrap_or("");
            if is_missing_cell(cell) {
                values.push(f64::NAN);
                missing.push(true);
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(line, j + 1, format!("non-numeric cell {cell:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(line, j + 1, format!("non-finite cell {cell:?}")));
            }
            values.push(v);
            missing.push(false);
        }
        if let Some(li) = label_idx {
            let cell = record.get(li).unwrap_or("");
            if cell.is_empty() {
                return Err(parse_err(line, li + 1, "empty label".into()));
            }
            let next = code_of.len();
            let code = *code_of.entry(cell.to_owned()).or_insert_with(|| {
                label_names.push(cell.to_owned());
                next
            });
            codes.push(code);
        }
    }

    let rows = missing.len() / feature_idx.len();
    if rows == 0 {
        return Err(Error::Input {
            path: path.to_owned(),
            message: "no data rows".into(),
        });
    }
    let cols = feature_idx.len();
    let data = Matrix::from_row_slice(rows, cols, &values);
    let mask = Mask::from_fn(rows, cols, |i, j| missing[i * cols + j]);
    let (dataset, permutation) = rearrange_columns(&data, &mask)?;
    let labels = label_idx.map(|_| codes);
    let dataset = dataset.with_labels(labels)?;
    log::info!(
        "{}: {rows} rows, {cols} features, q = {}, column permutation {:?}",
        path.display(),
        dataset.q(),
        permutation
    );
    Ok(LoadedCsv {
        dataset,
        permutation,
        feature_names: feature_idx.iter().map(|&j| header[j].clone()).collect(),
        label_column: label_column.map(str::to_owned),
        label_names,
    })
}

/// Writes `data` with `names` as header; masked cells are left empty. Labels,
/// when given, go in a trailing column.
pub fn write_csv(
    path: impl AsRef<Path>,
    names: &[String],
    data: &Matrix,
    mask: Option<&Mask>,
    labels: Option<(&str, &[String])>,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
    if let Some((name, _)) = labels {
        header.push(name);
    }
    writer.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for i in 0..data.nrows() {
        row.clear();
        for j in 0..data.ncols() {
            let missing = mask.is_some_and(|m| m.is_missing(i, j)) || !data[(i, j)].is_finite();
            row.push(if missing {
                String::new()
            } else {
                data[(i, j)].to_string()
            });
        }
        if let Some((_, values)) = labels {
            row.push(values[i].clone());
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a mask sidecar: same header, `1` for missing, `0` for observed.
pub fn write_mask_csv(path: impl AsRef<Path>, names: &[String], mask: &Mask) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(names)?;
    for i in 0..mask.rows() {
        writer.write_record((0..mask.cols()).map(|j| if mask.is_missing(i, j) { "1" } else { "0" }))?;
    }
    writer.flush()?;
    Ok(())
}
