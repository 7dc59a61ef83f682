//! Tabular reservoir data: variable schema, CSV ingestion and the
//! preprocessing transforms (log normalization, period-to-age conversion,
//! min-max scaling).

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural-log offset used when a log-transformed column contains zeros.
pub const DEFAULT_LOG_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Categorical,
    Continuous,
}

/// Column-level preprocessing directive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    None,
    Log,
    PeriodAge,
    LogPeriodAge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub kind: VarKind,
    #[serde(default)]
    pub transform: Transform,
}

impl VariableSpec {
    pub fn categorical(name: &str) -> Self {
        VariableSpec {
            name: name.to_string(),
            kind: VarKind::Categorical,
            transform: Transform::None,
        }
    }

    pub fn continuous(name: &str) -> Self {
        VariableSpec {
            name: name.to_string(),
            kind: VarKind::Continuous,
            transform: Transform::None,
        }
    }
}

/// Ordered variable list. Names are unique; `log` transforms are only valid
/// on continuous variables and `period_age` only on categorical ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<VariableSpec>", into = "Vec<VariableSpec>")]
pub struct Schema {
    vars: Vec<VariableSpec>,
}

impl Schema {
    pub fn new(vars: Vec<VariableSpec>) -> Result<Self> {
        let mut seen = HashSet::new();
        for v in &vars {
            if !seen.insert(v.name.clone()) {
                return Err(Error::Config(format!("duplicate variable '{}'", v.name)));
            }
            match v.transform {
                Transform::Log if v.kind != VarKind::Continuous => {
                    return Err(Error::Config(format!(
                        "log transform on categorical variable '{}'",
                        v.name
                    )));
                }
                Transform::PeriodAge | Transform::LogPeriodAge
                    if v.kind != VarKind::Categorical =>
                {
                    return Err(Error::Config(format!(
                        "period_age transform on continuous variable '{}'",
                        v.name
                    )));
                }
                _ => {}
            }
        }
        Ok(Schema { vars })
    }

    pub fn vars(&self) -> &[VariableSpec] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }
}

impl TryFrom<Vec<VariableSpec>> for Schema {
    type Error = Error;
    fn try_from(vars: Vec<VariableSpec>) -> Result<Self> {
        Schema::new(vars)
    }
}

impl From<Schema> for Vec<VariableSpec> {
    fn from(s: Schema) -> Self {
        s.vars
    }
}

/// One table cell. Empty CSV cells become `Missing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Missing,
    Num(f64),
    Cat(String),
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_cat(&self) -> Option<&str> {
        match self {
            Cell::Cat(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Missing => Ok(()),
            Cell::Num(x) => write!(f, "{x}"),
            Cell::Cat(s) => write!(f, "{s}"),
        }
    }
}

/// Summary statistics over the observed values of a continuous column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl ColumnStats {
    pub fn range(&self) -> f64 {
        self.max - self.min
    }
}

/// Immutable table of reservoir records. Transforms return new datasets;
/// a `Dataset` is safe to share read-only across parallel workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    schema: Schema,
    rows: Vec<Vec<Cell>>,
    stats: Vec<Option<ColumnStats>>,
}

impl Dataset {
    pub fn new(schema: Schema, rows: Vec<Vec<Cell>>) -> Result<Self> {
        for (r, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::Config(format!(
                    "row {r} has {} cells, schema has {} variables",
                    row.len(),
                    schema.len()
                )));
            }
            for (c, cell) in row.iter().enumerate() {
                let ok = match (cell, schema.vars()[c].kind) {
                    (Cell::Missing, _) => true,
                    (Cell::Num(_), VarKind::Continuous) => true,
                    (Cell::Cat(_), VarKind::Categorical) => true,
                    _ => false,
                };
                if !ok {
                    return Err(Error::Config(format!(
                        "row {r}, column '{}': cell type does not match the schema",
                        schema.vars()[c].name
                    )));
                }
            }
        }
        let stats = compute_stats(&schema, &rows);
        Ok(Dataset {
            schema,
            rows,
            stats,
        })
    }

    /// Reads a comma-separated UTF-8 file with a header row. Columns are
    /// matched to schema names by header; extra columns are ignored and
    /// empty cells become missing values.
    pub fn load_csv<P: AsRef<Path>>(path: P, schema: Schema) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_path(path.as_ref())?;
        let headers = reader.headers()?.clone();
        let mut col_of = Vec::with_capacity(schema.len());
        for var in schema.vars() {
            let pos = headers
                .iter()
                .position(|h| h.trim() == var.name)
                .ok_or_else(|| Error::MissingColumn {
                    column: var.name.clone(),
                })?;
            col_of.push(pos);
        }
        let mut rows = Vec::new();
        for (r, record) in reader.records().enumerate() {
            let record = record?;
            let mut row = Vec::with_capacity(schema.len());
            for (var, &pos) in schema.vars().iter().zip(&col_of) {
                let raw = record.get(pos).unwrap_or("").trim();
                let cell = if raw.is_empty() {
                    Cell::Missing
                } else {
                    match var.kind {
                        VarKind::Categorical => Cell::Cat(raw.to_string()),
                        VarKind::Continuous => {
                            let x = raw.parse::<f64>().map_err(|_| Error::BadNumericCell {
                                row: r,
                                column: var.name.clone(),
                                value: raw.to_string(),
                            })?;
                            Cell::Num(x)
                        }
                    }
                };
                row.push(cell);
            }
            rows.push(row);
        }
        Dataset::new(schema, rows)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_vars(&self) -> usize {
        self.schema.len()
    }

    pub fn cell(&self, row: usize, var: usize) -> &Cell {
        &self.rows[row][var]
    }

    pub fn stats(&self, var: usize) -> Option<&ColumnStats> {
        self.stats[var].as_ref()
    }

    pub fn stats_of(&self, name: &str) -> Result<&ColumnStats> {
        let idx = self.schema.index_of(name)?;
        self.stats[idx]
            .as_ref()
            .ok_or_else(|| Error::NotContinuous(name.to_string()))
    }

    /// Observed values of one continuous column.
    pub fn column_values(&self, var: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|row| row[var].as_num())
            .collect()
    }

    /// Sorted unique labels observed in one categorical column.
    pub fn column_labels(&self, var: usize) -> Vec<String> {
        let mut labels: Vec<String> = self
            .rows
            .iter()
            .filter_map(|row| row[var].as_cat().map(str::to_string))
            .collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// Indices of rows with no missing cell in any of the given columns.
    pub fn complete_rows(&self, vars: &[usize]) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| vars.iter().all(|&v| !self.rows[r][v].is_missing()))
            .collect()
    }

    /// New dataset restricted to the given rows (same schema).
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let picked = rows.iter().map(|&r| self.rows[r].clone()).collect();
        let stats = compute_stats(&self.schema, &picked);
        Dataset {
            schema: self.schema.clone(),
            rows: picked,
            stats,
        }
    }

    /// New dataset restricted to the given variables, in the given order.
    pub fn select_vars(&self, names: &[String]) -> Result<Dataset> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.schema.index_of(n))
            .collect::<Result<_>>()?;
        let vars = idx
            .iter()
            .map(|&i| self.schema.vars()[i].clone())
            .collect();
        let schema = Schema::new(vars)?;
        let rows = self
            .rows
            .iter()
            .map(|row| idx.iter().map(|&i| row[i].clone()).collect())
            .collect();
        Dataset::new(schema, rows)
    }

    /// Replaces each observed value x of a continuous column by ln(x + eps).
    /// Negative observed values are rejected; zeros rely on the offset.
    pub fn apply_log(&self, var_name: &str, eps: f64) -> Result<Dataset> {
        let idx = self.schema.index_of(var_name)?;
        if self.schema.vars()[idx].kind != VarKind::Continuous {
            return Err(Error::NotContinuous(var_name.to_string()));
        }
        let mut rows = self.rows.clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if let Cell::Num(x) = row[idx] {
                if x < 0.0 {
                    return Err(Error::NegativeLogInput {
                        column: var_name.to_string(),
                        row: r,
                        value: x,
                    });
                }
                row[idx] = Cell::Num((x + eps).ln());
            }
        }
        let stats = compute_stats(&self.schema, &rows);
        Ok(Dataset {
            schema: self.schema.clone(),
            rows,
            stats,
        })
    }

    /// Converts the categorical period column into continuous midpoint ages
    /// (optionally their natural log). The schema kind is updated.
    pub fn period_to_age(
        &self,
        var_name: &str,
        table: &PeriodAgeTable,
        log: bool,
    ) -> Result<Dataset> {
        let idx = self.schema.index_of(var_name)?;
        if self.schema.vars()[idx].kind != VarKind::Categorical {
            return Err(Error::NotCategorical(var_name.to_string()));
        }
        let mut rows = self.rows.clone();
        for row in rows.iter_mut() {
            if let Cell::Cat(label) = &row[idx] {
                let mid = table.midpoint(label)?;
                row[idx] = Cell::Num(if log { mid.ln() } else { mid });
            }
        }
        let mut vars: Vec<VariableSpec> = self.schema.vars().to_vec();
        vars[idx].kind = VarKind::Continuous;
        vars[idx].transform = Transform::None;
        let schema = Schema::new(vars)?;
        let stats = compute_stats(&schema, &rows);
        Ok(Dataset {
            schema,
            rows,
            stats,
        })
    }
}

/// Scales a value into [0, 1] over the column's observed range.
pub fn minmax_unit(value: f64, stats: &ColumnStats) -> Result<f64> {
    if stats.max <= stats.min {
        return Err(Error::DegenerateRange(format!(
            "min {} max {}",
            stats.min, stats.max
        )));
    }
    Ok((value - stats.min) / (stats.max - stats.min))
}

fn compute_stats(schema: &Schema, rows: &[Vec<Cell>]) -> Vec<Option<ColumnStats>> {
    schema
        .vars()
        .iter()
        .enumerate()
        .map(|(c, var)| {
            if var.kind != VarKind::Continuous {
                return None;
            }
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            let mut sum = 0.0;
            let mut count = 0usize;
            for row in rows {
                if let Cell::Num(x) = row[c] {
                    min = min.min(x);
                    max = max.max(x);
                    sum += x;
                    count += 1;
                }
            }
            if count == 0 {
                Some(ColumnStats {
                    min: f64::NAN,
                    max: f64::NAN,
                    mean: f64::NAN,
                    count: 0,
                })
            } else {
                Some(ColumnStats {
                    min,
                    max,
                    mean: sum / count as f64,
                    count,
                })
            }
        })
        .collect()
}

/// Geological period bounds in Ma (million years before present).
/// Start is the older bound, so start > end, and the midpoint is their mean.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodAgeTable {
    entries: Vec<PeriodEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodEntry {
    pub label: String,
    pub start_ma: f64,
    pub end_ma: f64,
}

impl PeriodEntry {
    pub fn midpoint(&self) -> f64 {
        (self.start_ma + self.end_ma) / 2.0
    }
}

impl PeriodAgeTable {
    pub fn new(entries: Vec<PeriodEntry>) -> Result<Self> {
        for e in &entries {
            if e.start_ma <= e.end_ma {
                return Err(Error::Config(format!(
                    "period '{}': start {} must exceed end {}",
                    e.label, e.start_ma, e.end_ma
                )));
            }
        }
        Ok(PeriodAgeTable { entries })
    }

    /// ICS 2020 chart bounds, Neogene through Cambrian.
    pub fn ics2020() -> Self {
        let bounds = [
            ("NEOGENE", 23.03, 2.58),
            ("PALEOGENE", 66.0, 23.03),
            ("CRETACEOUS", 145.0, 66.0),
            ("JURASSIC", 201.3, 145.0),
            ("TRIASSIC", 251.902, 201.3),
            ("PERMIAN", 298.9, 251.902),
            ("CARBONIFEROUS", 358.9, 298.9),
            ("DEVONIAN", 419.2, 358.9),
            ("SILURIAN", 443.8, 419.2),
            ("ORDOVICIAN", 485.4, 443.8),
            ("CAMBRIAN", 541.0, 485.4),
        ];
        PeriodAgeTable {
            entries: bounds
                .iter()
                .map(|&(label, start_ma, end_ma)| PeriodEntry {
                    label: label.to_string(),
                    start_ma,
                    end_ma,
                })
                .collect(),
        }
    }

    /// Loads a table from a CSV file with columns label,start_ma,end_ma.
    pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path.as_ref())?;
        let mut entries = Vec::new();
        for (r, record) in reader.records().enumerate() {
            let record = record?;
            let get = |i: usize| record.get(i).unwrap_or("").trim().to_string();
            let parse = |i: usize, name: &str| -> Result<f64> {
                get(i).parse::<f64>().map_err(|_| Error::BadNumericCell {
                    row: r,
                    column: name.to_string(),
                    value: get(i),
                })
            };
            entries.push(PeriodEntry {
                label: get(0),
                start_ma: parse(1, "start_ma")?,
                end_ma: parse(2, "end_ma")?,
            });
        }
        PeriodAgeTable::new(entries)
    }

    /// Midpoint age for a label; lookup is case-insensitive.
    pub fn midpoint(&self, label: &str) -> Result<f64> {
        self.entries
            .iter()
            .find(|e| e.label.eq_ignore_ascii_case(label))
            .map(PeriodEntry::midpoint)
            .ok_or_else(|| Error::UnknownPeriod(label.to_string()))
    }

    pub fn entries(&self) -> &[PeriodEntry] {
        &self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Write;

    fn small_schema() -> Schema {
        Schema::new(vec![
            VariableSpec::categorical("Lithology"),
            VariableSpec::continuous("Porosity"),
        ])
        .unwrap()
    }

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_csv_populates_stats() {
        let f = write_csv("Lithology,Porosity\nSANDSTONE,10\nCHALK,20\nSANDSTONE,30\n");
        let ds = Dataset::load_csv(f.path(), small_schema()).unwrap();
        assert_eq!(ds.n_rows(), 3);
        let s = ds.stats_of("Porosity").unwrap();
        assert_eq!(s.min, 10.0);
        assert_eq!(s.max, 30.0);
        assert_eq!(s.mean, 20.0);
        assert_eq!(s.count, 3);
    }

    #[test]
    fn load_csv_all_empty_row() {
        let f = write_csv("Lithology,Porosity\n,\n");
        let ds = Dataset::load_csv(f.path(), small_schema()).unwrap();
        assert_eq!(ds.n_rows(), 1);
        assert!(ds.cell(0, 0).is_missing());
        assert!(ds.cell(0, 1).is_missing());
        assert_eq!(ds.stats_of("Porosity").unwrap().count, 0);
    }

    #[test]
    fn load_csv_reports_bad_numeric_cell() {
        let f = write_csv("Lithology,Porosity\nSANDSTONE,abc\n");
        let err = Dataset::load_csv(f.path(), small_schema()).unwrap_err();
        match err {
            Error::BadNumericCell { row, column, .. } => {
                assert_eq!(row, 0);
                assert_eq!(column, "Porosity");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn load_csv_missing_column() {
        let f = write_csv("Lithology\nSANDSTONE\n");
        assert!(matches!(
            Dataset::load_csv(f.path(), small_schema()),
            Err(Error::MissingColumn { .. })
        ));
    }

    #[test]
    fn apply_log_ln_identity() {
        let schema = Schema::new(vec![VariableSpec::continuous("x")]).unwrap();
        let ds = Dataset::new(
            schema,
            vec![
                vec![Cell::Num(std::f64::consts::E.powi(2))],
                vec![Cell::Missing],
            ],
        )
        .unwrap();
        let out = ds.apply_log("x", 0.0).unwrap();
        assert_relative_eq!(out.cell(0, 0).as_num().unwrap(), 2.0, epsilon = 1e-12);
        assert!(out.cell(1, 0).is_missing());
    }

    #[test]
    fn apply_log_zero_with_epsilon() {
        let schema = Schema::new(vec![VariableSpec::continuous("x")]).unwrap();
        let ds = Dataset::new(schema, vec![vec![Cell::Num(0.0)]]).unwrap();
        let out = ds.apply_log("x", 1e-6).unwrap();
        assert_relative_eq!(
            out.cell(0, 0).as_num().unwrap(),
            (1e-6f64).ln(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn apply_log_rejects_negative() {
        let schema = Schema::new(vec![VariableSpec::continuous("x")]).unwrap();
        let ds = Dataset::new(schema, vec![vec![Cell::Num(-1.0)]]).unwrap();
        assert!(matches!(
            ds.apply_log("x", 0.0),
            Err(Error::NegativeLogInput { .. })
        ));
    }

    #[test]
    fn log_then_exp_recovers_values() {
        let schema = Schema::new(vec![VariableSpec::continuous("x")]).unwrap();
        let values = [0.5, 1.0, 17.25, 400.0, 12345.678];
        let rows = values.iter().map(|&x| vec![Cell::Num(x)]).collect();
        let ds = Dataset::new(schema, rows).unwrap();
        let out = ds.apply_log("x", 0.0).unwrap();
        for (r, &x) in values.iter().enumerate() {
            let back = out.cell(r, 0).as_num().unwrap().exp();
            assert_relative_eq!(back, x, max_relative = 1e-9);
        }
    }

    #[test]
    fn period_midpoints() {
        let table = PeriodAgeTable::ics2020();
        assert_relative_eq!(table.midpoint("JURASSIC").unwrap(), 173.15, epsilon = 1e-9);
        assert_relative_eq!(table.midpoint("NEOGENE").unwrap(), 12.805, epsilon = 1e-9);
        assert_relative_eq!(table.midpoint("neogene").unwrap(), 12.805, epsilon = 1e-9);
        assert!(table.midpoint("HADEAN").is_err());
    }

    #[test]
    fn period_to_age_converts_and_logs() {
        let schema = Schema::new(vec![VariableSpec::categorical("Period")]).unwrap();
        let ds = Dataset::new(
            schema,
            vec![
                vec![Cell::Cat("JURASSIC".into())],
                vec![Cell::Cat("JURASSIC".into())],
                vec![Cell::Missing],
            ],
        )
        .unwrap();
        let table = PeriodAgeTable::ics2020();
        let out = ds.period_to_age("Period", &table, false).unwrap();
        assert_eq!(out.schema().vars()[0].kind, VarKind::Continuous);
        assert_relative_eq!(out.cell(0, 0).as_num().unwrap(), 173.15, epsilon = 1e-9);
        assert_eq!(out.cell(0, 0), out.cell(1, 0));
        assert!(out.cell(2, 0).is_missing());

        let logged = ds.period_to_age("Period", &table, true).unwrap();
        assert_relative_eq!(
            logged.cell(0, 0).as_num().unwrap(),
            173.15f64.ln(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn period_to_age_unknown_label() {
        let schema = Schema::new(vec![VariableSpec::categorical("Period")]).unwrap();
        let ds = Dataset::new(schema, vec![vec![Cell::Cat("NONSENSE".into())]]).unwrap();
        let err = ds
            .period_to_age("Period", &PeriodAgeTable::ics2020(), false)
            .unwrap_err();
        assert!(err.to_string().contains("NONSENSE"));
    }

    #[test]
    fn minmax_unit_bounds() {
        let s = ColumnStats {
            min: 2.0,
            max: 10.0,
            mean: 5.0,
            count: 4,
        };
        assert_eq!(minmax_unit(2.0, &s).unwrap(), 0.0);
        assert_eq!(minmax_unit(10.0, &s).unwrap(), 1.0);
        assert_relative_eq!(minmax_unit(6.0, &s).unwrap(), 0.5);
        let degenerate = ColumnStats {
            min: 3.0,
            max: 3.0,
            mean: 3.0,
            count: 2,
        };
        assert!(minmax_unit(3.0, &degenerate).is_err());
    }

    #[test]
    fn transforms_preserve_shape_and_missing() {
        let schema = Schema::new(vec![
            VariableSpec::categorical("Period"),
            VariableSpec::continuous("x"),
        ])
        .unwrap();
        let ds = Dataset::new(
            schema,
            vec![
                vec![Cell::Cat("JURASSIC".into()), Cell::Num(1.0)],
                vec![Cell::Missing, Cell::Missing],
            ],
        )
        .unwrap();
        let out = ds
            .apply_log("x", 0.0)
            .unwrap()
            .period_to_age("Period", &PeriodAgeTable::ics2020(), false)
            .unwrap();
        assert_eq!(out.n_rows(), ds.n_rows());
        assert_eq!(out.n_vars(), ds.n_vars());
        assert!(out.cell(1, 0).is_missing());
        assert!(out.cell(1, 1).is_missing());
    }
}
