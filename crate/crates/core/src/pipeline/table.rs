use std::path::Path;

use super::{read_file, write_file, PipelineError};

/// Comma-delimited table with `#` comment lines and a header row.
///
/// Numbers are written in Rust's shortest round-trip form, so reading a
/// written table gives back the same `f64` values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    comments: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn clean_cell(cell: &str) -> String {
    cell.replace([',', '\n', '\r'], "_")
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.iter().map(|c| clean_cell(c.as_ref())).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into().replace(['\n', '\r'], " "));
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row of text cells. Panics on a width mismatch.
    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(cells.iter().map(|c| clean_cell(c)).collect());
    }

    /// Appends a row of numbers. Panics on a width mismatch.
    pub fn push_numbers(&mut self, values: &[f64]) {
        self.push_row(values.iter().map(f64::to_string).collect());
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column_text(&self, name: &str) -> Result<Vec<&str>, PipelineError> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| PipelineError::Validation(format!("no column named {name:?}")))?;
        Ok(self.rows.iter().map(|r| r[idx].as_str()).collect())
    }

    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>, PipelineError> {
        self.column_text(name)?
            .into_iter()
            .enumerate()
            .map(|(i, cell)| {
                cell.parse().map_err(|_| {
                    PipelineError::Validation(format!("column {name}, row {}: {cell:?} is not a number", i + 1))
                })
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Reads the form written by [`to_text`](Self::to_text). `origin`
    /// names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, PipelineError> {
        let mut table: Option<Table> = None;
        let mut comments = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            if let Some(c) = raw.strip_prefix('#') {
                comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
                continue;
            }
            if raw.trim().is_empty() {
                continue;
            }
            let cells: Vec<String> = raw.split(',').map(str::to_string).collect();
            match table.as_mut() {
                None => table = Some(Table::new(&cells)),
                Some(t) if cells.len() != t.columns.len() => {
                    return Err(PipelineError::Parse {
                        origin: origin.to_string(),
                        line: idx + 1,
                        message: format!("expected {} fields, got {}", t.columns.len(), cells.len()),
                    });
                }
                Some(t) => t.rows.push(cells),
            }
        }
        let mut table = table.ok_or_else(|| PipelineError::Parse {
            origin: origin.to_string(),
            line: text.lines().count(),
            message: "no header row".into(),
        })?;
        table.comments = comments;
        Ok(table)
    }

    pub fn write(&self, path: &Path) -> Result<(), PipelineError> {
        write_file(path, &self.to_text())
    }

    pub fn read(path: &Path) -> Result<Self, PipelineError> {
        Self::parse(&read_file(path)?, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_round_trip() {
        let mut t = Table::new(&["label", "x", "y"]);
        t.comment("pairstate test");
        t.push_row(vec!["a,b".into(), "1".into(), "2".into()]);
        t.push_numbers(&[3.0, 0.1 + 0.2, -1e-300]);
        let back = Table::parse(&t.to_text(), "mem").unwrap();
        assert_eq!(back, t);
        assert_eq!(back.column_text("label").unwrap(), vec!["a_b", "3"]);
        assert_eq!(back.column_f64("y").unwrap(), vec![2.0, -1e-300]);
        assert!(back.column_f64("label").is_err());
        assert!(back.column_f64("z").is_err());
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = Table::parse("a,b\n1,2\n3\n", "t.csv").unwrap_err();
        assert!(matches!(err, PipelineError::Parse { line: 3, .. }), "{err}");
        assert!(Table::parse("# only comments\n", "t.csv").is_err());
    }

    proptest! {
        #[test]
        fn numbers_round_trip(values in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..40)) {
            let mut t = Table::new(&["v"]);
            for v in &values {
                t.push_numbers(&[*v]);
            }
            let back = Table::parse(&t.to_text(), "p").unwrap().column_f64("v").unwrap();
            for (a, b) in values.iter().zip(&back) {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
