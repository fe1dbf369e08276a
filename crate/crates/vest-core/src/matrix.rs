//! Column-named matrices moving through the pipeline.
//!
//! [`FeatureMatrix`] holds real-or-missing cells straight out of feature
//! generation; [`DenseMatrix`] is fully numeric, column-major storage for the
//! learners. Both carry the target index of every row so alignment can be
//! checked instead of assumed.

use std::io::Write;
use std::ops::Range;

use crate::error::{Error, Result};

/// Row-major matrix of real-or-missing feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    names: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
    target_indices: Vec<usize>,
}

impl FeatureMatrix {
    pub fn new(
        names: Vec<String>,
        rows: Vec<Vec<Option<f64>>>,
        target_indices: Vec<usize>,
    ) -> Result<Self> {
        if rows.len() != target_indices.len() {
            return Err(Error::MisalignedRows(format!(
                "{} rows vs {} target indices",
                rows.len(),
                target_indices.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != names.len()) {
            return Err(Error::MisalignedRows(format!(
                "row {bad} has {} cells, expected {}",
                rows[bad].len(),
                names.len()
            )));
        }
        Ok(Self {
            names,
            rows,
            target_indices,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn target_indices(&self) -> &[usize] {
        &self.target_indices
    }

    pub fn row(&self, i: usize) -> &[Option<f64>] {
        &self.rows[i]
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<f64> {
        self.rows[row][col]
    }

    pub fn set_cell(&mut self, row: usize, col: usize, value: Option<f64>) {
        self.rows[row][col] = value;
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    /// Values of one column, top to bottom.
    pub fn column(&self, col: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        self.rows.iter().map(move |r| r[col])
    }

    /// Rows whose target index lies in `range`.
    pub fn slice_by_target(&self, range: Range<usize>) -> FeatureMatrix {
        let keep: Vec<usize> = (0..self.n_rows())
            .filter(|&i| range.contains(&self.target_indices[i]))
            .collect();
        FeatureMatrix {
            names: self.names.clone(),
            rows: keep.iter().map(|&i| self.rows[i].clone()).collect(),
            target_indices: keep.iter().map(|&i| self.target_indices[i]).collect(),
        }
    }

    /// Converts to dense storage; any remaining missing cell is an error.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let mut columns = vec![Vec::with_capacity(self.n_rows()); self.n_cols()];
        for (i, row) in self.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                match cell {
                    Some(v) => columns[c].push(*v),
                    None => {
                        return Err(Error::MisalignedRows(format!(
                            "missing cell at row {i}, column {:?}",
                            self.names[c]
                        )))
                    }
                }
            }
        }
        DenseMatrix::new(self.names.clone(), columns, self.target_indices.clone())
    }

    /// Writes a CSV with a `t` index column first and `NA` for missing cells.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "t")?;
        for name in &self.names {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (i, row) in self.rows.iter().enumerate() {
            write!(w, "{}", self.target_indices[i])?;
            for cell in row {
                match cell {
                    Some(v) => write!(w, ",{v}")?,
                    None => write!(w, ",NA")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Fully numeric column-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    target_indices: Vec<usize>,
}

impl DenseMatrix {
    pub fn new(
        names: Vec<String>,
        columns: Vec<Vec<f64>>,
        target_indices: Vec<usize>,
    ) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::MisalignedRows(format!(
                "{} names vs {} columns",
                names.len(),
                columns.len()
            )));
        }
        let n = target_indices.len();
        if let Some(bad) = columns.iter().position(|c| c.len() != n) {
            return Err(Error::MisalignedRows(format!(
                "column {:?} has {} rows, expected {n}",
                names[bad],
                columns[bad].len()
            )));
        }
        Ok(Self {
            names,
            columns,
            target_indices,
        })
    }

    pub fn empty(n_rows: usize, target_indices: Vec<usize>) -> Result<Self> {
        if target_indices.len() != n_rows {
            return Err(Error::MisalignedRows("target index count".into()));
        }
        Ok(Self {
            names: Vec::new(),
            columns: Vec::new(),
            target_indices,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.target_indices.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn target_indices(&self) -> &[usize] {
        &self.target_indices
    }

    pub fn column(&self, c: usize) -> &[f64] {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Column-wise concatenation; rows must be aligned on target indices.
    pub fn hstack(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.target_indices != other.target_indices {
            return Err(Error::MisalignedRows(
                "cannot concatenate matrices with different row alignments".into(),
            ));
        }
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        DenseMatrix::new(names, columns, self.target_indices.clone())
    }

    /// Copies the named columns, in the order given.
    pub fn select_columns(&self, names: &[String]) -> Result<DenseMatrix> {
        let mut columns = Vec::with_capacity(names.len());
        for name in names {
            let idx = self
                .names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::MissingColumn(name.clone()))?;
            columns.push(self.columns[idx].clone());
        }
        DenseMatrix::new(names.to_vec(), columns, self.target_indices.clone())
    }

    /// Rows whose target index lies in `range`.
    pub fn slice_by_target(&self, range: Range<usize>) -> DenseMatrix {
        let keep: Vec<usize> = (0..self.n_rows())
            .filter(|&i| range.contains(&self.target_indices[i]))
            .collect();
        DenseMatrix {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| keep.iter().map(|&i| c[i]).collect())
                .collect(),
            target_indices: keep.iter().map(|&i| self.target_indices[i]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FeatureMatrix {
        FeatureMatrix::new(
            vec!["a".into(), "b".into()],
            vec![
                vec![Some(1.0), None],
                vec![Some(2.0), Some(5.0)],
                vec![Some(3.0), Some(6.0)],
            ],
            vec![10, 11, 12],
        )
        .unwrap()
    }

    #[test]
    fn construction_checks_shape() {
        assert!(
            FeatureMatrix::new(vec!["a".into()], vec![vec![Some(1.0), Some(2.0)]], vec![0])
                .is_err()
        );
        assert!(DenseMatrix::new(vec!["a".into()], vec![vec![1.0, 2.0]], vec![0]).is_err());
    }

    #[test]
    fn slicing_by_target() {
        let m = small().slice_by_target(11..13);
        assert_eq!(m.n_rows(), 2);
        assert_eq!(m.target_indices(), &[11, 12]);
        assert_eq!(m.cell(0, 1), Some(5.0));
    }

    #[test]
    fn dense_conversion_requires_complete_cells() {
        assert!(small().to_dense().is_err());
        let full = small().slice_by_target(11..13);
        let d = full.to_dense().unwrap();
        assert_eq!(d.column(0), &[2.0, 3.0]);
    }

    #[test]
    fn hstack_checks_alignment() {
        let a = DenseMatrix::new(vec!["x".into()], vec![vec![1.0, 2.0]], vec![0, 1]).unwrap();
        let b = DenseMatrix::new(vec!["y".into()], vec![vec![3.0, 4.0]], vec![0, 1]).unwrap();
        let ab = a.hstack(&b).unwrap();
        assert_eq!(ab.n_cols(), 2);
        assert_eq!(ab.row(1), vec![2.0, 4.0]);
        let c = DenseMatrix::new(vec!["z".into()], vec![vec![3.0, 4.0]], vec![5, 6]).unwrap();
        assert!(a.hstack(&c).is_err());
    }

    #[test]
    fn select_columns_in_given_order() {
        let m = DenseMatrix::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![1.0], vec![2.0], vec![3.0]],
            vec![0],
        )
        .unwrap();
        let s = m.select_columns(&["z".into(), "x".into()]).unwrap();
        assert_eq!(s.names(), &["z".to_string(), "x".to_string()]);
        assert_eq!(s.row(0), vec![3.0, 1.0]);
        assert!(m.select_columns(&["w".into()]).is_err());
    }

    #[test]
    fn csv_output_marks_missing() {
        let mut buf = Vec::new();
        small().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,a,b");
        assert_eq!(text.lines().nth(1).unwrap(), "10,1,NA");
    }
}
