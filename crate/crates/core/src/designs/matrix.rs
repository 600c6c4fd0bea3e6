use std::fmt;

use super::DesignError;

/// A dense row-major array of small signed integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i32>,
}

impl DesignMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i32>) -> Result<Self, DesignError> {
        if entries.len() != rows * cols {
            return Err(DesignError::Shape {
                expected_rows: rows,
                expected_cols: cols,
                rows: entries.len() / cols.max(1),
                cols,
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    /// Builds a matrix from nested rows, rejecting ragged input. The
    /// reported line is the 1-based index of the first bad row.
    pub fn from_rows<R: AsRef<[i32]>>(rows: &[R]) -> Result<Self, DesignError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(DesignError::Parse {
                    line: i + 1,
                    message: format!("row has {} entries, expected {}", row.len(), cols),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> i32 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: i32) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[i32] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[i32]> + '_ {
        // chunks_exact panics on a zero chunk size
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn entries(&self) -> &[i32] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<i32>> {
        self.iter_rows().map(<[i32]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub(crate) fn check_shape(&self, rows: usize, cols: usize) -> Result<(), DesignError> {
        if self.rows == rows && self.cols == cols {
            Ok(())
        } else {
            Err(DesignError::Shape {
                expected_rows: rows,
                expected_cols: cols,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl fmt::Display for DesignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format_matrix(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_rows_rejected_with_line() {
        let err = DesignMatrix::from_rows(&[vec![0, 1], vec![0]]).unwrap_err();
        assert_eq!(
            err,
            DesignError::Parse {
                line: 2,
                message: "row has 1 entries, expected 2".into()
            }
        );
    }

    #[test]
    fn transpose_swaps_indices() {
        let m = DesignMatrix::from_rows(&[vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        let t = m.transpose();
        assert_eq!(t.rows(), 3);
        assert_eq!(t.row(2), &[3, 6]);
        assert_eq!(t.transpose(), m);
    }

    #[test]
    fn shape_check() {
        let m = DesignMatrix::zeros(2, 3);
        assert!(m.check_shape(2, 3).is_ok());
        assert!(matches!(
            m.check_shape(3, 2),
            Err(DesignError::Shape { rows: 2, cols: 3, .. })
        ));
    }
}
