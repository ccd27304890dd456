//! Dense integer matrices with arbitrary-precision entries.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::lattice::LatticeError;

/// A row-major matrix of exact integers.
///
/// This is the carrier for relation matrices, generator lists and lattice
/// bases. It never rounds and never overflows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LatticeError> {
        if rows * cols != entries.len() {
            return Err(LatticeError::ShapeMismatch {
                rows,
                cols,
                entries: entries.len(),
            });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::from(1);
        }
        m
    }

    /// Builds a matrix from explicit rows. Every row must have `cols` entries.
    pub fn from_rows<I, R, T>(cols: usize, rows: I) -> Result<Self, LatticeError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut entries = Vec::new();
        let mut count = 0;
        for row in rows {
            let before = entries.len();
            entries.extend(row.into_iter().map(Into::into));
            if entries.len() - before != cols {
                return Err(LatticeError::LengthMismatch {
                    expected: cols,
                    found: entries.len() - before,
                });
            }
            count += 1;
        }
        Ok(Self {
            rows: count,
            cols,
            entries,
        })
    }

    /// Convenience constructor for small literal matrices.
    ///
    /// Panics if the rows are ragged.
    pub fn from_i64(cols: usize, rows: &[&[i64]]) -> Self {
        Self::from_rows(cols, rows.iter().map(|r| r.iter().copied())).expect("ragged literal matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[BigInt] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[BigInt]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<BigInt>> {
        self.row_iter().map(<[BigInt]>::to_vec).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &ExactMatrix) -> Result<ExactMatrix, LatticeError> {
        if self.cols != other.cols {
            return Err(LatticeError::RankMismatch {
                left: self.cols,
                right: other.cols,
            });
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(ExactMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    pub(crate) fn from_row_vecs(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let count = rows.len();
        let entries: Vec<BigInt> = rows.into_iter().flatten().collect();
        debug_assert_eq!(entries.len(), count * cols);
        Self {
            rows: count,
            cols,
            entries,
        }
    }

    pub(crate) fn scaled(&self, factor: &BigInt) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.row_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_is_checked() {
        assert!(ExactMatrix::new(2, 2, vec![BigInt::from(1); 3]).is_err());
        assert!(ExactMatrix::from_rows(2, vec![vec![1, 2], vec![3]]).is_err());
        let m = ExactMatrix::from_i64(2, &[&[1, 2], &[3, 4]]);
        assert_eq!(m.get(1, 0), &BigInt::from(3));
        assert_eq!(m.to_string(), "[[1, 2], [3, 4]]");
    }

    #[test]
    fn empty_matrix_keeps_column_count() {
        let m = ExactMatrix::from_rows(3, Vec::<Vec<i64>>::new()).unwrap();
        assert_eq!((m.rows(), m.cols()), (0, 3));
    }
}
