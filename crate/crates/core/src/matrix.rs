//! Dense nonnegative integer matrices.

use std::fmt;

use num_traits::Zero;

use crate::scalar::{self, Count, Overflow};

/// Row-major dense matrix over a [`Count`] scalar.
///
/// Incidence matrices are `|V_n| x |V_{n-1}|`: entry `(v, w)` counts the
/// edges from `w` into `v`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CountMatrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Count> CountMatrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CountMatrix {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        CountMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &C {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: C) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[C] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<C>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// `self * rhs`. For incidence matrices `A_j * A_{j-1}` is the matrix of
    /// the two-level composite.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, Overflow> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = scalar::mul(a, b)?;
                    let idx = i * rhs.cols + j;
                    out.data[idx] = scalar::add(&out.data[idx], &prod)?;
                }
            }
        }
        Ok(out)
    }

    pub fn row_sums(&self) -> Result<Vec<C>, Overflow> {
        (0..self.rows)
            .map(|r| self.row(r).iter().try_fold(C::zero(), |acc, x| scalar::add(&acc, x)))
            .collect()
    }

    /// Every entry strictly positive.
    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|x| !x.is_zero())
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows)
            .filter(|&r| self.row(r).iter().all(Zero::is_zero))
            .collect()
    }

    pub fn zero_cols(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|&c| (0..self.rows).all(|r| self.get(r, c).is_zero()))
            .collect()
    }
}

impl<C: Count> fmt::Display for CountMatrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Boolean support pattern, used where only positivity matters and counts
/// would overflow.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Support {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Support {
    pub fn of<C: Count>(m: &CountMatrix<C>) -> Self {
        Support {
            rows: m.rows,
            cols: m.cols,
            bits: m.data.iter().map(|x| !x.is_zero()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Support) -> Support {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut bits = vec![false; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                if !self.bits[i * self.cols + k] {
                    continue;
                }
                for j in 0..rhs.cols {
                    if rhs.bits[k * rhs.cols + j] {
                        bits[i * rhs.cols + j] = true;
                    }
                }
            }
        }
        Support {
            rows: self.rows,
            cols: rhs.cols,
            bits,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_row_sums() {
        let a = CountMatrix::<u64>::from_rows(vec![vec![2, 1], vec![1, 2]]);
        let p = a.checked_mul(&a).unwrap();
        assert_eq!(p.to_rows(), vec![vec![5, 4], vec![4, 5]]);
        assert_eq!(p.row_sums().unwrap(), vec![9, 9]);
        assert!(p.is_positive());
    }

    #[test]
    fn zero_rows_and_cols() {
        let m = CountMatrix::<u32>::from_rows(vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(m.zero_rows(), vec![1]);
        assert_eq!(m.zero_cols(), vec![0]);
    }

    #[test]
    fn overflow_is_reported() {
        let m = CountMatrix::<u32>::from_rows(vec![vec![u32::MAX]]);
        assert!(m.checked_mul(&m).is_err());
    }

    #[test]
    fn support_product_tracks_positivity() {
        let perm = Support::of(&CountMatrix::<u64>::from_rows(vec![vec![0, 1], vec![1, 0]]));
        assert!(!perm.mul(&perm).is_positive());
        let full = Support::of(&CountMatrix::<u64>::from_rows(vec![vec![1, 1], vec![0, 1]]));
        assert!(!full.is_positive());
        let sq = full.mul(&Support::of(&CountMatrix::<u64>::from_rows(vec![
            vec![1, 0],
            vec![1, 1],
        ])));
        assert!(sq.is_positive());
    }
}
