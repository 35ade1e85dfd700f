//! Dense rational matrices and exact rank.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::poly::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        RationalMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Entry `(r, c)` of the result is entry `(row_order[r], col_order[c])` of `self`.
    pub fn permuted(&self, row_order: &[usize], col_order: &[usize]) -> Self {
        assert_eq!(row_order.len(), self.rows);
        assert_eq!(col_order.len(), self.cols);
        let mut m = Self::zeros(self.rows, self.cols);
        for (r, &src_r) in row_order.iter().enumerate() {
            for (c, &src_c) in col_order.iter().enumerate() {
                m.set(r, c, self.get(src_r, src_c).clone());
            }
        }
        m
    }

    /// Exact rank by fraction-free (Bareiss) elimination over the integers.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| integer_row(self.row(r)))
            .filter(|row| row.iter().any(|v| !v.is_zero()))
            .collect();
        let mut prev = BigInt::one();
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == rows.len() {
                break;
            }
            let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            let (top, rest) = rows.split_at_mut(rank + 1);
            let pivot_row = &top[rank];
            let pivot = &pivot_row[c];
            for row in rest.iter_mut() {
                let lead = std::mem::take(&mut row[c]);
                for j in (c + 1)..self.cols {
                    let v = pivot * &row[j] - &lead * &pivot_row[j];
                    row[j] = if prev.is_one() { v } else { v / &prev };
                }
            }
            prev = pivot_row[c].clone();
            rank += 1;
        }
        rank
    }
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .filter(|v| !v.is_zero())
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    row.iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect()
}

/// Dense text grid, one row per line.
impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(format_rational).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use proptest::prelude::*;

    /// Plain Gauss-Jordan over the rationals, kept separate from the Bareiss path.
    fn naive_rank(m: &RationalMatrix) -> usize {
        let mut a: Vec<Vec<Rational>> = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let inv = a[rank][c].recip();
            let pivot: Vec<Rational> = a[rank].iter().map(|v| v * &inv).collect();
            for (r, row) in a.iter_mut().enumerate() {
                if r != rank && !row[c].is_zero() {
                    let factor = row[c].clone();
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x -= &factor * y;
                    }
                }
            }
            a[rank] = pivot;
            rank += 1;
        }
        rank
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RationalMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(RationalMatrix::identity(5).rank(), 5);
        assert_eq!(RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(RationalMatrix::zeros(0, 3).rank(), 0);
        let m = RationalMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(3, 2), rat(1, 1)],
        ]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn display_grid() {
        let m = RationalMatrix::from_rows(vec![vec![rat(1, 2), rat(0, 1)], vec![rat(-3, 1), rat(4, 6)]]);
        assert_eq!(m.to_string(), "1/2 0\n-3 2/3\n");
    }

    fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec((-3i64..=3, 1i64..=3), r * c).prop_map(move |cells| {
                let rows = cells
                    .chunks(c)
                    .map(|ch| ch.iter().map(|&(n, d)| rat(n, d)).collect())
                    .collect();
                RationalMatrix::from_rows(rows)
            })
        })
    }

    proptest! {
        #[test]
        fn rank_matches_naive_elimination(m in small_matrix()) {
            prop_assert_eq!(m.rank(), naive_rank(&m));
        }

        #[test]
        fn rank_of_transpose(m in small_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn low_rank_products(a in small_matrix(), seed in 0u64..1000) {
            // A (r x c) times B (c x 2) has rank at most 2.
            let b_rows: Vec<Vec<Rational>> = (0..a.cols())
                .map(|i| vec![rat((seed as i64 + i as i64) % 5 - 2, 1), rat(i as i64 - 1, 2)])
                .collect();
            let mut prod = RationalMatrix::zeros(a.rows(), 2);
            for r in 0..a.rows() {
                for j in 0..2 {
                    let mut s = Rational::zero();
                    for (k, brow) in b_rows.iter().enumerate() {
                        s += a.get(r, k) * &brow[j];
                    }
                    prod.set(r, j, s);
                }
            }
            prop_assert!(prod.rank() <= 2);
            prop_assert_eq!(prod.rank(), naive_rank(&prod));
        }
    }
}
