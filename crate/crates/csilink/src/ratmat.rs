//! Sparse exact-rational matrices with fraction-free rank computation.
//!
//! Rank uses Bareiss elimination over big integers after clearing
//! denominators row by row, so no intermediate rounding can occur.  The
//! nullspace routine is a separate Gauss–Jordan pass over rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// A sparse matrix over the rationals.  Zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigRational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, row: usize, col: usize, value: BigRational) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> BigRational {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &BigRational)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn multiply(&self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = RationalMatrix::new(self.rows, rhs.cols);
        // accumulate via the sparse entries of self
        let mut acc: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            for (&(k2, j), b) in &rhs.entries {
                if k2 != k {
                    continue;
                }
                let e = acc.entry((i, j)).or_insert_with(BigRational::zero);
                *e += a * b;
            }
        }
        for ((i, j), v) in acc {
            out.set(i, j, v);
        }
        out
    }

    /// Dense integer image with denominators cleared per row.
    fn to_integer_rows(&self) -> Vec<Vec<BigInt>> {
        let mut dense = vec![vec![BigInt::zero(); self.cols]; self.rows];
        let mut lcms = vec![BigInt::one(); self.rows];
        for (&(i, _), v) in &self.entries {
            let den = v.denom().abs();
            let g = num_integer::gcd(lcms[i].clone(), den.clone());
            lcms[i] = &lcms[i] / g * den;
        }
        for (&(i, j), v) in &self.entries {
            let scaled = v * BigRational::from_integer(lcms[i].clone());
            debug_assert!(scaled.denom().is_one());
            dense[i][j] = scaled.numer().clone();
        }
        dense
    }

    /// Exact rank by fraction-free Bareiss elimination over the integers.
    pub fn rank(&self) -> usize {
        let mut a = self.to_integer_rows();
        let rows = self.rows;
        let cols = self.cols;
        let mut rank = 0usize;
        let mut prev_pivot = BigInt::one();
        let mut row = 0usize;
        for col in 0..cols {
            // find a pivot at or below `row`
            let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(row, p);
            for r in row + 1..rows {
                for c in col + 1..cols {
                    let num = &a[row][col] * &a[r][c] - &a[r][col] * &a[row][c];
                    a[r][c] = num / &prev_pivot; // exact by Bareiss
                }
                a[r][col] = BigInt::zero();
            }
            prev_pivot = a[row][col].clone();
            rank += 1;
            row += 1;
            if row == rows {
                break;
            }
        }
        rank
    }

    /// A basis of the right nullspace `{x : A x = 0}` over the rationals,
    /// computed by Gauss–Jordan reduction.  Deterministic.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let mut a: Vec<Vec<BigRational>> =
            vec![vec![BigRational::zero(); self.cols]; self.rows];
        for (&(i, j), v) in &self.entries {
            a[i][j] = v.clone();
        }
        let rows = self.rows;
        let cols = self.cols;
        let mut pivot_col_of_row: Vec<Option<usize>> = vec![None; rows];
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut row = 0usize;
        for col in 0..cols {
            let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(row, p);
            let inv = a[row][col].clone();
            for c in col..cols {
                let v = &a[row][c] / &inv;
                a[row][c] = v;
            }
            for r in 0..rows {
                if r != row && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in col..cols {
                        let v = &a[r][c] - &f * &a[row][c];
                        a[r][c] = v;
                    }
                }
            }
            pivot_col_of_row[row] = Some(col);
            pivot_cols.push(col);
            row += 1;
            if row == rows {
                break;
            }
        }
        let is_pivot: Vec<bool> = {
            let mut b = vec![false; cols];
            for &c in &pivot_cols {
                b[c] = true;
            }
            b
        };
        let mut basis = Vec::new();
        for free in 0..cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![BigRational::zero(); cols];
            v[free] = BigRational::one();
            for (r, pc) in pivot_col_of_row.iter().enumerate() {
                if let Some(pc) = pc {
                    v[*pc] = -a[r][free].clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}
