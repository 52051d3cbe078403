//! Dense exact linear algebra over GF(2^n).
//!
//! Plain row-major matrices with Gaussian elimination using leftmost-nonzero
//! pivoting. The field is exact, so there are no pivot-magnitude heuristics;
//! everything here is deterministic.

use crate::field::{FieldCtx, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    a: Vec<FieldElement>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{:>4}", self.get(r, c).0)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, a: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FieldElement) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.a[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.a[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (x, y) in m.a.iter_mut().zip(&other.a) {
            *x = FieldElement(x.0 ^ y.0);
        }
        m
    }

    pub fn mul(&self, other: &Mat, k: &FieldCtx) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut m = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for i in 0..self.cols {
                let v = self.get(r, i);
                if v.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let w = other.get(i, c);
                    if !w.is_zero() {
                        let cur = m.get(r, c);
                        m.set(r, c, k.add(cur, k.mul(v, w)));
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[FieldElement], k: &FieldCtx) -> Vec<FieldElement> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![FieldElement::ZERO; self.rows];
        for r in 0..self.rows {
            let mut acc = FieldElement::ZERO;
            for c in 0..self.cols {
                acc = k.add(acc, k.mul(self.get(r, c), v[c]));
            }
            out[r] = acc;
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn col(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn set_col(&mut self, c: usize, v: &[FieldElement]) {
        assert_eq!(v.len(), self.rows);
        for r in 0..self.rows {
            self.set(r, c, v[r]);
        }
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols { self.get(r, c) } else { other.get(r, c - self.cols) }
        })
    }

    /// Vertical concatenation [self; other].
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        Mat::from_fn(self.rows + other.rows, self.cols, |r, c| {
            if r < self.rows { self.get(r, c) } else { other.get(r - self.rows, c) }
        })
    }

    pub fn from_cols(rows: usize, cols: &[Vec<FieldElement>]) -> Mat {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            m.set_col(j, col);
        }
        m
    }

    /// Block diagonal sum of two matrices.
    pub fn block_diag(&self, other: &Mat) -> Mat {
        Mat::from_fn(self.rows + other.rows, self.cols + other.cols, |r, c| {
            if r < self.rows && c < self.cols {
                self.get(r, c)
            } else if r >= self.rows && c >= self.cols {
                other.get(r - self.rows, c - self.cols)
            } else {
                FieldElement::ZERO
            }
        })
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, k: &FieldCtx) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    let (x, y) = (self.get(row, c), self.get(pr, c));
                    self.set(row, c, y);
                    self.set(pr, c, x);
                }
            }
            let inv = k.inv(self.get(row, col)).expect("pivot nonzero");
            for c in col..self.cols {
                self.set(row, c, k.mul(self.get(row, c), inv));
            }
            for r in 0..self.rows {
                if r != row {
                    let factor = self.get(r, col);
                    if !factor.is_zero() {
                        for c in col..self.cols {
                            let v = k.add(self.get(r, c), k.mul(factor, self.get(row, c)));
                            self.set(r, c, v);
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self, k: &FieldCtx) -> usize {
        let mut m = self.clone();
        m.rref(k).len()
    }

    /// Basis of the right kernel, one column per basis vector.
    pub fn kernel_basis(&self, k: &FieldCtx) -> Mat {
        let mut m = self.clone();
        let pivots = m.rref(k);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zeros(self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            out.set(fc, j, FieldElement::ONE);
            for (pr, &pc) in pivots.iter().enumerate() {
                out.set(pc, j, m.get(pr, fc));
            }
        }
        out
    }

    /// Basis of the column space: the columns of self at pivot positions.
    pub fn column_space_basis(&self, k: &FieldCtx) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref(k);
        let cols: Vec<Vec<FieldElement>> = pivots.iter().map(|&c| self.col(c)).collect();
        (Mat::from_cols(self.rows, &cols), pivots)
    }

    /// Solve self * X = rhs; None if inconsistent for some column.
    pub fn solve_matrix(&self, rhs: &Mat, k: &FieldCtx) -> Option<Mat> {
        assert_eq!(self.rows, rhs.rows);
        let mut aug = self.hstack(rhs);
        let pivots = aug.rref(k);
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(self.cols, rhs.cols);
        for (pr, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, aug.get(pr, self.cols + j));
            }
        }
        Some(x)
    }

    pub fn solve_vec(&self, rhs: &[FieldElement], k: &FieldCtx) -> Option<Vec<FieldElement>> {
        let r = Mat::from_cols(self.rows, &[rhs.to_vec()]);
        self.solve_matrix(&r, k).map(|x| x.col(0))
    }

    /// Extend the (independent) columns of self to a basis of the full space
    /// using standard basis vectors; returns the completing columns.
    pub fn complete_basis(&self, k: &FieldCtx) -> Mat {
        let n = self.rows;
        let mut chosen: Vec<Vec<FieldElement>> = Vec::new();
        let mut work = self.clone();
        for j in 0..n {
            let mut e = vec![FieldElement::ZERO; n];
            e[j] = FieldElement::ONE;
            let cand = Mat::from_cols(n, &[e.clone()]);
            let test = work.hstack(&cand);
            if test.rank(k) > work.cols() {
                work = test;
                chosen.push(e);
            }
            if work.cols() == n {
                break;
            }
        }
        assert_eq!(work.cols(), n, "columns did not span after completion");
        Mat::from_cols(n, &chosen)
    }

    /// Determinant by elimination (square matrices).
    pub fn det(&self, k: &FieldCtx) -> FieldElement {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det = FieldElement::ONE;
        for col in 0..m.cols {
            let Some(pr) = (col..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                return FieldElement::ZERO;
            };
            if pr != col {
                for c in 0..m.cols {
                    let (x, y) = (m.get(col, c), m.get(pr, c));
                    m.set(col, c, y);
                    m.set(pr, c, x);
                }
                // char 2: swapping rows does not change the determinant sign
            }
            let piv = m.get(col, col);
            det = k.mul(det, piv);
            let inv = k.inv(piv).expect("pivot nonzero");
            for r in col + 1..m.rows {
                let f = k.mul(m.get(r, col), inv);
                if !f.is_zero() {
                    for c in col..m.cols {
                        let v = k.add(m.get(r, c), k.mul(f, m.get(col, c)));
                        m.set(r, c, v);
                    }
                }
            }
        }
        det
    }
}

/// Does the column space of `space` contain the vector `v`?
pub fn contains(space: &Mat, v: &[FieldElement], k: &FieldCtx) -> bool {
    space.solve_vec(v, k).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn k() -> FieldCtx {
        FieldCtx::new(4).unwrap()
    }

    fn m(k: &FieldCtx, rows: usize, cols: usize, data: &[u64]) -> Mat {
        assert_eq!(data.len(), rows * cols);
        Mat::from_fn(rows, cols, |r, c| k.elem(data[r * cols + c]))
    }

    #[test]
    fn rank_and_kernel() {
        let k = k();
        let a = m(&k, 2, 3, &[1, 2, 3, 2, 4, 6]); // row2 = 2*row1 over GF(16)
        assert_eq!(a.rank(&k), 1);
        let ker = a.kernel_basis(&k);
        assert_eq!(ker.cols(), 2);
        let prod = a.mul(&ker, &k);
        assert!(prod.is_zero());
    }

    #[test]
    fn solve_round_trip() {
        let k = k();
        let a = m(&k, 3, 3, &[1, 2, 0, 0, 1, 5, 7, 0, 1]);
        let x = m(&k, 3, 2, &[3, 1, 0, 9, 4, 4]);
        let b = a.mul(&x, &k);
        let got = a.solve_matrix(&b, &k).unwrap();
        assert_eq!(a.mul(&got, &k), b);
    }

    #[test]
    fn complete_basis_spans() {
        let k = k();
        let a = m(&k, 3, 1, &[1, 1, 0]);
        let c = a.complete_basis(&k);
        assert_eq!(a.hstack(&c).rank(&k), 3);
    }

    #[test]
    fn det_of_singular_and_identity() {
        let k = k();
        assert_eq!(Mat::identity(4).det(&k), FieldElement::ONE);
        let a = m(&k, 2, 2, &[1, 2, 1, 2]);
        assert!(a.det(&k).is_zero());
    }
}
