//! Dense exact linear algebra over the rationals.
//!
//! Sizes in this crate are small (tens of rows), so a straightforward
//! fraction-based Gaussian elimination with first-nonzero pivoting is both
//! fast enough and deterministic.

use std::fmt;

use num::Zero;

use super::rational::{rat_int, Rational};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![rat_int(0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, rat_int(1));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = QMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j).clone() + a.clone() * other.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> QMatrix {
        assert_eq!(self.rows, self.cols);
        let mut out = QMatrix::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = rat_int(0);
                for j in 0..self.cols {
                    if !self.get(i, j).is_zero() && !v[j].is_zero() {
                        acc += self.get(i, j).clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form plus the pivot column of each nonzero row.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    let a = m.get(r, j).clone();
                    let b = m.get(pr, j).clone();
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = m.get(r, c).clone();
            for j in 0..m.cols {
                let v = m.get(r, j).clone() / inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in 0..m.cols {
                        let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace, one vector per free column, in
    /// deterministic (free-column-ascending) order.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        let is_pivot = |c: usize| pivots.contains(&c);
        for fc in 0..self.cols {
            if is_pivot(fc) {
                continue;
            }
            let mut v = vec![rat_int(0); self.cols];
            v[fc] = rat_int(1);
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(ri, fc).clone();
            }
            out.push(v);
        }
        out
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Row-reduce a list of coordinate vectors into a canonical basis of their
/// span (RREF rows, zero rows dropped).
pub fn span_basis(vecs: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    if vecs.is_empty() {
        return Vec::new();
    }
    let m = QMatrix::from_rows(vecs.to_vec());
    let (r, pivots) = m.rref();
    (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
}

/// Membership of `v` in the row span of an RREF basis.
pub fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    reduce_against(basis, v).iter().all(|x| x.is_zero())
}

/// Reduce `v` against RREF basis rows (subtract the unique combination that
/// clears the pivot coordinates); the remainder is zero iff `v` is in the
/// span. Linear in `v`.
pub fn reduce_against(basis: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    let mut w = v.to_vec();
    for row in basis {
        let Some(pc) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if w[pc].is_zero() {
            continue;
        }
        let f = w[pc].clone() / row[pc].clone();
        for j in 0..w.len() {
            w[j] = w[j].clone() - f.clone() * row[j].clone();
        }
    }
    w
}
