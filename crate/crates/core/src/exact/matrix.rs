//! Dense matrices over Q(√2): reduced echelon form, kernel, rank, and an
//! exact positive-semidefiniteness test with a constructive witness.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::exact::QSqrt2;

#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<QSqrt2>,
}

/// Outcome of [`ExactMatrix::psd_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsdVerdict {
    /// Positive semidefinite; `pivots` are the strictly positive LDLᵀ pivots in
    /// elimination order as (original index, value).
    Psd { pivots: Vec<(usize, QSqrt2)> },
    /// Not positive semidefinite; `witness` satisfies `vᵀMv < 0` exactly.
    NotPsd { witness: Vec<QSqrt2>, value: QSqrt2 },
}

impl PsdVerdict {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdVerdict::Psd { .. })
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: ExactMatrix,
    pub pivots: Vec<usize>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![QSqrt2::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = QSqrt2::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<QSqrt2>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(ExactMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds the symmetric matrix whose upper triangle (row by row, including
    /// the diagonal) is `upper`.
    pub fn symmetric_from_upper(n: usize, upper: &[QSqrt2]) -> Result<Self> {
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::Dimension(format!(
                "expected {} upper-triangular entries, got {}",
                n * (n + 1) / 2,
                upper.len()
            )));
        }
        let mut m = Self::zeros(n, n);
        let mut it = upper.iter();
        for i in 0..n {
            for j in i..n {
                let v = it.next().expect("length checked").clone();
                m[(j, i)] = v.clone();
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[QSqrt2] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<QSqrt2>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &QSqrt2) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[QSqrt2]) -> Result<Vec<QSqrt2>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `vᵀ M v` for square `M`.
    pub fn quadratic_form(&self, v: &[QSqrt2]) -> Result<QSqrt2> {
        let mv = self.mul_vec(v)?;
        Ok(v.iter().zip(&mv).map(|(a, b)| a * b).sum())
    }

    pub fn to_f64(&self) -> crate::linalg::Matrix {
        crate::linalg::Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let d = &f * &m[(r, j)];
                    m[(i, j)] -= &d;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space, one vector per free column of the RREF.
    /// Each vector has a 1 in its free column and zeros in the other free
    /// columns.
    pub fn kernel(&self) -> Vec<Vec<QSqrt2>> {
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![QSqrt2::zero(); self.cols];
                v[f] = QSqrt2::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -&matrix[(r, f)];
                }
                v
            })
            .collect()
    }

    /// Exact PSD test by symmetric LDLᵀ elimination with diagonal pivoting.
    ///
    /// The elimination matrix `E` is tracked so that the reduced matrix is
    /// `S = E M Eᵀ`; witnesses are rows of `E` (or differences of two rows), so
    /// they live in the original coordinates.
    pub fn psd_check(&self) -> Result<PsdVerdict> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let n = self.rows;
        let mut s = self.clone();
        let mut e = Self::identity(n);
        let mut active: Vec<usize> = (0..n).collect();
        let mut pivots = Vec::new();
        loop {
            if let Some(&i) = active.iter().find(|&&i| s[(i, i)].is_negative()) {
                let witness = e.row(i).to_vec();
                let value = self.quadratic_form(&witness)?;
                return Ok(PsdVerdict::NotPsd { witness, value });
            }
            let Some(pos) = active.iter().position(|&i| s[(i, i)].is_positive()) else {
                break;
            };
            let k = active.remove(pos);
            let d = s[(k, k)].clone();
            let dinv = d.inv().expect("pivot is positive");
            for &i in &active {
                if s[(i, k)].is_zero() {
                    continue;
                }
                let f = &s[(i, k)] * &dinv;
                for &j in &active {
                    let delta = &f * &s[(k, j)];
                    s[(i, j)] -= &delta;
                }
                for j in 0..n {
                    let delta = &f * &e[(k, j)];
                    e[(i, j)] -= &delta;
                }
            }
            for &i in &active {
                s[(i, k)] = QSqrt2::zero();
                s[(k, i)] = QSqrt2::zero();
            }
            pivots.push((k, d));
        }
        // All remaining diagonal entries are zero here.
        for (a, &i) in active.iter().enumerate() {
            for &j in &active[a + 1..] {
                let sij = &s[(i, j)];
                if sij.is_zero() {
                    continue;
                }
                let ei = e.row(i);
                let ej = e.row(j);
                let witness: Vec<QSqrt2> = if sij.is_positive() {
                    ei.iter().zip(ej).map(|(x, y)| x - y).collect()
                } else {
                    ei.iter().zip(ej).map(|(x, y)| x + y).collect()
                };
                let value = self.quadratic_form(&witness)?;
                return Ok(PsdVerdict::NotPsd { witness, value });
            }
        }
        Ok(PsdVerdict::Psd { pivots })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = QSqrt2;
    fn index(&self, (i, j): (usize, usize)) -> &QSqrt2 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut QSqrt2 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> QSqrt2 {
        QSqrt2::from_int(n)
    }

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = m(&[&[1, 1], &[1, 1]]);
        let k = a.kernel();
        assert_eq!(k, vec![vec![q(-1), q(1)]]);
        assert_eq!(a.rank(), 1);
        assert!(ExactMatrix::identity(4).kernel().is_empty());
        assert_eq!(ExactMatrix::zeros(3, 5).rank(), 0);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let s2 = QSqrt2::sqrt2();
        let a = ExactMatrix::from_rows(vec![
            vec![s2.clone(), q(1), q(0), q(2)],
            vec![q(2), s2.clone(), q(0), &s2 * &q(2)],
        ])
        .unwrap();
        let k = a.kernel();
        assert_eq!(k.len() + a.rank(), 4);
        for v in &k {
            assert!(a.mul_vec(v).unwrap().iter().all(QSqrt2::is_zero));
        }
    }

    #[test]
    fn psd_identity_and_swap() {
        assert!(ExactMatrix::identity(5).psd_check().unwrap().is_psd());
        match m(&[&[0, 1], &[1, 0]]).psd_check().unwrap() {
            PsdVerdict::NotPsd { witness, value } => {
                assert_eq!(witness, vec![q(1), q(-1)]);
                assert_eq!(value, q(-2));
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn psd_witness_after_elimination() {
        // [[1,1,0],[1,1,1],[0,1,0]]: pivot 0 leaves a zero diagonal block with
        // an off-diagonal entry.
        let a = m(&[&[1, 1, 0], &[1, 1, 1], &[0, 1, 0]]);
        match a.psd_check().unwrap() {
            PsdVerdict::NotPsd { witness, value } => {
                assert!(value.is_negative());
                assert_eq!(a.quadratic_form(&witness).unwrap(), value);
            }
            v => panic!("unexpected {v:?}"),
        }
        let neg = m(&[&[2, 3], &[3, 2]]);
        assert!(!neg.psd_check().unwrap().is_psd());
    }

    #[test]
    fn non_symmetric_rejected() {
        assert!(matches!(m(&[&[1, 2], &[0, 1]]).psd_check(), Err(Error::NotSymmetric)));
    }
}
