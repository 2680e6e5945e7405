//! Small dense linear algebra: complex matrices of size g ≤ a handful, plus the
//! real symmetric helpers needed to validate Im τ.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<Complex<T>>]) -> Self {
        let c = columns.len();
        let r = columns.first().map_or(0, |col| col.len());
        Self::from_fn(r, c, |i, j| columns[j][i])
    }

    pub fn diagonal(values: &[Complex<T>]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { Complex::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<Complex<T>> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Complex::zero(), |acc, j| acc + self[(i, j)] * v[j])
            })
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |s, i| s + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }

    /// LU factorisation with partial pivoting; returns the packed factors, the
    /// row permutation and the permutation sign, or `None` if a pivot is zero.
    fn lu(&self) -> Option<(Vec<Complex<T>>, Vec<usize>, T)> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].norm().partial_cmp(&a[y * n + k].norm()).unwrap())
                .unwrap();
            if a[p * n + k].is_zero() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] = a[i * n + j] - f * t;
                }
            }
        }
        Some((a, perm, sign))
    }

    pub fn determinant(&self) -> Complex<T> {
        assert!(self.is_square());
        if self.rows == 0 {
            return Complex::new(T::one(), T::zero());
        }
        match self.lu() {
            None => Complex::zero(),
            Some((a, _, sign)) => {
                let n = self.rows;
                (0..n).fold(Complex::new(sign, T::zero()), |d, k| d * a[k * n + k])
            }
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.rows;
        let (a, perm, _) = self.lu()?;
        let mut inv = Self::zeros(n, n);
        for col in 0..n {
            // Solve L U x = P e_col.
            let mut x: Vec<Complex<T>> = (0..n)
                .map(|i| {
                    if perm[i] == col {
                        Complex::new(T::one(), T::zero())
                    } else {
                        Complex::zero()
                    }
                })
                .collect();
            for i in 0..n {
                for j in 0..i {
                    let t = a[i * n + j] * x[j];
                    x[i] = x[i] - t;
                }
            }
            for i in (0..n).rev() {
                for j in i + 1..n {
                    let t = a[i * n + j] * x[j];
                    x[i] = x[i] - t;
                }
                x[i] = x[i] / a[i * n + i];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Some(inv)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let n = self.rows;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != skip_row) {
            for j in (0..n).filter(|&j| j != skip_col) {
                data.push(self[(i, j)]);
            }
        }
        Self {
            rows: n - 1,
            cols: n - 1,
            data,
        }
    }

    /// Classical adjugate from cofactors, `Adj(M)_{ij} = (-1)^{i+j} det M_{(j,i)}`.
    pub fn adjugate(&self) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        if n == 1 {
            return Self::identity(1);
        }
        Self::from_fn(n, n, |i, j| {
            let c = self.minor(j, i).determinant();
            if (i + j) % 2 == 0 {
                c
            } else {
                -c
            }
        })
    }

    /// 1-norm condition number, `None` when singular.
    pub fn condition_number(&self) -> Option<T> {
        self.inverse().map(|inv| self.norm1() * inv.norm1())
    }

    pub fn re(&self) -> Vec<T> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<T> {
        self.data.iter().map(|z| z.im).collect()
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows);
        CMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(Complex::zero(), |acc, k| acc + self[(i, k)] * rhs[(k, j)])
        })
    }
}

/// Lower Cholesky factor of a real symmetric `n×n` matrix (row-major), or `None`
/// if it is not positive definite.
pub fn cholesky<T: Real>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Real>(a: &[T], n: usize) -> Vec<T> {
    let mut m = a.to_vec();
    // Symmetrise so that tiny input asymmetry does not stall the sweeps.
    for i in 0..n {
        for j in i + 1..n {
            let avg = (m[i * n + j] + m[j * n + i]) / T::lit(2.0);
            m[i * n + j] = avg;
            m[j * n + i] = avg;
        }
    }
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |s, (i, j)| s + m[i * n + j] * m[i * n + j]);
        let diag: T = (0..n).fold(T::zero(), |s, i| s + m[i * n + i] * m[i * n + i]);
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Inverse of a real symmetric positive definite matrix from its Cholesky factor.
pub fn spd_inverse<T: Real>(l: &[T], n: usize) -> Vec<T> {
    let mut inv = vec![T::zero(); n * n];
    for col in 0..n {
        let mut x = vec![T::zero(); n];
        x[col] = T::one();
        for i in 0..n {
            for k in 0..i {
                x[i] = x[i] - l[i * n + k] * x[k];
            }
            x[i] = x[i] / l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] = x[i] - l[k * n + i] * x[k];
            }
            x[i] = x[i] / l[i * n + i];
        }
        for i in 0..n {
            inv[i * n + col] = x[i];
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sample() -> CMatrix<f64> {
        CMatrix::from_rows(&[
            vec![c(2.0, 1.0), c(0.5, 0.0), c(-1.0, 2.0)],
            vec![c(0.0, -1.0), c(3.0, 0.0), c(1.0, 1.0)],
            vec![c(1.0, 0.0), c(-2.0, 0.5), c(0.0, 4.0)],
        ])
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = sample();
        let p = &m * &m.inverse().unwrap();
        assert!(p.sub(&CMatrix::identity(3)).max_abs() < 1e-13);
    }

    #[test]
    fn adjugate_is_det_times_inverse() {
        let m = sample();
        let adj = m.adjugate();
        let other = m.inverse().unwrap().scale(m.determinant());
        assert!(adj.sub(&other).max_abs() < 1e-12);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = sample();
        let expansion = (0..3).fold(Complex::zero(), |s, j| {
            let minor = m.minor(0, j).determinant();
            let term = m[(0, j)] * minor;
            if j % 2 == 0 {
                s + term
            } else {
                s - term
            }
        });
        assert!((m.determinant() - expansion).norm() < 1e-12);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(m.inverse().is_none());
        assert_eq!(m.determinant(), Complex::zero());
    }

    #[test]
    fn jacobi_eigenvalues_of_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let ev = symmetric_eigenvalues(&[2.0f64, 1.0, 1.0, 2.0], 2);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
        let l = cholesky(&[4.0f64, 2.0, 2.0, 3.0], 2).unwrap();
        let inv = spd_inverse(&l, 2);
        // [[4,2],[2,3]]^{-1} = [[3,-2],[-2,4]]/8
        let want = [0.375, -0.25, -0.25, 0.5];
        for (a, b) in inv.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
