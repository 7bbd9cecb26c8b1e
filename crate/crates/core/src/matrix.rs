//! Dense complex matrix newtype.
//!
//! [`Matrix`] wraps a `nalgebra::DMatrix<Complex<f64>>` and guarantees that
//! every entry is finite at construction. Values are immutable once built;
//! arithmetic produces new matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Result, WmpError};

/// Complex double-precision scalar.
pub type C64 = Complex<f64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<C64>);

impl Matrix {
    /// Builds a matrix from row-major complex entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(WmpError::dims(
                "Matrix::new",
                format!("{} entries for a {rows}x{cols} matrix", entries.len()),
            ));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Builds a matrix from row-major real entries (zero imaginary parts).
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| c64(x, 0.0)).collect())
    }

    /// Builds a matrix from separate row-major real and imaginary parts.
    pub fn from_parts(rows: usize, cols: usize, re: &[f64], im: Option<&[f64]>) -> Result<Self> {
        match im {
            None => Self::from_real(rows, cols, re),
            Some(im) => {
                if im.len() != re.len() {
                    return Err(WmpError::dims(
                        "Matrix::from_parts",
                        format!("{} real parts but {} imaginary parts", re.len(), im.len()),
                    ));
                }
                let entries = re.iter().zip(im).map(|(&r, &i)| c64(r, i)).collect();
                Self::new(rows, cols, entries)
            }
        }
    }

    /// Wraps an existing nalgebra matrix after checking finiteness.
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(WmpError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Matrix(m))
    }

    /// Wraps a computed matrix. Results derived from finite inputs by
    /// bounded arithmetic stay finite; this is only used internally.
    #[inline]
    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        Matrix(m)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { c64(diag[i], 0.0) } else { c64(0.0, 0.0) })
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
        let (m, n) = (a.rows() + b.rows(), a.cols() + b.cols());
        let mut out = DMatrix::zeros(m, n);
        out.view_mut((0, 0), (a.rows(), a.cols())).copy_from(&a.0);
        out.view_mut((a.rows(), a.cols()), (b.rows(), b.cols())).copy_from(&b.0);
        Matrix(out)
    }

    /// Stacks `top` over `bottom`.
    pub fn vstack(top: &Matrix, bottom: &Matrix) -> Result<Matrix> {
        if top.cols() != bottom.cols() {
            return Err(WmpError::dims(
                "vstack",
                format!("{} vs {} columns", top.cols(), bottom.cols()),
            ));
        }
        let mut out = DMatrix::zeros(top.rows() + bottom.rows(), top.cols());
        out.view_mut((0, 0), (top.rows(), top.cols())).copy_from(&top.0);
        out.view_mut((top.rows(), 0), (bottom.rows(), bottom.cols()))
            .copy_from(&bottom.0);
        Ok(Matrix(out))
    }

    /// Copies the `nrows x ncols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nrows: usize, ncols: usize) -> Matrix {
        Matrix(self.0.view((r0, c0), (nrows, ncols)).into_owned())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    #[inline]
    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix(self.0.map(|z| z * s))
    }

    pub fn scale_complex(&self, s: C64) -> Matrix {
        Matrix(self.0.map(|z| z * s))
    }

    /// `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Matrix {
        Matrix((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Matrix-vector product with a plain slice.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols(), "apply: vector length");
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * x[j]).sum())
            .collect()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows(), self.cols())?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(6);
        let real = self.is_real();
        writeln!(f, "[")?;
        for i in 0..self.rows() {
            write!(f, " ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                if real {
                    write!(f, " {:>w$.p$}", z.re, w = prec + 8, p = prec)?;
                } else {
                    write!(f, " {:>w$.p$}{:+.p$}i", z.re, z.im, w = prec + 8, p = prec)?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl From<Matrix> for DMatrix<C64> {
    fn from(m: Matrix) -> Self {
        m.0
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a, 'b> $tr<&'b Matrix> for &'a Matrix {
            type Output = Matrix;
            #[inline]
            fn $method(self, rhs: &'b Matrix) -> Matrix {
                Matrix(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Matrix> for Matrix {
            type Output = Matrix;
            #[inline]
            fn $method(self, rhs: Matrix) -> Matrix {
                Matrix(&self.0 $op &rhs.0)
            }
        }
        impl<'b> $tr<&'b Matrix> for Matrix {
            type Output = Matrix;
            #[inline]
            fn $method(self, rhs: &'b Matrix) -> Matrix {
                Matrix(&self.0 $op &rhs.0)
            }
        }
        impl<'a> $tr<Matrix> for &'a Matrix {
            type Output = Matrix;
            #[inline]
            fn $method(self, rhs: Matrix) -> Matrix {
                Matrix(&self.0 $op &rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-self.0)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_entry_count() {
        assert!(matches!(
            Matrix::from_real(2, 2, &[1.0, 2.0, 3.0]),
            Err(WmpError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let err = Matrix::from_real(2, 2, &[1.0, f64::NAN, 0.0, 1.0]).unwrap_err();
        assert_eq!(err, WmpError::NonFinite { row: 0, col: 1 });
        let err = Matrix::new(1, 1, vec![c64(0.0, f64::INFINITY)]).unwrap_err();
        assert_eq!(err, WmpError::NonFinite { row: 0, col: 0 });
    }

    #[test]
    fn row_major_round_trip() {
        let m = Matrix::from_real(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.get(0, 2).re, 3.0);
        assert_eq!(m.get(1, 0).re, 4.0);
        let back = Matrix::new(2, 3, m.to_row_major()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn stacking_and_blocks() {
        let a = Matrix::from_real(1, 2, &[1.0, 2.0]).unwrap();
        let b = Matrix::from_real(1, 2, &[3.0, 4.0]).unwrap();
        let s = Matrix::vstack(&a, &b).unwrap();
        assert_eq!(s.shape(), (2, 2));
        assert_eq!(s.block(1, 0, 1, 2), b);
        let d = Matrix::block_diag(&a, &b);
        assert_eq!(d.shape(), (2, 4));
        assert_eq!(d.get(1, 3).re, 4.0);
        assert_eq!(d.get(0, 3).re, 0.0);
        assert!(Matrix::vstack(&a, &Matrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn adjoint_conjugates() {
        let m = Matrix::new(1, 2, vec![c64(1.0, 2.0), c64(3.0, -1.0)]).unwrap();
        let h = m.adjoint();
        assert_eq!(h.shape(), (2, 1));
        assert_eq!(h.get(0, 0), c64(1.0, -2.0));
        assert_eq!(h.get(1, 0), c64(3.0, 1.0));
    }
}
