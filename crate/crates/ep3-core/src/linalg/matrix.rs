use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

// f64 math methods come from the trait when building without std
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float as _;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::CoreError;

/// Dense square complex matrix, row-major storage.
///
/// The `symmetric` flag certifies that `entries[i][j] == entries[j][i]`
/// exactly as stored; constructors that set it verify the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
    symmetric: bool,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        ComplexMatrix { n, data: vec![Complex64::zero(); n * n], symmetric: true }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m.symmetric = true;
        m
    }

    /// Build from row-major entries. Fails on non-square data or non-finite
    /// entries. The symmetry flag is set automatically when the entries are
    /// bitwise symmetric.
    pub fn from_rows(n: usize, entries: &[Complex64]) -> Result<Self, CoreError> {
        if n == 0 || entries.len() != n * n {
            return Err(CoreError::InvalidInput("entry count does not match dimension"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoreError::InvalidInput("matrix entries must be finite"));
        }
        let mut m = ComplexMatrix { n, data: entries.to_vec(), symmetric: false };
        m.symmetric = m.check_symmetric();
        Ok(m)
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m.symmetric = true;
        m
    }

    fn check_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut t = ComplexMatrix { n: self.n, data: self.data.clone(), symmetric: self.symmetric };
        for i in 0..self.n {
            for j in 0..i {
                let a = self[(i, j)];
                t[(i, j)] = self[(j, i)];
                t[(j, i)] = a;
            }
        }
        t.symmetric = self.symmetric;
        t
    }

    pub fn mul_mat(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = ComplexMatrix { n, data: vec![Complex64::zero(); n * n], symmetric: false };
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        let mut out = ComplexVector::zeros(self.n);
        for i in 0..self.n {
            let mut acc = Complex64::zero();
            for j in 0..self.n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { n: self.n, data, symmetric: self.symmetric && other.symmetric }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { n: self.n, data, symmetric: self.symmetric && other.symmetric }
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        ComplexMatrix { n: self.n, data, symmetric: self.symmetric }
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: Complex64) -> ComplexMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= shift;
        }
        m.symmetric = self.symmetric;
        m
    }

    /// Rank-one outer product `a b^T` (bilinear, no conjugation).
    pub fn outer(a: &ComplexVector, b: &ComplexVector) -> ComplexMatrix {
        assert_eq!(a.len(), b.len(), "dimension mismatch");
        let n = a.len();
        let mut m = ComplexMatrix { n, data: vec![Complex64::zero(); n * n], symmetric: false };
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = a[i] * b[j];
            }
        }
        m.symmetric = m.check_symmetric();
        m
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        // mutation may break stored symmetry; re-certified lazily
        self.symmetric = false;
        &mut self.data[i * self.n + j]
    }
}

/// Dense complex vector; carries no implicit normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn zeros(n: usize) -> Self {
        ComplexVector { data: vec![Complex64::zero(); n] }
    }

    pub fn from_slice(entries: &[Complex64]) -> Self {
        ComplexVector { data: entries.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Hermitian norm `sqrt(sum |x_i|^2)`.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> ComplexVector {
        ComplexVector { data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn add(&self, other: &ComplexVector) -> ComplexVector {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        ComplexVector { data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &ComplexVector) -> ComplexVector {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        ComplexVector { data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    /// Hermitian inner product `<self, other> = sum conj(self_i) other_i`.
    pub fn hdot(&self, other: &ComplexVector) -> Complex64 {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.data[i]
    }
}

/// Bilinear c-product `a^T b` (no conjugation); the natural pairing for
/// complex symmetric matrices. Symmetric in its arguments.
pub fn c_dot(a: &ComplexVector, b: &ComplexVector) -> Result<Complex64, CoreError> {
    if a.len() != b.len() {
        return Err(CoreError::InvalidInput("c_dot length mismatch"));
    }
    Ok(a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symmetry_flag_detection() {
        let m = ComplexMatrix::from_rows(2, &[z(0.0, 1.0), z(1.0, 0.0), z(1.0, 0.0), z(0.0, -1.0)])
            .unwrap();
        assert!(m.is_symmetric());
        let m = ComplexMatrix::from_rows(2, &[z(0.0, 0.0), z(1.0, 0.0), z(0.0, 0.0), z(0.0, 0.0)])
            .unwrap();
        assert!(!m.is_symmetric());
    }

    #[test]
    fn rejects_nonfinite() {
        let bad = [z(f64::NAN, 0.0), z(0.0, 0.0), z(0.0, 0.0), z(0.0, 0.0)];
        assert!(ComplexMatrix::from_rows(2, &bad).is_err());
    }

    #[test]
    fn c_dot_self_orthogonal_pair() {
        let a = ComplexVector::from_slice(&[z(1.0, 0.0), z(0.0, 1.0)]);
        assert!(c_dot(&a, &a).unwrap().norm() < 1e-15);
    }

    #[test]
    fn c_dot_waveguide_kernel_direction() {
        // (1, i sqrt(2), -1) is self-orthogonal: 1 - 2 + 1 = 0
        let s2 = 2.0_f64.sqrt();
        let u = ComplexVector::from_slice(&[z(1.0, 0.0), z(0.0, s2), z(-1.0, 0.0)]);
        assert!(c_dot(&u, &u).unwrap().norm() < 1e-15);
    }

    #[test]
    fn c_dot_unit_basis() {
        let e0 = ComplexVector::from_slice(&[z(1.0, 0.0), z(0.0, 0.0)]);
        let e1 = ComplexVector::from_slice(&[z(0.0, 0.0), z(1.0, 0.0)]);
        assert_eq!(c_dot(&e0, &e1).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn c_dot_length_mismatch() {
        let a = ComplexVector::zeros(2);
        let b = ComplexVector::zeros(3);
        assert!(c_dot(&a, &b).is_err());
    }
}
