//! Dense complex linear algebra helpers on top of nalgebra.

use crate::{CMat, Complex64};
use nalgebra::DMatrix;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Orthonormal basis (as columns) for the range of a near-projection:
/// left singular vectors whose singular value exceeds one half.
pub fn range_basis(p: &CMat) -> CMat {
    let svd = p.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 0.5)
        .collect();
    CMat::from_fn(p.nrows(), cols.len(), |r, j| u[(r, cols[j])])
}

/// Complex product computed with real GEMMs, which nalgebra dispatches to an
/// optimized kernel (the generic complex path is several times slower).
pub fn split_mul(a: &SplitMat, b: &SplitMat) -> SplitMat {
    let rr = &a.re * &b.re;
    let ii = &a.im * &b.im;
    let ri = &a.re * &b.im;
    let ir = &a.im * &b.re;
    SplitMat {
        re: rr - ii,
        im: ri + ir,
    }
}

/// A complex matrix stored as separate real and imaginary parts.
#[derive(Clone, Debug)]
pub struct SplitMat {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl SplitMat {
    pub fn zeros(r: usize, c: usize) -> Self {
        SplitMat {
            re: DMatrix::zeros(r, c),
            im: DMatrix::zeros(r, c),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, z: Complex64) {
        self.re[(r, c)] = z.re;
        self.im[(r, c)] = z.im;
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        Complex64::new(self.re[(r, c)], self.im[(r, c)])
    }

    pub fn to_complex(&self) -> CMat {
        CMat::from_fn(self.re.nrows(), self.re.ncols(), |r, c| self.get(r, c))
    }
}

/// `D^{1/2} M D^{-1/2}` for a positive diagonal `d`.
pub fn diag_similarity(m: &CMat, d: &[f64]) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * (d[r] / d[c]).sqrt())
}
