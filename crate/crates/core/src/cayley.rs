//! Quaternions, octonions by Cayley–Dickson doubling, the octonionic Dirac
//! operator on ℂ⁴ and the multipliers commuting with its symbol.
//!
//! Arithmetic is generic over the scalar field so that identities can be
//! checked exactly with `BigRational`.
//!
//! Conjugation-mixed maps `u ↦ Au + Bū` on ℂᵐ are stored as real `2m × 2m`
//! matrices acting on `(Re u, Im u)`.

use crate::error::{invalid, Result};
use crate::linalg::{c, identity};
use crate::{CMat, CVec, Complex64};
use nalgebra::DMatrix;
use num::traits::Num;
use std::fmt::Debug;
use std::ops::Neg;

pub trait Scalar: Num + Neg<Output = Self> + Clone + PartialEq + Debug {}
impl<T: Num + Neg<Output = T> + Clone + PartialEq + Debug> Scalar for T {}

/// `w + x·i + y·j + z·k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Quaternion<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w.clone(), -self.x.clone(), -self.y.clone(), -self.z.clone())
    }

    pub fn norm_sqr(&self) -> T {
        self.w.clone() * self.w.clone()
            + self.x.clone() * self.x.clone()
            + self.y.clone() * self.y.clone()
            + self.z.clone() * self.z.clone()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            self.w.clone() + o.w.clone(),
            self.x.clone() + o.x.clone(),
            self.y.clone() + o.y.clone(),
            self.z.clone() + o.z.clone(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.w.clone(), -self.x.clone(), -self.y.clone(), -self.z.clone())
    }

    /// Hamilton product.
    pub fn mul(&self, o: &Self) -> Self {
        let (a1, b1, c1, d1) = (self.w.clone(), self.x.clone(), self.y.clone(), self.z.clone());
        let (a2, b2, c2, d2) = (o.w.clone(), o.x.clone(), o.y.clone(), o.z.clone());
        Self::new(
            a1.clone() * a2.clone() - b1.clone() * b2.clone() - c1.clone() * c2.clone() - d1.clone() * d2.clone(),
            a1.clone() * b2.clone() + b1.clone() * a2.clone() + c1.clone() * d2.clone() - d1.clone() * c2.clone(),
            a1.clone() * c2.clone() - b1.clone() * d2.clone() + c1.clone() * a2.clone() + d1.clone() * b2.clone(),
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }

    pub fn components(&self) -> [T; 4] {
        [self.w.clone(), self.x.clone(), self.y.clone(), self.z.clone()]
    }
}

/// Cayley–Dickson pair `(a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Octonion<T> {
    pub a: Quaternion<T>,
    pub b: Quaternion<T>,
}

impl<T: Scalar> Octonion<T> {
    pub fn new(a: Quaternion<T>, b: Quaternion<T>) -> Self {
        Octonion { a, b }
    }

    pub fn one() -> Self {
        Self::new(Quaternion::one(), Quaternion::zero())
    }

    /// Basis element `e_m`, `m = 0..8`: `e₀..e₃ = (1, i, j, k; 0)`,
    /// `e₄..e₇ = (0; 1, i, j, k)`.
    pub fn basis(m: usize) -> Self {
        let q = |i: usize| match i {
            0 => Quaternion::one(),
            1 => Quaternion::i(),
            2 => Quaternion::j(),
            _ => Quaternion::k(),
        };
        if m < 4 {
            Self::new(q(m), Quaternion::zero())
        } else {
            Self::new(Quaternion::zero(), q(m - 4))
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.a.sub(&o.a), self.b.sub(&o.b))
    }

    pub fn components(&self) -> Vec<T> {
        self.a.components().into_iter().chain(self.b.components()).collect()
    }
}

/// `(a, b)(c, d) = (ac − d̄b, da + bc̄)`.
pub fn octonion_mult<T: Scalar>(x: &Octonion<T>, y: &Octonion<T>) -> Octonion<T> {
    let (a, b, cq, d) = (&x.a, &x.b, &y.a, &y.b);
    Octonion::new(a.mul(cq).sub(&d.conj().mul(b)), d.mul(a).add(&b.mul(&cq.conj())))
}

/// `[[a, −b], [b̄, ā]]`, determined by the pair `(a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DicksonMatrix<T> {
    pub a: Quaternion<T>,
    pub b: Quaternion<T>,
}

impl<T: Scalar> DicksonMatrix<T> {
    pub fn from_octonion(o: &Octonion<T>) -> Self {
        DicksonMatrix { a: o.a.clone(), b: o.b.clone() }
    }

    pub fn to_octonion(&self) -> Octonion<T> {
        Octonion::new(self.a.clone(), self.b.clone())
    }

    pub fn entries(&self) -> [[Quaternion<T>; 2]; 2] {
        [[self.a.clone(), self.b.neg()], [self.b.conj(), self.a.conj()]]
    }
}

/// Matrix of the Cayley–Dickson product of the underlying pairs.
pub fn dickson_product<T: Scalar>(d: &DicksonMatrix<T>, p: &DicksonMatrix<T>) -> DicksonMatrix<T> {
    DicksonMatrix::from_octonion(&octonion_mult(&d.to_octonion(), &p.to_octonion()))
}

/// The entries of `𝔇𝔓` as displayed:
/// `[[ac − d̄b, −da − bc̄], [c̄b + ād̄, −b̄d + c̄a]]`.
/// The top row agrees with [`dickson_product`]; the true bottom row is
/// `[cb̄ + ād̄, c̄ā − b̄d]`.
pub fn printed_dickson_product<T: Scalar>(d: &DicksonMatrix<T>, p: &DicksonMatrix<T>) -> [[Quaternion<T>; 2]; 2] {
    let (a, b, cq, dq) = (&d.a, &d.b, &p.a, &p.b);
    [
        [a.mul(cq).sub(&dq.conj().mul(b)), dq.mul(a).neg().sub(&b.mul(&cq.conj()))],
        [cq.conj().mul(b).add(&a.conj().mul(&dq.conj())), b.conj().mul(dq).neg().add(&cq.conj().mul(a))],
    ]
}

/// Squared residuals `|D(DP) − (DD)P|²` and `|(PD)D − P(DD)|²`.
pub fn alternativity_check<T: Scalar>(d: &DicksonMatrix<T>, p: &DicksonMatrix<T>) -> (T, T) {
    let dd = dickson_product(d, d);
    let left = dickson_product(d, &dickson_product(d, p)).to_octonion().sub(&dickson_product(&dd, p).to_octonion());
    let right = dickson_product(&dickson_product(p, d), d).to_octonion().sub(&dickson_product(p, &dd).to_octonion());
    (left.norm_sqr(), right.norm_sqr())
}

/// `|x(yz) − (xy)z|²`.
pub fn associator_norm_sqr<T: Scalar>(x: &Octonion<T>, y: &Octonion<T>, z: &Octonion<T>) -> T {
    octonion_mult(x, &octonion_mult(y, z)).sub(&octonion_mult(&octonion_mult(x, y), z)).norm_sqr()
}

/// Real-linear map on ℂᵐ as a real matrix on `(Re u₁..Re uₘ, Im u₁..Im uₘ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealLinearMap {
    pub m: usize,
    pub mat: DMatrix<f64>,
}

impl RealLinearMap {
    /// `u ↦ Au + Bū`.
    pub fn from_parts(a: &CMat, b: &CMat) -> Result<Self> {
        let m = a.nrows();
        if a.ncols() != m || b.nrows() != m || b.ncols() != m {
            return Err(invalid("complex and conjugation parts must be square of the same size"));
        }
        let mut mat = DMatrix::zeros(2 * m, 2 * m);
        for r in 0..m {
            for s in 0..m {
                let (x, y) = (a[(r, s)], b[(r, s)]);
                mat[(r, s)] = x.re + y.re;
                mat[(r, m + s)] = -x.im + y.im;
                mat[(m + r, s)] = x.im + y.im;
                mat[(m + r, m + s)] = x.re - y.re;
            }
        }
        Ok(RealLinearMap { m, mat })
    }

    pub fn complex_linear(a: &CMat) -> Self {
        Self::from_parts(a, &CMat::zeros(a.nrows(), a.nrows())).expect("square")
    }

    pub fn identity(m: usize) -> Self {
        Self::complex_linear(&identity(m))
    }

    pub fn conjugation(m: usize) -> Self {
        Self::from_parts(&CMat::zeros(m, m), &identity(m)).expect("square")
    }

    pub fn zero(m: usize) -> Self {
        RealLinearMap { m, mat: DMatrix::zeros(2 * m, 2 * m) }
    }

    /// Recovers `(A, B)`.
    pub fn parts(&self) -> (CMat, CMat) {
        let m = self.m;
        let g = |r: usize, s: usize| self.mat[(r, s)];
        let a = CMat::from_fn(m, m, |r, s| {
            c((g(r, s) + g(m + r, m + s)) / 2.0, (g(m + r, s) - g(r, m + s)) / 2.0)
        });
        let b = CMat::from_fn(m, m, |r, s| {
            c((g(r, s) - g(m + r, m + s)) / 2.0, (g(m + r, s) + g(r, m + s)) / 2.0)
        });
        (a, b)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &RealLinearMap) -> RealLinearMap {
        RealLinearMap { m: self.m, mat: &self.mat * &other.mat }
    }

    pub fn add(&self, other: &RealLinearMap) -> RealLinearMap {
        RealLinearMap { m: self.m, mat: &self.mat + &other.mat }
    }

    pub fn scale(&self, s: f64) -> RealLinearMap {
        RealLinearMap { m: self.m, mat: &self.mat * s }
    }

    pub fn apply(&self, u: &CVec) -> CVec {
        let m = self.m;
        let x = nalgebra::DVector::from_fn(2 * m, |i, _| if i < m { u[i].re } else { u[i - m].im });
        let y = &self.mat * x;
        CVec::from_fn(m, |i, _| c(y[i], y[m + i]))
    }

    /// `[[tl, tr], [bl, br]]` on ℂᵐ ⊕ ℂᵐ.
    pub fn block2(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Self {
        let m = tl.m;
        let (parts, n) = ([tl, tr, bl, br].map(|x| x.parts()), 2 * m);
        let mut a = CMat::zeros(n, n);
        let mut b = CMat::zeros(n, n);
        for (idx, (pa, pb)) in parts.iter().enumerate() {
            let (r, s) = ((idx / 2) * m, (idx % 2) * m);
            a.view_mut((r, s), (m, m)).copy_from(pa);
            b.view_mut((r, s), (m, m)).copy_from(pb);
        }
        Self::from_parts(&a, &b).expect("square")
    }

    pub fn commutator_norm(&self, other: &RealLinearMap) -> f64 {
        (&self.mat * &other.mat - &other.mat * &self.mat).abs().max()
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.mat.clone().svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn determinant(&self) -> f64 {
        self.mat.determinant()
    }

    /// True when `B = 0`.
    pub fn is_complex_linear(&self, tol: f64) -> bool {
        self.parts().1.iter().all(|z| z.norm() <= tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Deriv {
    /// `∂/∂z̄ⱼ`
    Bar,
    /// `∂/∂zⱼ`
    Hol,
}

/// One entry `sign·∂ⱼ` (optionally followed by conjugation of the input)
/// of the displayed 4×4 operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DisplayEntry {
    pub deriv: Deriv,
    /// 1-based variable index.
    pub j: usize,
    pub sign: i8,
    pub conj: bool,
}

const fn e(deriv: Deriv, j: usize, sign: i8, conj: bool) -> DisplayEntry {
    DisplayEntry { deriv, j, sign, conj }
}

/// The displayed operator on `(u₁, u₂, u₃, u₄)`.
pub const OCTONION_DISPLAY: [[DisplayEntry; 4]; 4] = {
    use Deriv::{Bar, Hol};
    [
        [e(Bar, 1, 1, false), e(Bar, 2, -1, false), e(Bar, 3, -1, true), e(Bar, 4, 1, true)],
        [e(Hol, 2, 1, false), e(Hol, 1, 1, false), e(Bar, 4, 1, true), e(Bar, 3, 1, true)],
        [e(Bar, 3, 1, true), e(Bar, 4, -1, true), e(Bar, 1, 1, false), e(Bar, 2, -1, false)],
        [e(Bar, 4, -1, true), e(Bar, 3, -1, true), e(Hol, 2, 1, false), e(Hol, 1, 1, false)],
    ]
};

/// Reading of a `∂𝔠` entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjOrder {
    /// Differentiate the conjugated input, `u ↦ ∂(ū)`.
    DerivativeOfConjugate,
    /// Conjugate after differentiating, `u ↦ conj(∂u)`.
    ConjugateOfDerivative,
}

#[derive(Clone, Debug)]
pub struct OctonionDirac {
    pub entries: [[DisplayEntry; 4]; 4],
    pub order: ConjOrder,
}

pub fn octonion_dirac(order: ConjOrder) -> OctonionDirac {
    OctonionDirac { entries: OCTONION_DISPLAY, order }
}

impl OctonionDirac {
    /// Principal symbol at `ξ ∈ ℝ⁸`, with `ζⱼ = ξⱼ + iξ₄₊ⱼ`,
    /// `σ(∂̄ⱼ) = −ζⱼ/2`, `σ(∂ⱼ) = −ζ̄ⱼ/2`.
    pub fn symbol(&self, xi: &[f64]) -> Result<RealLinearMap> {
        if xi.len() != 8 {
            return Err(invalid("octonionic covector must have 8 components"));
        }
        let z: Vec<Complex64> = (0..4).map(|j| c(xi[j], xi[4 + j])).collect();
        let mut a = CMat::zeros(4, 4);
        let mut b = CMat::zeros(4, 4);
        for (r, row) in self.entries.iter().enumerate() {
            for (s, en) in row.iter().enumerate() {
                let zj = z[en.j - 1];
                let v = match en.deriv {
                    Deriv::Bar => zj * -0.5,
                    Deriv::Hol => zj.conj() * -0.5,
                } * en.sign as f64;
                match (en.conj, self.order) {
                    (false, _) => a[(r, s)] += v,
                    (true, ConjOrder::DerivativeOfConjugate) => b[(r, s)] += v,
                    (true, ConjOrder::ConjugateOfDerivative) => b[(r, s)] += v.conj(),
                }
            }
        }
        RealLinearMap::from_parts(&a, &b)
    }

    /// `max |SᵀS − |ξ|²/4·I|`; zero for an operator of Dirac type.
    pub fn dirac_residual(&self, xi: &[f64]) -> Result<f64> {
        let s = self.symbol(xi)?;
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        Ok((s.mat.transpose() * &s.mat - DMatrix::identity(8, 8) * (r2 / 4.0)).abs().max())
    }
}

/// Real-linear `X = [[w₁, −w₂𝔠], [w₂𝔠, w₁]]` on ℂ².
pub fn x_form(w1: Complex64, w2: Complex64) -> RealLinearMap {
    let a = CMat::from_diagonal_element(2, 2, w1);
    let b = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), -w2, w2, c(0.0, 0.0)]);
    RealLinearMap::from_parts(&a, &b).expect("2x2")
}

/// Real change of coordinates from `(u₁, u₂, u₃, u₄)` to
/// `v = (u₁, ū₃, u₂, ū₄)`, in which the symbol is left multiplication by
/// a quaternionic Dickson matrix.
pub fn v_coordinates() -> DMatrix<f64> {
    let src = [(0usize, 1.0), (2, -1.0), (1, 1.0), (3, -1.0)];
    let mut p = DMatrix::zeros(8, 8);
    for (i, (s, sg)) in src.iter().enumerate() {
        p[(i, *s)] = 1.0;
        p[(4 + i, 4 + s)] = *sg;
    }
    p
}

/// `M = [[X, −Y∘C], [Y∘C, X]]` assembled in `v`-coordinates (`C` the
/// conjugation of ℂ²) and returned in the coordinates `(u₁, u₂, u₃, u₄)` of
/// the operator.
pub fn commutant_multiplier(x: &RealLinearMap, y: &RealLinearMap) -> Result<RealLinearMap> {
    if x.m != 2 || y.m != 2 {
        return Err(invalid("X and Y must act on C^2"));
    }
    let yc = y.compose(&RealLinearMap::conjugation(2));
    let mv = RealLinearMap::block2(x, &yc.scale(-1.0), &yc, x);
    let p = v_coordinates();
    let pinv = p.clone().try_inverse().expect("permutation with signs");
    Ok(RealLinearMap { m: 4, mat: pinv * mv.mat * p })
}

/// Largest commutator of `m` with the symbol over the given covectors.
pub fn symbol_commutator(op: &OctonionDirac, m: &RealLinearMap, xis: &[Vec<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for xi in xis {
        worst = worst.max(m.commutator_norm(&op.symbol(xi)?));
    }
    Ok(worst)
}

/// `X¹X²` in pair form: `(w₁¹w₁² − w₂¹w̄₂², w₂¹w̄₁² + w₁¹w₂²)`.
pub fn x_algebra_product(x1: (Complex64, Complex64), x2: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let ((a1, b1), (a2, b2)) = (x1, x2);
    (a1 * a2 - b1 * b2.conj(), b1 * a2.conj() + a1 * b2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Invertibility {
    pub invertible: bool,
    /// Determinant of the real 4×4 representation; equals `(|w₁|² + |w₂|²)²`.
    pub real_det: f64,
    /// The closed form `w₁² + |w₂|²`.
    pub printed_det: Complex64,
}

pub fn x_invertibility(w1: Complex64, w2: Complex64) -> Invertibility {
    let det = x_form(w1, w2).determinant();
    Invertibility { invertible: det.abs() > 1e-300, real_det: det, printed_det: w1 * w1 + w2.norm_sqr() }
}
