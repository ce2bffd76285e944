//! Toeplitz operators `T_M = ΠM` with matrix multipliers, the extension
//! `E_Ψ = T_ΨΠ + (I − Π)`, two independent index computations on the
//! circle, and the semicommutator `T_{M¹}T_{M²} − T_{M¹M²}`.

use crate::boundary_ops::BoundaryOperator;
use crate::error::{invalid, Error, Result};
use crate::geometry::{BoundaryGrid, GridLayout};
use crate::linalg::{c, identity, max_abs, range_basis, singular_values, spectral_norm};
use crate::{CMat, CVec, Complex64};
use rustfft::FftPlanner;
use serde::Serialize;

/// A `k × k` matrix at every node.
#[derive(Clone, Debug)]
pub struct Multiplier {
    pub k: usize,
    pub values: Vec<CMat>,
    pub descriptor: String,
}

impl Multiplier {
    pub fn from_fn(grid: &BoundaryGrid, k: usize, descriptor: &str, f: impl Fn(&[Complex64]) -> CMat) -> Result<Self> {
        let values: Vec<CMat> = (0..grid.len()).map(|i| f(&grid.complex_node(i))).collect();
        if values.iter().any(|m| m.nrows() != k || m.ncols() != k) {
            return Err(invalid("multiplier values must be k x k"));
        }
        let m = Multiplier { k, values, descriptor: descriptor.into() };
        if !m.sup_norm().is_finite() {
            return Err(invalid("multiplier is not bounded"));
        }
        Ok(m)
    }

    /// Scalar multiplier `m(θ)` on a circle grid.
    pub fn circle(grid: &BoundaryGrid, descriptor: &str, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::from_fn(grid, 1, descriptor, |z| CMat::from_element(1, 1, f(z[0].arg())))
    }

    /// `e^{ikθ}` on a circle grid.
    pub fn circle_mode(grid: &BoundaryGrid, k: i64) -> Result<Self> {
        Self::circle(grid, &format!("exp({k}i theta)"), |t| {
            let a = k as f64 * t;
            c(a.cos(), a.sin())
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    /// Block-diagonal matrix on the density space.
    pub fn to_matrix(&self) -> CMat {
        let k = self.k;
        let mut m = CMat::zeros(k * self.values.len(), k * self.values.len());
        for (i, v) in self.values.iter().enumerate() {
            m.view_mut((i * k, i * k), (k, k)).copy_from(v);
        }
        m
    }

    /// Pointwise product `self·other`.
    pub fn product(&self, other: &Multiplier) -> Result<Multiplier> {
        if self.k != other.k || self.values.len() != other.values.len() {
            return Err(invalid("multipliers live on different spaces"));
        }
        Ok(Multiplier {
            k: self.k,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
            descriptor: format!("({})*({})", self.descriptor, other.descriptor),
        })
    }

    /// Scalar samples of a `1 × 1` multiplier.
    pub fn scalar_samples(&self) -> Result<Vec<Complex64>> {
        if self.k != 1 {
            return Err(invalid("multiplier is not scalar"));
        }
        Ok(self.values.iter().map(|m| m[(0, 0)]).collect())
    }
}

fn check_space(pi: &BoundaryOperator, m: &Multiplier) -> Result<()> {
    if pi.k != m.k || pi.weights.len() != m.values.len() {
        return Err(invalid("multiplier and projection live on different grids"));
    }
    Ok(())
}

/// `Π_h ∘ M` on the full density space (label `T_M`).
pub fn toeplitz_op(pi: &BoundaryOperator, m: &Multiplier) -> Result<BoundaryOperator> {
    check_space(pi, m)?;
    BoundaryOperator::dense("T_M", m.k, pi.weights.clone(), pi.to_dense()? * m.to_matrix())
}

/// `T·Π_h + (I − Π_h)` (label `E_Ψ`).
pub fn extension_op(t: &BoundaryOperator, pi: &BoundaryOperator) -> Result<BoundaryOperator> {
    if t.dim() != pi.dim() {
        return Err(invalid("operators live on different spaces"));
    }
    let p = pi.to_dense()?;
    let e = t.to_dense()? * &p + identity(p.nrows()) - &p;
    BoundaryOperator::dense("E_Ψ", t.k, pi.weights.clone(), e)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Winding {
    pub winding: i64,
    /// `−winding`, the index of the scalar Toeplitz operator.
    pub index: i64,
}

/// Winding number of closed-curve samples by summed phase increments.
pub fn winding_index(samples: &[Complex64]) -> Result<Winding> {
    if samples.len() < 3 {
        return Err(invalid("need at least three samples"));
    }
    let scale = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(i) = samples.iter().position(|z| z.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::NonFredholm(format!("symbol vanishes at sample {i}")));
    }
    let mut total = 0.0;
    for i in 0..samples.len() {
        let step = (samples[(i + 1) % samples.len()] / samples[i]).arg();
        if step.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::Resolution(format!("phase jumps by {step:.3} at sample {i}")));
        }
        total += step;
    }
    let winding = (total / (2.0 * std::f64::consts::PI)).round() as i64;
    Ok(Winding { winding, index: -winding })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelCount {
    pub ker: usize,
    pub coker: usize,
    pub index: i64,
    /// Some near-null vector had a low-mode energy fraction within 0.1 of the
    /// threshold; the counts are not trustworthy.
    pub inconclusive: bool,
}

/// Fraction of energy in Fourier modes `|m| < N/4` of a circle density.
fn low_mode_fraction(x: &CVec) -> f64 {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().copied().collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let total: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
    let low: f64 = buf
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let m = if *i < n / 2 { *i as i64 } else { *i as i64 - n as i64 };
            m.unsigned_abs() < (n / 4) as u64
        })
        .map(|(_, z)| z.norm_sqr())
        .sum();
    if total == 0.0 {
        0.0
    } else {
        low / total
    }
}

pub const AMBIGUITY_BAND: f64 = 0.1;

/// Finite-section estimate of `dim ker` and `dim coker` of `T` on `ran P`
/// (`P = I` when `restrict` is `None`). Singular vectors below `tau` are
/// counted when at least `eta` of their energy lies in the lower half of the
/// mode spectrum; the rest are truncation artifacts at the top of the band.
pub fn numeric_kernel_count(
    t: &BoundaryOperator,
    restrict: Option<&BoundaryOperator>,
    grid: &BoundaryGrid,
    tau: f64,
    eta: f64,
) -> Result<KernelCount> {
    if !matches!(grid.layout, GridLayout::Circle { .. }) || t.k != 1 {
        return Err(invalid("kernel counting needs scalar densities on a circle grid"));
    }
    let m = t.to_dense()?;
    let q = match restrict {
        Some(p) => range_basis(&p.to_dense()?),
        None => identity(m.nrows()),
    };
    let a = q.adjoint() * &m * &q;
    let svd = a.svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut ker = 0;
    let mut coker = 0;
    let mut inconclusive = false;
    for (j, s) in svd.singular_values.iter().enumerate() {
        if *s >= tau {
            continue;
        }
        let right = &q * vt.row(j).adjoint();
        let left = &q * u.column(j);
        for (vec, count) in [(right, &mut ker), (left, &mut coker)] {
            let f = low_mode_fraction(&vec);
            // open band: a clean fraction of 1 with η = 0.9 is not ambiguous
            if (f - eta).abs() < AMBIGUITY_BAND - 1e-9 {
                inconclusive = true;
            }
            if f >= eta {
                *count += 1;
            }
        }
    }
    Ok(KernelCount { ker, coker, index: ker as i64 - coker as i64, inconclusive })
}

#[derive(Clone, Debug)]
pub struct Semicommutator {
    /// `(T_{M¹}T_{M²} − T_{M¹M²})` applied to an orthonormal basis of `ran Π_h`.
    pub restricted: CMat,
    /// Singular values of `restricted`, descending.
    pub singular_values: Vec<f64>,
    /// `‖(T_{M¹}T_{M²} − T_{M¹M²} + [C,M¹](½M² − CM²))Q‖ / (‖M¹‖‖M²‖)`.
    pub identity_residual: f64,
}

/// Semicommutator of two multipliers on `ran Π_h`, together with the exact
/// identity `T_{M¹}T_{M²} = T_{M¹M²} − [C, M¹](½M² − CM²)` (valid whenever
/// `C² = I/4`).
pub fn semicommutator(pi: &BoundaryOperator, m1: &Multiplier, m2: &Multiplier) -> Result<Semicommutator> {
    check_space(pi, m1)?;
    check_space(pi, m2)?;
    let p = pi.to_dense()?;
    let n = p.nrows();
    let cm = &p - identity(n) * c(0.5, 0.0);
    let (a, b) = (m1.to_matrix(), m2.to_matrix());
    let t1 = &p * &a;
    let t2 = &p * &b;
    let t12 = &p * m1.product(m2)?.to_matrix();
    let q = range_basis(&p);
    let r = (&t1 * &t2 - &t12) * &q;
    let comm = &cm * &a - &a * &cm;
    let corr = comm * (&b * c(0.5, 0.0) - &cm * &b) * &q;
    let scale = (m1.sup_norm() * m2.sup_norm()).max(f64::MIN_POSITIVE);
    let identity_residual = spectral_norm(&(&r + corr)) / scale;
    let singular_values = singular_values(&r);
    Ok(Semicommutator { restricted: r, singular_values, identity_residual })
}

/// `σⱼ ≤ σ₁·(j₀/j)^p` for all `j ≥ j₀` (1-based `j`).
pub fn decays_like(svs: &[f64], j0: usize, p: f64) -> bool {
    let s1 = svs.first().copied().unwrap_or(0.0);
    svs.iter().enumerate().skip(j0 - 1).all(|(i, s)| *s <= s1 * (j0 as f64 / (i + 1) as f64).powf(p) + 1e-14)
}

/// Number of singular values above `tol`.
pub fn numerical_rank(svs: &[f64], tol: f64) -> usize {
    svs.iter().filter(|s| **s > tol).count()
}

/// `‖(T_E − I)Π_h‖` in the Euclidean norm; zero when `Π_h` is a projection.
pub fn identity_toeplitz_defect(pi: &BoundaryOperator) -> Result<f64> {
    let p = pi.to_dense()?;
    Ok(max_abs(&(&p * &p - &p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_ops::{assemble_cauchy, fourier_mode, szego_projection};
    use crate::clifford::build_dirac;
    use crate::geometry::make_circle_grid;

    fn setup(n: usize) -> (BoundaryGrid, BoundaryOperator) {
        let g = make_circle_grid(n, 1.0).unwrap();
        let pi = szego_projection(&assemble_cauchy(&build_dirac(1).unwrap(), &g).unwrap());
        (g, pi)
    }

    #[test]
    fn shifts() {
        let (g, pi) = setup(256);
        let up = toeplitz_op(&pi, &Multiplier::circle_mode(&g, 1).unwrap()).unwrap();
        let down = toeplitz_op(&pi, &Multiplier::circle_mode(&g, -1).unwrap()).unwrap();
        for k in 0..5 {
            let u = fourier_mode(&g, k).values;
            assert!((up.apply(&u).unwrap() - fourier_mode(&g, k + 1).values).camax() < 1e-9);
            let want = if k == 0 { CVec::zeros(256) } else { fourier_mode(&g, k - 1).values };
            assert!((down.apply(&u).unwrap() - want).camax() < 1e-9);
        }
        let te = toeplitz_op(&pi, &Multiplier::circle(&g, "1", |_| c(1.0, 0.0)).unwrap()).unwrap();
        let p = pi.to_dense().unwrap();
        assert!(max_abs(&(te.to_dense().unwrap() * &p - &p)) <= identity_toeplitz_defect(&pi).unwrap() + 1e-12);
    }

    #[test]
    fn extension_of_identity_is_identity() {
        let (_, pi) = setup(32);
        let e = extension_op(&pi, &pi).unwrap();
        assert!(max_abs(&(e.to_dense().unwrap() - identity(32))) < 1e-12);
    }

    #[test]
    fn winding_values() {
        let th: Vec<f64> = (0..64).map(|i| 2.0 * std::f64::consts::PI * i as f64 / 64.0).collect();
        let w = |k: f64| th.iter().map(|t| c((k * t).cos(), (k * t).sin())).collect::<Vec<_>>();
        assert_eq!(winding_index(&w(1.0)).unwrap(), Winding { winding: 1, index: -1 });
        assert_eq!(winding_index(&w(-2.0)).unwrap(), Winding { winding: -2, index: 2 });
        assert_eq!(winding_index(&vec![c(2.0, 0.0); 8]).unwrap().winding, 0);
        let cos: Vec<Complex64> = (0..64).map(|i| c((2.0 * std::f64::consts::PI * i as f64 / 64.0).cos(), 0.0)).collect();
        assert!(matches!(winding_index(&cos), Err(Error::NonFredholm(_))));
        assert!(matches!(winding_index(&w(1.0)[..].iter().step_by(16).copied().collect::<Vec<_>>()), Err(Error::Resolution(_))));
    }

    #[test]
    fn kernel_counts() {
        let (g, pi) = setup(128);
        let count = |k: i64| {
            let t = toeplitz_op(&pi, &Multiplier::circle_mode(&g, k).unwrap()).unwrap();
            numeric_kernel_count(&t, Some(&pi), &g, 1e-6, 0.9).unwrap()
        };
        assert_eq!(count(-1), KernelCount { ker: 1, coker: 0, index: 1, inconclusive: false });
        assert_eq!(count(1), KernelCount { ker: 0, coker: 1, index: -1, inconclusive: false });
        let t = toeplitz_op(&pi, &Multiplier::circle(&g, "2", |_| c(2.0, 0.0)).unwrap()).unwrap();
        assert_eq!(numeric_kernel_count(&t, Some(&pi), &g, 1e-6, 0.9).unwrap().index, 0);
        let e = extension_op(&toeplitz_op(&pi, &Multiplier::circle_mode(&g, 1).unwrap()).unwrap(), &pi).unwrap();
        assert_eq!(numeric_kernel_count(&e, None, &g, 1e-6, 0.9).unwrap().index, -1);
    }

    #[test]
    fn semicommutator_rank_one() {
        let (g, pi) = setup(64);
        let z = Multiplier::circle_mode(&g, 1).unwrap();
        let zb = Multiplier::circle_mode(&g, -1).unwrap();
        let s = semicommutator(&pi, &z, &zb).unwrap();
        assert!(s.identity_residual < 1e-12);
        assert_eq!(numerical_rank(&s.singular_values, 1e-6), 1);
        assert!((s.singular_values[0] - 1.0).abs() < 1e-10);
        assert!(decays_like(&s.singular_values, 5, 1.5));
        let one = Multiplier::circle(&g, "3", |_| c(3.0, 0.0)).unwrap();
        assert!(semicommutator(&pi, &one, &one).unwrap().singular_values[0] < 1e-12);
    }

    #[test]
    fn printed_order_fails() {
        // the identity with M¹ and M² exchanged in the correction term
        let (g, pi) = setup(32);
        let z = Multiplier::circle_mode(&g, 1).unwrap();
        let zb = Multiplier::circle_mode(&g, -1).unwrap();
        let p = pi.to_dense().unwrap();
        let cm = &p - identity(32) * c(0.5, 0.0);
        let (a, b) = (z.to_matrix(), zb.to_matrix());
        let lhs = &p * &a * &p * &b - &p * &a * &b;
        let swapped = (&cm * &b - &b * &cm) * (&a * c(0.5, 0.0) - &cm * &a);
        let u = CVec::from_element(32, c(1.0, 0.0));
        assert!(((lhs + swapped) * u).norm() / 32f64.sqrt() > 0.5);
    }
}
