//! Order-0 symbols of `C`, `Π` and the extended Toeplitz operator `E_Ψ` on
//! the cosphere bundle of `S`, and a numerical check of the `C` symbol
//! against the discretized operator.
//!
//! `σ⁰(C)(z, ξ) = κ·σ¹(A*)(ξ/|ξ|)·σ(z)`, where the scalar `κ` is computed by
//! [`calibrate_kappa`] from idempotency of `σ⁰(Π) = E/2 + σ⁰(C)` and the
//! sign of the circle Szegő projection.

use crate::boundary_ops::{exact_cauchy_circle, fourier_mode, BoundaryOperator, Density};
use crate::cayley::RealLinearMap;
use crate::clifford::{adjoint_symbol, boundary_symbol, build_dirac, complexify, DiracOperator};
use crate::error::{invalid, Error, Result};
use crate::geometry::{make_circle_grid, BoundaryGrid};
use crate::linalg::{c, identity, singular_values};
use crate::quadrature::gauss_legendre_on;
use crate::{CMat, CVec, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

const TANGENT_TOL: f64 = 1e-12;

/// A point of `S` with a unit covector orthogonal to the normal there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CosphereSample {
    pub z: Vec<f64>,
    pub nu: Vec<f64>,
    pub xi: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_tangent(nu: &[f64], xi: &[f64]) -> Result<f64> {
    if nu.len() != xi.len() {
        return Err(invalid("normal and covector have different lengths"));
    }
    let r = dot(xi, xi).sqrt();
    if r == 0.0 {
        return Err(Error::Precondition("covector is zero".into()));
    }
    if dot(nu, xi).abs() > TANGENT_TOL * r {
        return Err(Error::Precondition("covector is not orthogonal to the normal".into()));
    }
    Ok(r)
}

impl CosphereSample {
    pub fn new(z: Vec<f64>, nu: Vec<f64>, xi: Vec<f64>) -> Result<Self> {
        let r = check_tangent(&nu, &xi)?;
        if (r - 1.0).abs() > TANGENT_TOL || (dot(&nu, &nu).sqrt() - 1.0).abs() > TANGENT_TOL {
            return Err(Error::Precondition("covector and normal must be unit vectors".into()));
        }
        Ok(CosphereSample { z, nu, xi })
    }

    pub fn flipped(&self) -> Self {
        CosphereSample { z: self.z.clone(), nu: self.nu.clone(), xi: self.xi.iter().map(|v| -v).collect() }
    }
}

/// Both unit tangent directions at every node of a circle grid.
pub fn circle_cosphere(grid: &BoundaryGrid) -> Vec<CosphereSample> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for (x, nu) in grid.nodes.iter().zip(&grid.normals) {
        for s in [1.0, -1.0] {
            out.push(CosphereSample { z: x.clone(), nu: nu.clone(), xi: vec![-s * nu[1], s * nu[0]] });
        }
    }
    out
}

/// `per_node` random unit tangent directions at every `stride`-th node.
pub fn random_cosphere(grid: &BoundaryGrid, stride: usize, per_node: usize, seed: u64) -> Vec<CosphereSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (x, nu) in grid.nodes.iter().zip(&grid.normals).step_by(stride.max(1)) {
        for _ in 0..per_node {
            out.push(CosphereSample { z: x.clone(), nu: nu.clone(), xi: random_tangent(&mut rng, nu) });
        }
    }
    out
}

fn random_tangent(rng: &mut ChaCha8Rng, nu: &[f64]) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..nu.len()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let p = dot(&g, nu);
        let t: Vec<f64> = g.iter().zip(nu).map(|(a, b)| a - p * b).collect();
        let r = dot(&t, &t).sqrt();
        if r > 1e-3 {
            let mut t: Vec<f64> = t.iter().map(|v| v / r).collect();
            // one more projection to push the residual to roundoff
            let p = dot(&t, nu);
            t.iter_mut().zip(nu).for_each(|(a, b)| *a -= p * b);
            let r = dot(&t, &t).sqrt();
            return t.iter().map(|v| v / r).collect();
        }
    }
}

/// Sign convention for first-order symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolConvention {
    /// `σ(∂/∂x_m) = −ξ_m`
    Adopted,
    /// `σ(∂/∂x_m) = +ξ_m`
    Flipped,
}

fn conv_sign(conv: SymbolConvention) -> f64 {
    match conv {
        SymbolConvention::Adopted => 1.0,
        SymbolConvention::Flipped => -1.0,
    }
}

/// `σ¹(A*)(ξ/|ξ|)·σ(z)` for any nonzero tangent `ξ`.
fn uncalibrated(op: &DiracOperator, nu: &[f64], xi: &[f64], conv: SymbolConvention) -> Result<CMat> {
    let r = check_tangent(nu, xi)?;
    let unit: Vec<f64> = xi.iter().map(|v| v / r).collect();
    Ok(adjoint_symbol(op, &unit)? * boundary_symbol(op, &complexify(nu))? * c(conv_sign(conv), 0.0))
}

/// `κ·σ¹(A*)(ξ/|ξ|)·σ(z)` at a normal `ν` and any nonzero tangent `ξ`.
pub fn cauchy_symbol_at(op: &DiracOperator, nu: &[f64], xi: &[f64], kappa: Complex64) -> Result<CMat> {
    Ok(uncalibrated(op, nu, xi, SymbolConvention::Adopted)? * kappa)
}

pub fn cauchy_symbol(op: &DiracOperator, s: &CosphereSample, kappa: Complex64) -> Result<CMat> {
    cauchy_symbol_at(op, &s.nu, &s.xi, kappa)
}

/// Eigenvalue of the exact circle Cauchy integral on `e^{iθ}`.
fn circle_oracle() -> Result<Complex64> {
    let cx = exact_cauchy_circle(16, 7)?;
    let grid = make_circle_grid(16, 1.0)?;
    let u = fourier_mode(&grid, 1);
    Ok(cx.apply(&u.values)?[0] / u.values[0])
}

/// Solves `(κX)² = 1/4` for the n = 1 symbol `X` at `z = 1`, `ξ = dθ`, with
/// the root chosen so that `κX` equals the circle oracle on positive
/// frequencies.
pub fn calibrate_kappa(conv: SymbolConvention) -> Result<Complex64> {
    let op = build_dirac(1)?;
    let x = uncalibrated(&op, &[1.0, 0.0], &[0.0, 1.0], conv)?[(0, 0)];
    if x.norm() == 0.0 {
        return Err(Error::Calibration("symbol vanishes on the calibration sample".into()));
    }
    let root = (c(0.25, 0.0) / (x * x)).sqrt();
    let oracle = circle_oracle()?;
    let kappa = [root, -root]
        .into_iter()
        .find(|k| (k * x - oracle).norm() < 1e-12)
        .ok_or_else(|| Error::Calibration(format!("no root of (κX)² = 1/4 matches the oracle value {oracle}")))?;
    Ok(kappa)
}

/// `E/2 + σ⁰(C)`.
pub fn projection_symbol(op: &DiracOperator, s: &CosphereSample, kappa: Complex64) -> Result<CMat> {
    Ok(identity(op.k) * c(0.5, 0.0) + cauchy_symbol(op, s, kappa)?)
}

/// `P·M·P + (E − P)` with `P = σ⁰(Π)`.
pub fn toeplitz_ext_symbol(op: &DiracOperator, m: &CMat, s: &CosphereSample, kappa: Complex64) -> Result<CMat> {
    let p = projection_symbol(op, s, kappa)?;
    Ok(&p * m * &p + identity(op.k) - &p)
}

/// Same as [`toeplitz_ext_symbol`] for a conjugation-mixed multiplier.
pub fn toeplitz_ext_symbol_real(
    op: &DiracOperator,
    m: &RealLinearMap,
    s: &CosphereSample,
    kappa: Complex64,
) -> Result<RealLinearMap> {
    if m.m != op.k {
        return Err(invalid("multiplier size does not match k"));
    }
    let p = RealLinearMap::complex_linear(&projection_symbol(op, s, kappa)?);
    let id = RealLinearMap::identity(op.k);
    Ok(p.compose(m).compose(&p).add(&id).add(&p.scale(-1.0)))
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticityReport {
    pub min_sv: f64,
    pub witness: CosphereSample,
    pub elliptic: bool,
}

pub const ELLIPTICITY_TOL: f64 = 1e-8;

/// Smallest singular value of `σ⁰(E_Ψ)` over the samples; `m` gives the
/// multiplier at a sample point.
pub fn ellipticity_scan(
    op: &DiracOperator,
    m: impl Fn(&CosphereSample) -> CMat,
    samples: &[CosphereSample],
    kappa: Complex64,
) -> Result<EllipticityReport> {
    let mut best: Option<(f64, &CosphereSample)> = None;
    for s in samples {
        let e = toeplitz_ext_symbol(op, &m(s), s, kappa)?;
        let sv = *singular_values(&e).last().expect("k >= 1");
        if best.is_none_or(|(b, _)| sv < b) {
            best = Some((sv, s));
        }
    }
    let (min_sv, w) = best.ok_or_else(|| invalid("no cosphere samples"))?;
    Ok(EllipticityReport { min_sv, witness: w.clone(), elliptic: min_sv > ELLIPTICITY_TOL })
}

/// `∫_T^∞ dt/(t² + a²)` by its asymptotic series, for `T ≥ 10a`.
fn lorentz_tail(a: f64, t: f64) -> f64 {
    let q = (a / t) * (a / t);
    let mut term = 1.0 / t;
    let mut sum = 0.0;
    for k in 0..40 {
        sum += term / (2 * k + 1) as f64;
        term *= -q;
        if term.abs() < 1e-20 * sum.abs() {
            break;
        }
    }
    sum
}

/// Dyadic panels `[0, a], [a, 2a], …, [T/2, T]` with `T = 2¹⁰a`, 20 Gauss
/// points each.
fn dyadic_rule(a: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let (mut ts, mut ws) = (Vec::new(), Vec::new());
    let mut lo = 0.0;
    let mut hi = a;
    for _ in 0..=10 {
        let (x, w) = gauss_legendre_on(20, lo, hi);
        ts.extend(x);
        ws.extend(w);
        lo = hi;
        hi *= 2.0;
    }
    (ts, ws, lo)
}

/// `|(1/4π)∫dt/(t² + |ξ|²) − 1/(4|ξ|)|`, integrating over a finite window
/// and adding the tail series.
pub fn pv_integral_check(xi_norm: f64) -> Result<f64> {
    if xi_norm.is_nan() || xi_norm <= 0.0 {
        return Err(invalid("|ξ| must be positive"));
    }
    let a = xi_norm;
    let (ts, ws, t_max) = dyadic_rule(a);
    let window: f64 = ts.iter().zip(&ws).map(|(t, w)| w / (t * t + a * a)).sum();
    let total = 2.0 * (window + lorentz_tail(a, t_max)) / (4.0 * PI);
    Ok((total - 0.25 / a).abs())
}

/// `−(1/2π) p.v.∫ σ²(A*A)(tν + ξ)⁻¹ σ¹(A*)(tν + ξ) dt · σ(z)`, evaluated
/// numerically as a symmetric limit. Equals `−2σ¹(A*)(ξ̂)σ(z)`.
pub fn pv_symbol_integral(op: &DiracOperator, nu: &[f64], xi: &[f64]) -> Result<CMat> {
    let a = check_tangent(nu, xi)?;
    let at = |t: f64| -> Result<CMat> {
        let v: Vec<f64> = nu.iter().zip(xi).map(|(n, x)| t * n + x).collect();
        let r2 = dot(&v, &v);
        Ok(adjoint_symbol(op, &v)? * c(4.0 / r2, 0.0))
    };
    let (ts, ws, t_max) = dyadic_rule(a);
    let mut acc = CMat::zeros(op.k, op.k);
    for (t, w) in ts.iter().zip(&ws) {
        acc += (at(*t)? + at(-t)?) * c(*w, 0.0);
    }
    // beyond the window only the even part survives: 8σ¹(A*)(ξ)/(t² + |ξ|²)
    acc += adjoint_symbol(op, xi)? * c(8.0 * lorentz_tail(a, t_max), 0.0);
    Ok(acc * c(-1.0 / (2.0 * PI), 0.0) * boundary_symbol(op, &complexify(nu))?)
}

/// Applies `C_h` to the windowed plane wave
/// `u(ζ) = exp(−ω|ζ − z|²/2)·e^{iω⟨ζ − z, ξ⟩}·v` and returns `(C_h u)(z)`,
/// which tends to `σ⁰(C)(z, ξ̂)v` as `ω` grows.
pub fn numeric_symbol_extraction(
    c_h: &BoundaryOperator,
    grid: &BoundaryGrid,
    node: usize,
    xi: &[f64],
    omega: f64,
    v: &CVec,
) -> Result<CVec> {
    if node >= grid.len() || v.len() != c_h.k {
        return Err(invalid("node or vector out of range"));
    }
    let h = grid.spacing();
    if omega * h > 0.25 {
        return Err(Error::Precondition(format!("ω·h = {:.3} exceeds 1/4; refine the grid", omega * h)));
    }
    let r = check_tangent(&grid.normals[node], xi)?;
    let z = &grid.nodes[node];
    let u = Density::from_fn(grid, c_h.k, |_| CVec::zeros(c_h.k));
    let mut vals = u.values;
    for (j, x) in grid.nodes.iter().enumerate() {
        let d: Vec<f64> = x.iter().zip(z).map(|(a, b)| a - b).collect();
        let ph = omega * dot(&d, xi) / r;
        let amp = (-omega * dot(&d, &d) / 2.0).exp();
        let s = c(amp * ph.cos(), amp * ph.sin());
        vals.rows_mut(j * c_h.k, c_h.k).copy_from(&(v * s));
    }
    let out = c_h.apply(&vals)?;
    Ok(out.rows(node * c_h.k, c_h.k).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_ops::assemble_cauchy;
    use crate::clifford::principal_symbol;
    use crate::geometry::make_s3_grid;
    use crate::linalg::max_abs;

    fn kappa() -> Complex64 {
        calibrate_kappa(SymbolConvention::Adopted).unwrap()
    }

    #[test]
    fn kappa_values() {
        assert!((kappa() - c(0.0, 2.0)).norm() < 1e-14);
        let k = calibrate_kappa(SymbolConvention::Flipped).unwrap();
        assert!((k - c(0.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn circle_symbol_values() {
        let op = build_dirac(1).unwrap();
        let s = CosphereSample::new(vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let raw = uncalibrated(&op, &s.nu, &s.xi, SymbolConvention::Adopted).unwrap()[(0, 0)];
        assert!((raw - c(0.0, -0.25)).norm() < 1e-15);
        assert!((cauchy_symbol(&op, &s, kappa()).unwrap()[(0, 0)] - 0.5).norm() < 1e-14);
        assert!((cauchy_symbol(&op, &s.flipped(), kappa()).unwrap()[(0, 0)] + 0.5).norm() < 1e-14);
        assert!((projection_symbol(&op, &s, kappa()).unwrap()[(0, 0)] - 1.0).norm() < 1e-14);
        assert!(projection_symbol(&op, &s.flipped(), kappa()).unwrap()[(0, 0)].norm() < 1e-14);
        let scaled = cauchy_symbol_at(&op, &s.nu, &[0.0, 3.5], kappa()).unwrap();
        assert_eq!(scaled, cauchy_symbol(&op, &s, kappa()).unwrap());
    }

    #[test]
    fn non_tangent_rejected() {
        let op = build_dirac(1).unwrap();
        assert!(matches!(cauchy_symbol_at(&op, &[1.0, 0.0], &[0.1, 1.0], kappa()), Err(Error::Precondition(_))));
        assert!(CosphereSample::new(vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]).is_err());
    }

    #[test]
    fn projection_symbol_idempotent_n2() {
        let op = build_dirac(2).unwrap();
        let g = make_s3_grid(4, 4, 4).unwrap();
        let k = kappa();
        for s in random_cosphere(&g, 1, 2, 11) {
            let p = projection_symbol(&op, &s, k).unwrap();
            assert!(max_abs(&(&p * &p - &p)) < 1e-12);
            let q = projection_symbol(&op, &s.flipped(), k).unwrap();
            assert!(max_abs(&(&p + q - identity(2))) < 1e-12);
        }
    }

    #[test]
    fn symbol_square_of_laplacian() {
        for n in 1..=3 {
            let op = build_dirac(n).unwrap();
            let xi: Vec<f64> = (0..2 * n).map(|i| (i as f64 * 0.7).sin() + 0.2).collect();
            let s = principal_symbol(&op, &xi).unwrap();
            let r2 = dot(&xi, &xi);
            assert!(max_abs(&(s.adjoint() * &s - identity(op.k) * c(r2 / 4.0, 0.0))) < 1e-13);
        }
    }

    #[test]
    fn pv_integrals() {
        for a in [1.0, 2.0, 0.5, 7.3] {
            assert!(pv_integral_check(a).unwrap() < 1e-10);
        }
        assert!(pv_integral_check(0.0).is_err());
        let op = build_dirac(2).unwrap();
        let nu = [0.6, 0.0, 0.0, 0.8];
        let xi = [0.0, 0.3, 0.0, 0.0];
        let lit = pv_symbol_integral(&op, &nu, &xi).unwrap();
        let formula = cauchy_symbol_at(&op, &nu, &xi, c(1.0, 0.0)).unwrap();
        assert!(max_abs(&(lit + formula * c(2.0, 0.0))) < 1e-10);
    }

    #[test]
    fn extension_symbols() {
        let op = build_dirac(1).unwrap();
        let g = make_circle_grid(64, 1.0).unwrap();
        let samples = circle_cosphere(&g);
        let k = kappa();
        let id = ellipticity_scan(&op, |_| identity(1), &samples, k).unwrap();
        assert!(id.elliptic && (id.min_sv - 1.0).abs() < 1e-14);
        let rot = ellipticity_scan(&op, |s| CMat::from_element(1, 1, c(s.z[0], s.z[1])), &samples, k).unwrap();
        assert!(rot.elliptic);
        let cos = ellipticity_scan(&op, |s| CMat::from_element(1, 1, c(s.z[0], 0.0)), &samples, k).unwrap();
        assert!(!cos.elliptic);
        assert!(cos.witness.z[0].abs() < 1e-12);
        let zero = ellipticity_scan(&op, |_| CMat::zeros(1, 1), &samples, k).unwrap();
        assert!(!zero.elliptic);
        let s = &samples[0];
        let real = toeplitz_ext_symbol_real(&op, &RealLinearMap::complex_linear(&CMat::from_element(1, 1, c(0.0, 2.0))), s, k)
            .unwrap();
        let cplx = toeplitz_ext_symbol(&op, &CMat::from_element(1, 1, c(0.0, 2.0)), s, k).unwrap();
        assert_eq!(real, RealLinearMap::complex_linear(&cplx));
    }

    #[test]
    fn windowed_extraction_on_circle() {
        let op = build_dirac(1).unwrap();
        let k = kappa();
        let v = CVec::from_element(1, c(1.0, 0.0));
        let mut errs = Vec::new();
        for (n, w) in [(512, 20.0), (1024, 40.0)] {
            let g = make_circle_grid(n, 1.0).unwrap();
            let ch = assemble_cauchy(&op, &g).unwrap();
            for xi in [[0.0, 1.0], [0.0, -1.0]] {
                let got = numeric_symbol_extraction(&ch, &g, 0, &xi, w, &v).unwrap();
                let want = cauchy_symbol_at(&op, &g.normals[0], &xi, k).unwrap() * &v;
                errs.push((got - want).norm());
            }
        }
        assert!(errs.iter().all(|e| *e < 0.1), "{errs:?}");
        let g = make_circle_grid(64, 1.0).unwrap();
        let ch = assemble_cauchy(&op, &g).unwrap();
        assert!(matches!(numeric_symbol_extraction(&ch, &g, 0, &[0.0, 1.0], 20.0, &v), Err(Error::Precondition(_))));
    }
}
