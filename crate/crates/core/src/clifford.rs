//! Constant-coefficient Dirac operators `A = Σ αⱼ ∂/∂zⱼ + βⱼ ∂/∂z̄ⱼ` and
//! their symbols.
//!
//! Symbol convention: `σ(∂/∂x_m) = −ξ_m`, so `σ¹(∂/∂z̄) = −(ξ₁ + iξ₂)/2`.
//! With `ζⱼ(ξ) = ξⱼ + iξₙ₊ⱼ` every symbol below is a contraction
//! `a(v) = Σ αⱼ·conj(vⱼ) + βⱼ·vⱼ` of the coefficient matrices with a complex
//! vector.

use crate::error::{invalid, Error, Result};
use crate::linalg::c;
use crate::{CMat, CVec, Complex64};
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct DiracOperator {
    pub n: usize,
    pub k: usize,
    pub alpha: Vec<CMat>,
    pub beta: Vec<CMat>,
}

/// Serialized form: complex entries as `[re, im]` pairs, matrices row-major.
#[derive(Serialize)]
pub struct DiracJson {
    pub n: usize,
    pub k: usize,
    pub alpha: Vec<Vec<Vec<[f64; 2]>>>,
    pub beta: Vec<Vec<Vec<[f64; 2]>>>,
}

fn matrix_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|cc| [m[(r, cc)].re, m[(r, cc)].im]).collect())
        .collect()
}

impl DiracOperator {
    pub fn new(alpha: Vec<CMat>, beta: Vec<CMat>) -> Result<Self> {
        let n = alpha.len();
        if n == 0 || beta.len() != n {
            return Err(invalid("need the same positive number of alpha and beta matrices"));
        }
        let k = alpha[0].nrows();
        if alpha.iter().chain(&beta).any(|m| m.nrows() != k || m.ncols() != k) {
            return Err(invalid("coefficient matrices must all be k x k"));
        }
        Ok(DiracOperator { n, k, alpha, beta })
    }

    pub fn to_json(&self) -> DiracJson {
        DiracJson {
            n: self.n,
            k: self.k,
            alpha: self.alpha.iter().map(matrix_rows).collect(),
            beta: self.beta.iter().map(matrix_rows).collect(),
        }
    }

    /// `a(v) = Σ αⱼ·conj(vⱼ) + βⱼ·vⱼ`.
    pub fn contract(&self, v: &[Complex64]) -> CMat {
        let mut m = CMat::zeros(self.k, self.k);
        for j in 0..self.n {
            m += &self.alpha[j] * v[j].conj() + &self.beta[j] * v[j];
        }
        m
    }

    /// True when every coefficient entry is a real integer.
    pub fn is_integral(&self) -> bool {
        self.alpha
            .iter()
            .chain(&self.beta)
            .flat_map(|m| m.iter())
            .all(|z| z.im == 0.0 && z.re.fract() == 0.0)
    }

    fn check_covector(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != 2 * self.n {
            return Err(invalid(format!(
                "covector has length {}, expected {}",
                xi.len(),
                2 * self.n
            )));
        }
        Ok(())
    }
}

/// `ζⱼ(ξ) = ξⱼ + i·ξₙ₊ⱼ`.
pub fn complexify(xi: &[f64]) -> Vec<Complex64> {
    let n = xi.len() / 2;
    (0..n).map(|j| c(xi[j], xi[n + j])).collect()
}

/// Recursive doubling: `D₁ = (0, 1)`; from `D_{m−1}` the old coefficients
/// become `αⱼ ↦ diag(αⱼ, βⱼ*)`, `βⱼ ↦ diag(βⱼ, αⱼ*)` and the new pair is
/// `α_m = [[0,0],[I,0]]`, `β_m = [[0,−I],[0,0]]`.
pub fn build_dirac(n: usize) -> Result<DiracOperator> {
    if n == 0 {
        return Err(invalid("dimension n must be at least 1"));
    }
    let one = c(1.0, 0.0);
    let mut alpha = vec![CMat::zeros(1, 1)];
    let mut beta = vec![CMat::from_element(1, 1, one)];
    for _ in 1..n {
        let k = alpha[0].nrows();
        let diag = |a: &CMat, b: &CMat| {
            let mut m = CMat::zeros(2 * k, 2 * k);
            m.view_mut((0, 0), (k, k)).copy_from(a);
            m.view_mut((k, k), (k, k)).copy_from(&b.adjoint());
            m
        };
        let mut na: Vec<CMat> = alpha.iter().zip(&beta).map(|(a, b)| diag(a, b)).collect();
        let mut nb: Vec<CMat> = beta.iter().zip(&alpha).map(|(b, a)| diag(b, a)).collect();
        let mut am = CMat::zeros(2 * k, 2 * k);
        let mut bm = CMat::zeros(2 * k, 2 * k);
        for i in 0..k {
            am[(k + i, i)] = one;
            bm[(i, k + i)] = -one;
        }
        na.push(am);
        nb.push(bm);
        alpha = na;
        beta = nb;
    }
    DiracOperator::new(alpha, beta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IdentityFamily {
    /// `αⱼ*αₖ + βₖ*βⱼ = δⱼₖE`
    Gram,
    /// `αⱼ*βₖ + αₖ*βⱼ = 0`
    Mixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub j: usize,
    pub k: usize,
    pub family: IdentityFamily,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub max_residual: f64,
    pub violations: Vec<Violation>,
}

/// Residuals of both identity families over all index pairs (1-based in
/// the report).
pub fn check_identities(op: &DiracOperator) -> IdentityReport {
    let e = CMat::identity(op.k, op.k);
    let mut violations = Vec::new();
    let mut max_residual: f64 = 0.0;
    for j in 0..op.n {
        for k in 0..op.n {
            let mut gram = op.alpha[j].adjoint() * &op.alpha[k] + op.beta[k].adjoint() * &op.beta[j];
            if j == k {
                gram -= &e;
            }
            let mixed = op.alpha[j].adjoint() * &op.beta[k] + op.alpha[k].adjoint() * &op.beta[j];
            for (family, m) in [(IdentityFamily::Gram, gram), (IdentityFamily::Mixed, mixed)] {
                let r = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
                max_residual = max_residual.max(r);
                if r > 0.0 {
                    violations.push(Violation { j: j + 1, k: k + 1, family, residual: r });
                }
            }
        }
    }
    IdentityReport { max_residual, violations }
}

/// `σ¹(A)(ξ) = −½·a(ζ(ξ))`.
pub fn principal_symbol(op: &DiracOperator, xi: &[f64]) -> Result<CMat> {
    op.check_covector(xi)?;
    Ok(op.contract(&complexify(xi)) * c(-0.5, 0.0))
}

/// Symbol of the formal adjoint `A* = −Σ(αⱼ*∂/∂z̄ⱼ + βⱼ*∂/∂zⱼ)`:
/// `½·Σ[αⱼ*ζⱼ + βⱼ*·conj(ζⱼ)] = ½·a(ζ)^H`, which is `−σ¹(A)(ξ)^H`.
pub fn adjoint_symbol(op: &DiracOperator, xi: &[f64]) -> Result<CMat> {
    op.check_covector(xi)?;
    Ok(op.contract(&complexify(xi)).adjoint() * c(0.5, 0.0))
}

/// `σ(ζ) = ½·a(ν_c)` for a unit complex normal.
pub fn boundary_symbol(op: &DiracOperator, nu_c: &[Complex64]) -> Result<CMat> {
    if nu_c.len() != op.n {
        return Err(invalid("complex normal has wrong length"));
    }
    let norm: f64 = nu_c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("complex normal has length {norm}, expected 1")));
    }
    Ok(op.contract(nu_c) * c(0.5, 0.0))
}

/// A `ℂᵏ`-valued polynomial in `z₁…zₙ, z̄₁…z̄ₙ`. Keys are exponent vectors
/// of length `2n` (holomorphic exponents first).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub n: usize,
    pub k: usize,
    pub terms: BTreeMap<Vec<u32>, CVec>,
}

impl Polynomial {
    pub fn zero(n: usize, k: usize) -> Self {
        Polynomial { n, k, terms: BTreeMap::new() }
    }

    /// Single term `coeff · z^a z̄^b` with `exps = a ++ b`.
    pub fn monomial(n: usize, exps: Vec<u32>, coeff: CVec) -> Self {
        let k = coeff.len();
        let mut p = Polynomial::zero(n, k);
        p.add_term(exps, coeff);
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, coeff: CVec) {
        let entry = self.terms.entry(exps).or_insert_with(|| CVec::zeros(coeff.len()));
        *entry += coeff;
    }

    pub fn eval(&self, z: &[Complex64]) -> CVec {
        let mut out = CVec::zeros(self.k);
        for (exps, coeff) in &self.terms {
            let mut m = c(1.0, 0.0);
            for j in 0..self.n {
                m *= z[j].powu(exps[j]) * z[j].conj().powu(exps[self.n + j]);
            }
            out += coeff * m;
        }
        out
    }

    /// Exact application of the operator by differentiating monomials.
    pub fn apply(&self, op: &DiracOperator) -> Polynomial {
        let mut out = Polynomial::zero(self.n, op.k);
        for (exps, coeff) in &self.terms {
            for j in 0..self.n {
                for (slot, mat) in [(j, &op.alpha[j]), (self.n + j, &op.beta[j])] {
                    if exps[slot] > 0 {
                        let mut e = exps.clone();
                        e[slot] -= 1;
                        out.add_term(e, mat * coeff * c(exps[slot] as f64, 0.0));
                    }
                }
            }
        }
        out
    }

    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().map(|v| v.norm_squared()).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct PolySolutionBasis {
    pub operator: DiracOperator,
    pub degree: usize,
    pub basis: Vec<Polynomial>,
}

impl PolySolutionBasis {
    /// Largest relative residual `‖A p‖ / ‖p‖` over the basis.
    pub fn max_residual(&self) -> f64 {
        self.basis
            .iter()
            .map(|p| p.apply(&self.operator).coefficient_norm() / p.coefficient_norm())
            .fold(0.0, f64::max)
    }

    /// Least-squares distance of `p` from the span of the basis, relative to
    /// `‖p‖`, measured on coefficient vectors.
    pub fn distance_from_span(&self, p: &Polynomial) -> f64 {
        let mut keys: Vec<Vec<u32>> = p.terms.keys().cloned().collect();
        for b in &self.basis {
            keys.extend(b.terms.keys().cloned());
        }
        keys.sort();
        keys.dedup();
        let k = self.operator.k;
        let flatten = |q: &Polynomial| {
            CVec::from_fn(keys.len() * k, |r, _| {
                q.terms.get(&keys[r / k]).map(|v| v[r % k]).unwrap_or_default()
            })
        };
        let cols: Vec<CVec> = self.basis.iter().map(flatten).collect();
        let target = flatten(p);
        if cols.is_empty() {
            return 1.0;
        }
        let a = CMat::from_columns(&cols);
        let qr = a.clone().qr();
        let q = qr.q();
        let proj = &q * (q.adjoint() * &target);
        (target.clone() - proj).norm() / target.norm()
    }
}

fn monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    if vars == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in monomials(vars - 1, degree - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Basis of `{p : Ap = 0}` among polynomials of total degree `≤ degree`.
/// Each homogeneous degree is solved separately; integral operators use
/// exact rational elimination, others an SVD with threshold `1e−10`.
pub fn polynomial_solutions(op: &DiracOperator, degree: usize) -> PolySolutionBasis {
    let mut basis = Vec::new();
    let exact = op.is_integral();
    for d in 0..=degree as u32 {
        let cols_m = monomials(2 * op.n, d);
        if d == 0 {
            for t in 0..op.k {
                let mut v = CVec::zeros(op.k);
                v[t] = c(1.0, 0.0);
                basis.push(Polynomial::monomial(op.n, cols_m[0].clone(), v));
            }
            continue;
        }
        let rows_m = monomials(2 * op.n, d - 1);
        let row_index: BTreeMap<&Vec<u32>, usize> =
            rows_m.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let k = op.k;
        let mut mat = CMat::zeros(rows_m.len() * k, cols_m.len() * k);
        for (ci, exps) in cols_m.iter().enumerate() {
            for j in 0..op.n {
                for (slot, coef) in [(j, &op.alpha[j]), (op.n + j, &op.beta[j])] {
                    if exps[slot] == 0 {
                        continue;
                    }
                    let mut e = exps.clone();
                    e[slot] -= 1;
                    let ri = row_index[&e];
                    for s in 0..k {
                        for t in 0..k {
                            mat[(ri * k + s, ci * k + t)] += coef[(s, t)] * exps[slot] as f64;
                        }
                    }
                }
            }
        }
        let null = if exact { rational_nullspace(&mat) } else { svd_nullspace(&mat, 1e-10) };
        for v in null {
            let mut p = Polynomial::zero(op.n, k);
            for (ci, exps) in cols_m.iter().enumerate() {
                let coeff = CVec::from_fn(k, |t, _| v[ci * k + t]);
                if coeff.iter().any(|z| z.norm() > 0.0) {
                    p.add_term(exps.clone(), coeff);
                }
            }
            basis.push(p);
        }
    }
    PolySolutionBasis { operator: op.clone(), degree, basis }
}

fn rational_nullspace(mat: &CMat) -> Vec<Vec<Complex64>> {
    let (rows, cols) = (mat.nrows(), mat.ncols());
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            (0..cols)
                .map(|cc| BigRational::from_integer(BigInt::from(mat[(r, cc)].re as i64)))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = BigRational::one() / a[row][col].clone();
        for x in a[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for cc in 0..cols {
                    let delta = f.clone() * a[row][cc].clone();
                    a[r][cc] = a[r][cc].clone() - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|cc| !pivots.contains(cc)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![c(0.0, 0.0); cols];
            v[f] = c(1.0, 0.0);
            for (r, &p) in pivots.iter().enumerate() {
                let x = -a[r][f].clone();
                if !x.is_zero() {
                    let num = x.numer().to_string().parse::<f64>().unwrap();
                    let den = x.denom().abs().to_string().parse::<f64>().unwrap();
                    v[p] = c(num / den, 0.0);
                }
            }
            v
        })
        .collect()
}

fn svd_nullspace(mat: &CMat, threshold: f64) -> Vec<Vec<Complex64>> {
    let cols = mat.ncols();
    let mut square = CMat::zeros(cols.max(mat.nrows()), cols);
    square.view_mut((0, 0), (mat.nrows(), cols)).copy_from(mat);
    let svd = square.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let scale = svd.singular_values.iter().copied().fold(0.0, f64::max).max(1.0);
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= threshold * scale)
        .map(|i| (0..cols).map(|cc| vt[(i, cc)].conj()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(m: &CMat) -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|cc| m[(r, cc)].re).collect()).collect()
    }

    #[test]
    fn cauchy_riemann_base_case() {
        let op = build_dirac(1).unwrap();
        assert_eq!(real(&op.alpha[0]), vec![vec![0.0]]);
        assert_eq!(real(&op.beta[0]), vec![vec![1.0]]);
    }

    #[test]
    fn two_dimensional_operator_is_the_standard_one() {
        let op = build_dirac(2).unwrap();
        assert_eq!(real(&op.alpha[0]), vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(real(&op.alpha[1]), vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(real(&op.beta[0]), vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(real(&op.beta[1]), vec![vec![0.0, -1.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn identities_exact_up_to_five() {
        for n in 1..=5 {
            let op = build_dirac(n).unwrap();
            assert_eq!(op.k, 1 << (n - 1));
            let rep = check_identities(&op);
            assert_eq!(rep.max_residual, 0.0, "n={n}");
            assert!(rep.violations.is_empty());
        }
    }

    #[test]
    fn broken_operator_reports_pair() {
        let mut op = build_dirac(2).unwrap();
        op.beta[0] = CMat::identity(2, 2) * c(2.0, 0.0);
        let rep = check_identities(&op);
        assert!(rep.max_residual > 0.0);
        assert!(rep
            .violations
            .iter()
            .any(|v| v.j == 1 && v.k == 1 && v.family == IdentityFamily::Gram));
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(build_dirac(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn cauchy_riemann_symbol() {
        let op = build_dirac(1).unwrap();
        let s = principal_symbol(&op, &[1.0, 0.0]).unwrap();
        assert_eq!(s[(0, 0)], c(-0.5, 0.0));
        let s = principal_symbol(&op, &[0.3, 0.7]).unwrap();
        assert!((s[(0, 0)] - c(-0.15, -0.35)).norm() < 1e-15);
        assert!(principal_symbol(&op, &[1.0]).is_err());
    }

    #[test]
    fn adjoint_symbol_is_negative_conjugate_transpose() {
        let op = build_dirac(3).unwrap();
        let xi = [0.3, -1.2, 0.5, 0.9, 0.1, -0.4];
        let s = principal_symbol(&op, &xi).unwrap();
        let t = adjoint_symbol(&op, &xi).unwrap();
        assert!(crate::linalg::max_abs(&(t + s.adjoint())) < 1e-14);
        let op1 = build_dirac(1).unwrap();
        assert_eq!(adjoint_symbol(&op1, &[1.0, 0.0]).unwrap()[(0, 0)], c(0.5, 0.0));
        assert_eq!(adjoint_symbol(&op1, &[0.0, 0.0]).unwrap()[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn boundary_symbol_values() {
        let op1 = build_dirac(1).unwrap();
        let th: f64 = 0.7;
        let s = boundary_symbol(&op1, &[c(th.cos(), th.sin())]).unwrap();
        assert!((s[(0, 0)] - c(th.cos(), th.sin()) * 0.5).norm() < 1e-15);
        let op2 = build_dirac(2).unwrap();
        let s = boundary_symbol(&op2, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s, CMat::identity(2, 2) * c(0.5, 0.0));
        assert!(matches!(
            boundary_symbol(&op2, &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn holomorphic_polynomials_for_cauchy_riemann() {
        let op = build_dirac(1).unwrap();
        let basis = polynomial_solutions(&op, 2);
        assert_eq!(basis.basis.len(), 3);
        assert_eq!(basis.max_residual(), 0.0);
        for d in 0..=2u32 {
            let p = Polynomial::monomial(1, vec![d, 0], CVec::from_element(1, c(1.0, 0.0)));
            assert!(basis.distance_from_span(&p) < 1e-14);
        }
        let zbar = Polynomial::monomial(1, vec![0, 1], CVec::from_element(1, c(1.0, 0.0)));
        assert!(basis.distance_from_span(&zbar) > 0.9);
    }

    #[test]
    fn constants_span_degree_zero() {
        let op = build_dirac(3).unwrap();
        let basis = polynomial_solutions(&op, 0);
        assert_eq!(basis.basis.len(), 4);
    }

    #[test]
    fn linear_solutions_in_two_variables() {
        let op = build_dirac(2).unwrap();
        let basis = polynomial_solutions(&op, 1);
        assert_eq!(basis.max_residual(), 0.0);
        let e1 = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let z1 = Polynomial::monomial(2, vec![1, 0, 0, 0], e1.clone());
        let zb2 = Polynomial::monomial(2, vec![0, 0, 0, 1], e1);
        assert!(basis.distance_from_span(&z1) < 1e-14);
        assert!(basis.distance_from_span(&zb2) < 1e-14);
    }

    #[test]
    fn floating_nullspace_matches_exact() {
        let op = build_dirac(2).unwrap();
        let phase = c(0.6, 0.8);
        let rotated = DiracOperator::new(
            op.alpha.iter().map(|m| m * phase).collect(),
            op.beta.iter().map(|m| m * phase).collect(),
        )
        .unwrap();
        assert!(!rotated.is_integral());
        let exact = polynomial_solutions(&op, 2);
        let approx = polynomial_solutions(&rotated, 2);
        assert_eq!(exact.basis.len(), approx.basis.len());
        assert!(approx.max_residual() < 1e-12);
    }
}
