//! Laplace and Dirac fundamental solutions and the boundary Cauchy kernel.

use crate::clifford::{boundary_symbol, DiracOperator};
use crate::error::{invalid, Error, Result};
use crate::linalg::c;
use crate::{CMat, Complex64};
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct KernelContext {
    pub op: DiracOperator,
    pub n: usize,
    /// `(n−1)!/πⁿ`
    pub norm: f64,
}

impl KernelContext {
    pub fn new(op: &DiracOperator) -> Self {
        KernelContext { op: op.clone(), n: op.n, norm: phi_constant(op.n) }
    }
}

pub fn phi_constant(n: usize) -> f64 {
    let fact: f64 = (1..n).map(|j| j as f64).product();
    fact / PI.powi(n as i32)
}

/// `e(z) = (1/2π) ln|z|` for `n = 1`, `(n−1)!/(2πⁿ)·|z|^{2−2n}/(2−2n)` otherwise.
pub fn laplace_fundamental(n: usize, x: &[f64]) -> Result<f64> {
    if x.len() != 2 * n {
        return Err(invalid("point has wrong length"));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(Error::Singularity("fundamental solution at the origin".into()));
    }
    if n == 1 {
        Ok(0.25 / PI * r2.ln())
    } else {
        let p = 1.0 - n as f64;
        Ok(phi_constant(n) / 2.0 * r2.powf(p) / (2.0 * p))
    }
}

/// `Φ(d) = (n−1)!/πⁿ · a(d)^H / |d|^{2n}`.
pub fn phi(ctx: &KernelContext, d: &[Complex64]) -> Result<CMat> {
    if d.len() != ctx.n {
        return Err(invalid("displacement has wrong length"));
    }
    let r2: f64 = d.iter().map(|v| v.norm_sqr()).sum();
    if r2 == 0.0 {
        return Err(Error::Singularity("Φ at zero displacement".into()));
    }
    Ok(ctx.op.contract(d).adjoint() * c(ctx.norm / r2.powi(ctx.n as i32), 0.0))
}

/// `K(z, ζ) = −Φ(z − ζ)·σ(ζ)`, the integrand of the Cauchy-type integral
/// without the area weight.
pub fn cauchy_kernel(
    ctx: &KernelContext,
    z: &[Complex64],
    zeta: &[Complex64],
    nu_c: &[Complex64],
) -> Result<CMat> {
    let d: Vec<Complex64> = z.iter().zip(zeta).map(|(a, b)| a - b).collect();
    let p = phi(ctx, &d)?;
    let s = boundary_symbol(&ctx.op, nu_c)?;
    Ok(-(p * s))
}
