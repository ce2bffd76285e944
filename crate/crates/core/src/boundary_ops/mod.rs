//! Discretized Cauchy-type integral `C`, the projection `Π = ½I + C`, and
//! interior/exterior evaluation of boundary integrals.
//!
//! Both discretizations subtract the singularity with the exact constant ½:
//!
//! `(C_h u)(z) = ½u(z) + ∫_S K(z, ζ)(u(ζ) − u(z)) ds(ζ)`.
//!
//! On the circle the remaining integral is summed over nodes of opposite
//! parity to the target with doubled weights, which is exact for the Fourier
//! modes the grid carries. On S³ the integral is taken in geodesic polar
//! coordinates about each target with the density interpolated spectrally
//! from the Hopf grid (see [`torus`]).

pub mod torus;

use crate::clifford::DiracOperator;
use crate::error::{invalid, Error, Result};
use crate::geometry::{make_circle_grid, BoundaryGrid, GridLayout, VolumeGrid};
use crate::kernels::{cauchy_kernel, phi, KernelContext};
use crate::linalg::{c, diag_similarity, identity, spectral_norm};
use crate::{CMat, CVec, Complex64};
use std::f64::consts::PI;

pub use torus::TorusBlocks;

/// Samples of a `ℂᵏ`-valued function at the grid nodes, node-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    pub k: usize,
    pub values: CVec,
}

impl Density {
    pub fn new(k: usize, values: CVec) -> Result<Self> {
        if k == 0 || values.len() % k != 0 {
            return Err(invalid("density length is not a multiple of k"));
        }
        Ok(Density { k, values })
    }

    pub fn from_fn(grid: &BoundaryGrid, k: usize, f: impl Fn(&[Complex64]) -> CVec) -> Self {
        let mut values = CVec::zeros(grid.len() * k);
        for i in 0..grid.len() {
            let v = f(&grid.complex_node(i));
            values.rows_mut(i * k, k).copy_from(&v);
        }
        Density { k, values }
    }

    /// Scalar density `f(θ)` on a circle grid.
    pub fn circle_fn(grid: &BoundaryGrid, f: impl Fn(f64) -> Complex64) -> Self {
        Density::from_fn(grid, 1, |z| CVec::from_element(1, f(z[0].arg())))
    }

    pub fn at(&self, node: usize) -> CVec {
        self.values.rows(node * self.k, self.k).into_owned()
    }

    pub fn nodes(&self) -> usize {
        self.values.len() / self.k
    }
}

/// `e^{ikθ}` sampled on a circle grid.
pub fn fourier_mode(grid: &BoundaryGrid, k: i64) -> Density {
    let n = grid.len();
    Density::new(
        1,
        CVec::from_fn(n, |m, _| {
            let t = 2.0 * PI * ((k * m as i64).rem_euclid(n as i64)) as f64 / n as f64;
            c(t.cos(), t.sin())
        }),
    )
    .expect("k = 1")
}

#[derive(Clone, Debug)]
pub enum OperatorData {
    Dense(CMat),
    Torus(TorusBlocks),
}

/// A discretized boundary operator on the density space of a grid.
#[derive(Clone, Debug)]
pub struct BoundaryOperator {
    pub label: String,
    pub k: usize,
    /// Quadrature weight of each node; defines the L²(S) norm.
    pub weights: Vec<f64>,
    pub data: OperatorData,
}

/// Largest density dimension for which torus operators are expanded densely.
pub const DENSE_LIMIT: usize = 6000;

impl BoundaryOperator {
    pub fn dense(label: &str, k: usize, weights: Vec<f64>, m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() != k * weights.len() {
            return Err(invalid("matrix size does not match grid and k"));
        }
        Ok(BoundaryOperator { label: label.into(), k, weights, data: OperatorData::Dense(m) })
    }

    pub fn dim(&self) -> usize {
        self.k * self.weights.len()
    }

    pub fn relabel(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }

    pub fn apply(&self, u: &CVec) -> Result<CVec> {
        if u.len() != self.dim() {
            return Err(invalid("density length does not match operator"));
        }
        Ok(match &self.data {
            OperatorData::Dense(m) => m * u,
            OperatorData::Torus(t) => t.apply(u),
        })
    }

    pub fn apply_density(&self, u: &Density) -> Result<Density> {
        Density::new(self.k, self.apply(&u.values)?)
    }

    pub fn to_dense(&self) -> Result<CMat> {
        match &self.data {
            OperatorData::Dense(m) => Ok(m.clone()),
            OperatorData::Torus(t) => {
                if self.dim() > DENSE_LIMIT {
                    return Err(invalid(format!("operator of size {} too large to expand", self.dim())));
                }
                Ok(t.to_dense())
            }
        }
    }

    pub fn dense_matrix(&self) -> Option<&CMat> {
        match &self.data {
            OperatorData::Dense(m) => Some(m),
            OperatorData::Torus(_) => None,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &BoundaryOperator) -> Result<BoundaryOperator> {
        if self.dim() != other.dim() {
            return Err(invalid("composing operators on different spaces"));
        }
        let data = match (&self.data, &other.data) {
            (OperatorData::Torus(a), OperatorData::Torus(b)) => OperatorData::Torus(a.compose(b)?),
            _ => OperatorData::Dense(self.to_dense()? * other.to_dense()?),
        };
        Ok(BoundaryOperator {
            label: format!("{}*{}", self.label, other.label),
            k: self.k,
            weights: self.weights.clone(),
            data,
        })
    }

    /// `a·self + b·I`.
    pub fn affine(&self, a: Complex64, b: Complex64) -> BoundaryOperator {
        let data = match &self.data {
            OperatorData::Dense(m) => OperatorData::Dense(m * a + identity(m.nrows()) * b),
            OperatorData::Torus(t) => OperatorData::Torus(t.affine(a, b)),
        };
        BoundaryOperator { label: self.label.clone(), k: self.k, weights: self.weights.clone(), data }
    }

    /// `‖W^{½} M W^{−½}‖₂` in the L²(S) norm given by the node weights.
    pub fn weighted_norm(&self) -> Result<f64> {
        match &self.data {
            OperatorData::Dense(m) => Ok(spectral_norm(&diag_similarity(m, &self.node_weights_per_entry()))),
            OperatorData::Torus(t) => Ok(t.weighted_norm()),
        }
    }

    fn node_weights_per_entry(&self) -> Vec<f64> {
        self.weights.iter().flat_map(|w| std::iter::repeat_n(*w, self.k)).collect()
    }
}

/// Discretized Cauchy-type integral (label `C`).
pub fn assemble_cauchy(op: &DiracOperator, grid: &BoundaryGrid) -> Result<BoundaryOperator> {
    if op.n != grid.n() {
        return Err(invalid(format!("operator dimension {} does not match grid dimension {}", op.n, grid.n())));
    }
    match &grid.layout {
        GridLayout::Circle { .. } => assemble_circle(op, grid),
        GridLayout::Hopf { .. } => {
            let blocks = torus::assemble_torus(op, grid, &torus::PolarRule::for_grid(grid))?;
            Ok(BoundaryOperator {
                label: "C".into(),
                k: op.k,
                weights: grid.weights.clone(),
                data: OperatorData::Torus(blocks),
            })
        }
    }
}

fn assemble_circle(op: &DiracOperator, grid: &BoundaryGrid) -> Result<BoundaryOperator> {
    let ctx = KernelContext::new(op);
    let n = grid.len();
    let k = op.k;
    let mut m = CMat::zeros(n * k, n * k);
    let half = identity(k) * c(0.5, 0.0);
    for i in 0..n {
        let z = grid.complex_node(i);
        let mut diag = half.clone();
        for j in (0..n).filter(|j| (i + j) % 2 == 1) {
            let kij = cauchy_kernel(&ctx, &z, &grid.complex_node(j), &grid.complex_normals[j])?
                * c(2.0 * grid.weights[j], 0.0);
            m.view_mut((i * k, j * k), (k, k)).copy_from(&kij);
            diag -= kij;
        }
        m.view_mut((i * k, i * k), (k, k)).copy_from(&diag);
    }
    BoundaryOperator::dense("C", k, grid.weights.clone(), m)
}

/// `Π_h = ½I + C_h` (label `Π`).
pub fn szego_projection(cauchy: &BoundaryOperator) -> BoundaryOperator {
    cauchy.affine(c(1.0, 0.0), c(0.5, 0.0)).relabel("Π")
}

/// `‖C_h² − ¼I‖` in the L²(S) norm.
pub fn projection_defect(cauchy: &BoundaryOperator) -> Result<f64> {
    cauchy.compose(cauchy)?.affine(c(1.0, 0.0), c(-0.25, 0.0)).weighted_norm()
}

/// Volume data for the full Green formula: a disc quadrature and samples of
/// `Au` at its nodes.
pub struct VolumeTerm<'a> {
    pub grid: &'a VolumeGrid,
    pub au: Vec<CVec>,
}

/// `−Σⱼ wⱼ Φ(z − ζⱼ) σ(ζⱼ) u(ζⱼ)` without any check on the location of `z`.
pub fn cauchy_integral_at(op: &DiracOperator, grid: &BoundaryGrid, u: &Density, z: &[Complex64]) -> Result<CVec> {
    let ctx = KernelContext::new(op);
    let mut out = CVec::zeros(op.k);
    for j in 0..grid.len() {
        let kz = cauchy_kernel(&ctx, z, &grid.complex_node(j), &grid.complex_normals[j])?;
        out += kz * u.at(j) * c(grid.weights[j], 0.0);
    }
    Ok(out)
}

fn distance_to_boundary(grid: &BoundaryGrid, z: &[Complex64]) -> f64 {
    let r: f64 = z
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let n = grid.n();
            (v.re - grid.domain.center[j]).powi(2) + (v.im - grid.domain.center[n + j]).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    r - grid.domain.radius
}

/// Green-formula reproduction at an interior point. The point must lie at
/// least two grid spacings inside `S`.
pub fn interior_eval(
    op: &DiracOperator,
    grid: &BoundaryGrid,
    u: &Density,
    z: &[Complex64],
    vol: Option<&VolumeTerm>,
) -> Result<CVec> {
    let d = distance_to_boundary(grid, z);
    if d >= 0.0 {
        return Err(Error::Domain("point is not interior".into()));
    }
    if -d < 2.0 * grid.spacing() {
        return Err(Error::Domain("interior point lies in the guard band near S".into()));
    }
    let mut out = cauchy_integral_at(op, grid, u, z)?;
    if let Some(v) = vol {
        if op.n != 1 {
            return Err(invalid("volume term is only supported for n = 1"));
        }
        let ctx = KernelContext::new(op);
        for (x, (w, au)) in v.grid.nodes.iter().zip(v.grid.weights.iter().zip(&v.au)) {
            let d = [z[0] - c(x[0], x[1])];
            out += phi(&ctx, &d)? * au * c(*w, 0.0);
        }
    }
    Ok(out)
}

/// `‖Σⱼ wⱼ Φ(w − ζⱼ) σ(ζⱼ) u(ζⱼ)‖` at an exterior point; small exactly when
/// `u` is orthogonal to the adjoint solutions `Φ(w − ·)`.
pub fn exterior_vanishing(op: &DiracOperator, grid: &BoundaryGrid, u: &Density, w: &[Complex64]) -> Result<f64> {
    let d = distance_to_boundary(grid, w);
    if d <= 0.0 {
        return Err(Error::Domain("point is not exterior".into()));
    }
    if d < 2.0 * grid.spacing() {
        return Err(Error::Domain("exterior point lies in the guard band near S".into()));
    }
    Ok(cauchy_integral_at(op, grid, u, w)?.norm())
}

/// `|F(ζ − dν) − F(ζ + dν) − u(ζ)|` where `F` is the Cauchy-type integral of
/// `u`; tends to zero as `d → 0` (the jump across `S` equals the density).
pub fn jump_residual(op: &DiracOperator, grid: &BoundaryGrid, u: &Density, node: usize, d: f64) -> Result<f64> {
    let z = grid.complex_node(node);
    let nu = &grid.complex_normals[node];
    let inner: Vec<Complex64> = z.iter().zip(nu).map(|(a, b)| a - b * d).collect();
    let outer: Vec<Complex64> = z.iter().zip(nu).map(|(a, b)| a + b * d).collect();
    let jump = cauchy_integral_at(op, grid, u, &inner)? - cauchy_integral_at(op, grid, u, &outer)?;
    Ok((jump - u.at(node)).norm())
}

/// Projection onto the Fourier modes `0..=m` of the `n`-node circle grid.
pub fn exact_szego_circle(n: usize, m: usize) -> Result<BoundaryOperator> {
    if n <= 2 * m {
        return Err(Error::Aliasing(format!("{n} nodes cannot carry modes 0..={m} and their negatives")));
    }
    let grid = make_circle_grid(n, 1.0)?;
    let p = CMat::from_fn(n, n, |r, s| {
        let mut acc = c(0.0, 0.0);
        for k in 0..=m as i64 {
            let t = 2.0 * PI * ((k * (r as i64 - s as i64)).rem_euclid(n as i64)) as f64 / n as f64;
            acc += c(t.cos(), t.sin());
        }
        acc / n as f64
    });
    BoundaryOperator::dense("Π_exact", 1, grid.weights, p)
}

/// Exact Cauchy integral on the circle, `Π_exact − ½I`.
pub fn exact_cauchy_circle(n: usize, m: usize) -> Result<BoundaryOperator> {
    Ok(exact_szego_circle(n, m)?.affine(c(1.0, 0.0), c(-0.5, 0.0)).relabel("C_exact"))
}

/// Orthogonal projection of the density space onto Fourier modes `|k| ≤ m`.
pub fn circle_band_projector(n: usize, m: usize) -> CMat {
    CMat::from_fn(n, n, |r, s| {
        let mut acc = c(0.0, 0.0);
        for k in -(m as i64)..=m as i64 {
            let t = 2.0 * PI * ((k * (r as i64 - s as i64)).rem_euclid(n as i64)) as f64 / n as f64;
            acc += c(t.cos(), t.sin());
        }
        acc / n as f64
    })
}

#[cfg(test)]
mod tests;
