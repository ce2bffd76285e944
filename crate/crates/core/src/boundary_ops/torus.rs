//! The Cauchy-type integral on S³ ⊂ ℂ² as a block-circulant operator.
//!
//! The torus `(θ₁, θ₂)` acts on S³ by `z ↦ (e^{iθ₁}z₁, e^{iθ₂}z₂)` and the
//! kernel transforms as `K(Rz, Rζ) = Q(θ)^H K(z, ζ) Q(θ)` for a diagonal
//! phase gauge `Q(θ) = diag(e^{i rₜ·θ})`. In the gauged density
//! `vₜ = e^{i rₜ·θ} uₜ` the operator is a convolution on the angular grid,
//! so each Fourier mode `(m₁, m₂)` has its own block acting on the
//! `k·n_eta` values along η.
//!
//! Each block is computed at the targets `θ = 0` by integrating the
//! subtracted integrand in geodesic polar coordinates
//! `ζ = cos ψ·z + sin ψ·ω`, `ω ∈ S²(T_zS)`, with the density interpolated
//! by Lagrange polynomials in η and trigonometric polynomials in θ (the
//! Nyquist mode as a cosine).

use super::Complex64;
use crate::clifford::DiracOperator;
use crate::error::{invalid, Error, Result};
use crate::geometry::{BoundaryGrid, GridLayout};
use crate::kernels::{cauchy_kernel, KernelContext};
use crate::linalg::{c, diag_similarity, spectral_norm, split_mul, SplitMat};
use crate::quadrature::{barycentric_weights, gauss_legendre, gauss_legendre_on, lagrange_row};
use crate::{CMat, CVec};
use rustfft::FftPlanner;
use std::collections::VecDeque;
use std::f64::consts::PI;

/// Point counts of the polar rule about each target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolarRule {
    pub n_psi: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl PolarRule {
    pub fn for_grid(grid: &BoundaryGrid) -> Self {
        let m = match &grid.layout {
            GridLayout::Hopf { n_eta, n_t1, n_t2, .. } => *n_eta.max(n_t1).max(n_t2),
            GridLayout::Circle { nodes } => *nodes,
        };
        PolarRule { n_psi: m + 8, n_alpha: m / 2 + 4, n_beta: m + 8 }
    }

    pub fn len(&self) -> usize {
        self.n_psi * self.n_alpha * self.n_beta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Signed torus mode carried by FFT index `i` of an `n`-point transform.
pub fn mode(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[derive(Clone, Debug)]
pub struct TorusBlocks {
    pub n_eta: usize,
    pub n_t1: usize,
    pub n_t2: usize,
    pub k: usize,
    /// Phase exponents `rₜ` of the gauge, one per component.
    pub gauge: Vec<[i64; 2]>,
    pub eta_weights: Vec<f64>,
    /// Mode blocks in FFT order, index `i₁·n_t2 + i₂`; rows and columns are
    /// `a·k + t` for η-node `a` and component `t`.
    pub blocks: Vec<CMat>,
}

impl TorusBlocks {
    pub fn dim(&self) -> usize {
        self.n_eta * self.n_t1 * self.n_t2 * self.k
    }

    fn block_dim(&self) -> usize {
        self.n_eta * self.k
    }

    pub fn block(&self, m1: i64, m2: i64) -> &CMat {
        let i1 = m1.rem_euclid(self.n_t1 as i64) as usize;
        let i2 = m2.rem_euclid(self.n_t2 as i64) as usize;
        &self.blocks[i1 * self.n_t2 + i2]
    }

    fn theta(&self, p: usize, q: usize) -> (f64, f64) {
        (2.0 * PI * p as f64 / self.n_t1 as f64, 2.0 * PI * q as f64 / self.n_t2 as f64)
    }

    fn gauge_phase(&self, t: usize, p: usize, q: usize) -> Complex64 {
        let (t1, t2) = self.theta(p, q);
        let ph = self.gauge[t][0] as f64 * t1 + self.gauge[t][1] as f64 * t2;
        c(ph.cos(), ph.sin())
    }

    /// Fourier coefficients of the gauged density, `[mode][a·k + t]`.
    pub fn analyze(&self, u: &CVec) -> Vec<CVec> {
        let (ne, n1, n2, k) = (self.n_eta, self.n_t1, self.n_t2, self.k);
        let mut planner = FftPlanner::new();
        let f1 = planner.plan_fft_forward(n1);
        let f2 = planner.plan_fft_forward(n2);
        let mut coef = vec![CVec::zeros(ne * k); n1 * n2];
        let scale = 1.0 / (n1 * n2) as f64;
        let mut buf = vec![c(0.0, 0.0); n1 * n2];
        let mut col = vec![c(0.0, 0.0); n1];
        for a in 0..ne {
            for t in 0..k {
                for p in 0..n1 {
                    for q in 0..n2 {
                        let idx = ((a * n1 + p) * n2 + q) * k + t;
                        buf[p * n2 + q] = u[idx] * self.gauge_phase(t, p, q);
                    }
                }
                for row in buf.chunks_mut(n2) {
                    f2.process(row);
                }
                for q in 0..n2 {
                    for p in 0..n1 {
                        col[p] = buf[p * n2 + q];
                    }
                    f1.process(&mut col);
                    for p in 0..n1 {
                        coef[p * n2 + q][a * k + t] = col[p] * scale;
                    }
                }
            }
        }
        coef
    }

    /// Inverse of [`Self::analyze`].
    pub fn synthesize(&self, coef: &[CVec]) -> CVec {
        let (ne, n1, n2, k) = (self.n_eta, self.n_t1, self.n_t2, self.k);
        let mut planner = FftPlanner::new();
        let f1 = planner.plan_fft_inverse(n1);
        let f2 = planner.plan_fft_inverse(n2);
        let mut out = CVec::zeros(self.dim());
        let mut buf = vec![c(0.0, 0.0); n1 * n2];
        let mut col = vec![c(0.0, 0.0); n1];
        for a in 0..ne {
            for t in 0..k {
                for q in 0..n2 {
                    for p in 0..n1 {
                        col[p] = coef[p * n2 + q][a * k + t];
                    }
                    f1.process(&mut col);
                    for p in 0..n1 {
                        buf[p * n2 + q] = col[p];
                    }
                }
                for row in buf.chunks_mut(n2) {
                    f2.process(row);
                }
                for p in 0..n1 {
                    for q in 0..n2 {
                        let idx = ((a * n1 + p) * n2 + q) * k + t;
                        out[idx] = buf[p * n2 + q] * self.gauge_phase(t, p, q).conj();
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, u: &CVec) -> CVec {
        let coef = self.analyze(u);
        let mapped: Vec<CVec> = coef.iter().zip(&self.blocks).map(|(v, b)| b * v).collect();
        self.synthesize(&mapped)
    }

    fn same_shape(&self, other: &TorusBlocks) -> bool {
        self.n_eta == other.n_eta
            && self.n_t1 == other.n_t1
            && self.n_t2 == other.n_t2
            && self.k == other.k
            && self.gauge == other.gauge
    }

    pub fn compose(&self, other: &TorusBlocks) -> Result<TorusBlocks> {
        if !self.same_shape(other) {
            return Err(invalid("torus operators have different shapes or gauges"));
        }
        let mut out = self.clone();
        for (b, o) in out.blocks.iter_mut().zip(&other.blocks) {
            *b = &*b * o;
        }
        Ok(out)
    }

    pub fn affine(&self, a: Complex64, b: Complex64) -> TorusBlocks {
        let mut out = self.clone();
        let id = CMat::identity(self.block_dim(), self.block_dim());
        for blk in out.blocks.iter_mut() {
            *blk = &*blk * a + &id * b;
        }
        out
    }

    pub fn row_weights(&self) -> Vec<f64> {
        self.eta_weights.iter().flat_map(|w| std::iter::repeat_n(*w, self.k)).collect()
    }

    pub fn weighted_norm(&self) -> f64 {
        let w = self.row_weights();
        self.blocks.iter().map(|b| spectral_norm(&diag_similarity(b, &w))).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for j in 0..d {
            let mut e = CVec::zeros(d);
            e[j] = c(1.0, 0.0);
            m.set_column(j, &self.apply(&e));
        }
        m
    }
}

/// Integer phases `rₜ` with `K(Rz, Rζ) = Q^H K Q`, `Q = diag(e^{i rₜ·θ})`.
/// Solves `lₛ + rₜ = −eⱼ` on the support of `αⱼ` and `lₛ + rₜ = +eⱼ` on the
/// support of `βⱼ` by breadth-first propagation.
pub fn solve_torus_gauge(op: &DiracOperator) -> Result<Vec<[i64; 2]>> {
    if op.n != 2 {
        return Err(invalid("torus gauge is defined for n = 2"));
    }
    let k = op.k;
    // constraint edges (row s, column t, value)
    let mut edges = Vec::new();
    for j in 0..2 {
        let mut e = [0i64; 2];
        e[j] = 1;
        for s in 0..k {
            for t in 0..k {
                if op.alpha[j][(s, t)].norm() > 0.0 {
                    edges.push((s, t, [-e[0], -e[1]]));
                }
                if op.beta[j][(s, t)].norm() > 0.0 {
                    edges.push((s, t, e));
                }
            }
        }
    }
    let mut l: Vec<Option<[i64; 2]>> = vec![None; k];
    let mut r: Vec<Option<[i64; 2]>> = vec![None; k];
    for start in 0..k {
        if r[start].is_some() {
            continue;
        }
        r[start] = Some([0, 0]);
        let mut queue = VecDeque::from([(false, start)]);
        while let Some((is_row, idx)) = queue.pop_front() {
            for &(s, t, v) in &edges {
                let (here, there) = if is_row { (s, t) } else { (t, s) };
                if here != idx {
                    continue;
                }
                let known = if is_row { l[s].unwrap() } else { r[t].unwrap() };
                let want = [v[0] - known[0], v[1] - known[1]];
                let slot = if is_row { &mut r[there] } else { &mut l[there] };
                match slot {
                    None => {
                        *slot = Some(want);
                        queue.push_back((!is_row, there));
                    }
                    Some(have) if *have != want => {
                        return Err(Error::Precondition("coefficient pattern admits no torus gauge".into()));
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(r.into_iter().map(|x| x.unwrap_or([0, 0])).collect())
}

struct PolarPoint {
    zeta: [Complex64; 2],
    weight: f64,
}

/// Polar rule about `z = (cos η, sin η)` (real point on the Hopf slice).
fn polar_points(eta: f64, rule: &PolarRule) -> Vec<PolarPoint> {
    let (psi, wpsi) = gauss_legendre_on(rule.n_psi, 0.0, PI);
    let (ca, wa) = gauss_legendre(rule.n_alpha);
    let (ce, se) = (eta.cos(), eta.sin());
    let x0 = [ce, se, 0.0, 0.0];
    let t1 = [-se, ce, 0.0, 0.0];
    let mut pts = Vec::with_capacity(rule.len());
    for (p, wp) in psi.iter().zip(&wpsi) {
        let (cp, sp) = (p.cos(), p.sin());
        for (cal, wal) in ca.iter().zip(&wa) {
            let sal = (1.0 - cal * cal).sqrt();
            for ib in 0..rule.n_beta {
                let b = 2.0 * PI * ib as f64 / rule.n_beta as f64;
                let om = [sal * b.cos() * t1[0], sal * b.cos() * t1[1], sal * b.sin(), *cal];
                let y: Vec<f64> = (0..4).map(|i| cp * x0[i] + sp * om[i]).collect();
                pts.push(PolarPoint {
                    zeta: [c(y[0], y[2]), c(y[1], y[3])],
                    weight: wp * sp * sp * wal * 2.0 * PI / rule.n_beta as f64,
                });
            }
        }
    }
    pts
}

fn hopf_shape(grid: &BoundaryGrid) -> Result<(usize, usize, usize, Vec<f64>, Vec<f64>)> {
    match &grid.layout {
        GridLayout::Hopf { n_eta, n_t1, n_t2, eta, eta_weights } => {
            Ok((*n_eta, *n_t1, *n_t2, eta.clone(), eta_weights.clone()))
        }
        _ => Err(invalid("expected a Hopf grid")),
    }
}

fn trig_basis(m: i64, n: usize, theta: f64) -> Complex64 {
    if m == -(n as i64) / 2 {
        c((m as f64 * theta).cos(), 0.0)
    } else {
        let a = m as f64 * theta;
        c(a.cos(), a.sin())
    }
}

/// Mode blocks of the discretized Cauchy-type integral on a Hopf grid.
pub fn assemble_torus(op: &DiracOperator, grid: &BoundaryGrid, rule: &PolarRule) -> Result<TorusBlocks> {
    let (ne, n1, n2, eta, eta_weights) = hopf_shape(grid)?;
    let k = op.k;
    let gauge = solve_torus_gauge(op)?;
    let ctx = KernelContext::new(op);
    let bw = barycentric_weights(&eta);
    let nq = rule.len();
    let cols = k * ne * k;
    let col = |i: usize, b: usize, j: usize| (i * ne + b) * k + j;
    let bd = ne * k;
    let mut blocks = vec![CMat::zeros(bd, bd); n1 * n2];
    let mut lrow = vec![0.0; ne];
    for a in 0..ne {
        let z0 = [c(eta[a].cos(), 0.0), c(eta[a].sin(), 0.0)];
        let pts = polar_points(eta[a], rule);
        let mut x = SplitMat::zeros(nq, cols);
        let mut e1 = vec![c(0.0, 0.0); nq * n1];
        let mut e2t = SplitMat::zeros(n2, nq);
        let mut ksum = CMat::zeros(k, k);
        for (q, pt) in pts.iter().enumerate() {
            let kq = cauchy_kernel(&ctx, &z0, &pt.zeta, &pt.zeta)? * c(pt.weight, 0.0);
            ksum += &kq;
            let (th1, th2) = (pt.zeta[0].arg(), pt.zeta[1].arg());
            let eq = pt.zeta[1].norm().atan2(pt.zeta[0].norm());
            lagrange_row(&eta, &bw, eq, &mut lrow);
            for j in 0..k {
                let ph = -(gauge[j][0] as f64 * th1 + gauge[j][1] as f64 * th2);
                let g = c(ph.cos(), ph.sin());
                for i in 0..k {
                    let kr = kq[(i, j)] * g;
                    for (b, lb) in lrow.iter().enumerate() {
                        x.set(q, col(i, b, j), kr * *lb);
                    }
                }
            }
            for i1 in 0..n1 {
                e1[q * n1 + i1] = trig_basis(mode(i1, n1), n1, th1);
            }
            for i2 in 0..n2 {
                e2t.set(i2, q, trig_basis(mode(i2, n2), n2, th2));
            }
        }
        let mut y = SplitMat::zeros(nq, cols);
        for i1 in 0..n1 {
            for q in 0..nq {
                let s = e1[q * n1 + i1];
                for cc in 0..cols {
                    let (xr, xi) = (x.re[(q, cc)], x.im[(q, cc)]);
                    y.re[(q, cc)] = s.re * xr - s.im * xi;
                    y.im[(q, cc)] = s.re * xi + s.im * xr;
                }
            }
            let t = split_mul(&e2t, &y);
            for i2 in 0..n2 {
                let blk = &mut blocks[i1 * n2 + i2];
                for i in 0..k {
                    for b in 0..ne {
                        for j in 0..k {
                            blk[(a * k + i, b * k + j)] = t.get(i2, col(i, b, j));
                        }
                    }
                }
            }
        }
        for blk in blocks.iter_mut() {
            for i in 0..k {
                for j in 0..k {
                    let half = if i == j { c(0.5, 0.0) } else { c(0.0, 0.0) };
                    blk[(a * k + i, a * k + j)] += half - ksum[(i, j)];
                }
            }
        }
    }
    Ok(TorusBlocks { n_eta: ne, n_t1: n1, n_t2: n2, k, gauge, eta_weights, blocks })
}

/// Trigonometric cardinal function of an `n`-point periodic grid (Nyquist
/// mode as a cosine).
fn trig_cardinal(n: usize, x: f64) -> f64 {
    let mut s = 1.0 + (n as f64 * x / 2.0).cos();
    for m in 1..n / 2 {
        s += 2.0 * (m as f64 * x).cos();
    }
    s / n as f64
}

/// The same discretization assembled row by row on the full density space,
/// without using the torus symmetry. Intended for small grids.
pub fn assemble_polar_dense(op: &DiracOperator, grid: &BoundaryGrid, rule: &PolarRule) -> Result<CMat> {
    let (ne, n1, n2, eta, _) = hopf_shape(grid)?;
    let k = op.k;
    let gauge = solve_torus_gauge(op)?;
    let ctx = KernelContext::new(op);
    let bw = barycentric_weights(&eta);
    let nn = grid.len();
    let mut m = CMat::zeros(nn * k, nn * k);
    let mut lrow = vec![0.0; ne];
    let phase = |t: usize, th1: f64, th2: f64| {
        let ph = gauge[t][0] as f64 * th1 + gauge[t][1] as f64 * th2;
        c(ph.cos(), ph.sin())
    };
    for a in 0..ne {
        let base = polar_points(eta[a], rule);
        for p0 in 0..n1 {
            for q0 in 0..n2 {
                let row = (a * n1 + p0) * n2 + q0;
                let (s1, s2) = (2.0 * PI * p0 as f64 / n1 as f64, 2.0 * PI * q0 as f64 / n2 as f64);
                let z = grid.complex_node(row);
                let mut ksum = CMat::zeros(k, k);
                for pt in &base {
                    let zeta = [pt.zeta[0] * c(s1.cos(), s1.sin()), pt.zeta[1] * c(s2.cos(), s2.sin())];
                    let kq = cauchy_kernel(&ctx, &z, &zeta, &zeta)? * c(pt.weight, 0.0);
                    ksum += &kq;
                    let (th1, th2) = (zeta[0].arg(), zeta[1].arg());
                    lagrange_row(&eta, &bw, zeta[1].norm().atan2(zeta[0].norm()), &mut lrow);
                    let d1: Vec<f64> = (0..n1).map(|p| trig_cardinal(n1, th1 - 2.0 * PI * p as f64 / n1 as f64)).collect();
                    let d2: Vec<f64> = (0..n2).map(|q| trig_cardinal(n2, th2 - 2.0 * PI * q as f64 / n2 as f64)).collect();
                    for j in 0..k {
                        let back = phase(j, th1, th2).conj();
                        for b in 0..ne {
                            for p in 0..n1 {
                                for q in 0..n2 {
                                    let colnode = (b * n1 + p) * n2 + q;
                                    let th = (2.0 * PI * p as f64 / n1 as f64, 2.0 * PI * q as f64 / n2 as f64);
                                    let w = back * phase(j, th.0, th.1) * (lrow[b] * d1[p] * d2[q]);
                                    for i in 0..k {
                                        m[(row * k + i, colnode * k + j)] += kq[(i, j)] * w;
                                    }
                                }
                            }
                        }
                    }
                }
                for i in 0..k {
                    for j in 0..k {
                        let half = if i == j { c(0.5, 0.0) } else { c(0.0, 0.0) };
                        m[(row * k + i, row * k + j)] += half - ksum[(i, j)];
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Defect `‖W^{½}(C_h² − ¼I)W^{−½}‖` restricted to torus modes with
/// `|m₁|, |m₂| ≤ mode_cut` and η-profiles that are polynomials of degree
/// `< eta_degree` in η.
pub fn resolved_defect(c_h: &TorusBlocks, mode_cut: i64, eta_degree: usize) -> Result<f64> {
    if eta_degree == 0 || eta_degree > c_h.n_eta {
        return Err(invalid("eta degree must be in 1..=n_eta"));
    }
    let ne = c_h.n_eta;
    let k = c_h.k;
    let w = c_h.row_weights();
    let eta = crate::geometry::hopf_eta_rule(ne).0;
    let mut v = CMat::zeros(ne * k, eta_degree * k);
    for (a, e) in eta.iter().enumerate() {
        let x = 4.0 * e / PI - 1.0;
        for d in 0..eta_degree {
            let val = legendre(d, x) * w[a * k].sqrt();
            for t in 0..k {
                v[(a * k + t, d * k + t)] = c(val, 0.0);
            }
        }
    }
    let q = v.qr().q();
    let mut worst: f64 = 0.0;
    for m1 in -mode_cut..=mode_cut {
        for m2 in -mode_cut..=mode_cut {
            let b = c_h.block(m1, m2);
            let d = b * b - CMat::identity(ne * k, ne * k) * c(0.25, 0.0);
            worst = worst.max(spectral_norm(&(diag_similarity(&d, &w) * &q)));
        }
    }
    Ok(worst)
}

fn legendre(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}
