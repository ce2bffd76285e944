//! Balls in ℂⁿ, their boundary spheres, and quadrature on both.

use crate::error::{invalid, Error, Result};
use crate::linalg::c;
use crate::quadrature::{gauss_legendre_on, gauss_legendre};
use crate::{CMat, Complex64};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub n: usize,
    pub radius: f64,
    pub center: Vec<f64>,
}

impl Domain {
    pub fn ball(n: usize, radius: f64) -> Self {
        Domain { n, radius, center: vec![0.0; 2 * n] }
    }

    /// `ρ(x) = |x − center|² − R²`.
    pub fn rho(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            - self.radius * self.radius
    }

    /// Volume of the ball (in ℝ^{2n}).
    pub fn volume(&self) -> f64 {
        let d = 2 * self.n;
        let mut unit = 1.0;
        // |B^{2n}| = πⁿ / n!
        for j in 1..=self.n {
            unit *= PI / j as f64;
        }
        unit * self.radius.powi(d as i32)
    }

    /// Area of the boundary sphere.
    pub fn area(&self) -> f64 {
        2.0 * self.n as f64 * self.volume() / self.radius
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GridLayout {
    /// Equispaced nodes `R·e^{2πim/N}`.
    Circle { nodes: usize },
    /// Hopf coordinates `z₁ = cos η e^{iθ₁}`, `z₂ = sin η e^{iθ₂}`; node
    /// `(a, p, q)` sits at index `(a·n_t1 + p)·n_t2 + q`.
    Hopf {
        n_eta: usize,
        n_t1: usize,
        n_t2: usize,
        eta: Vec<f64>,
        eta_weights: Vec<f64>,
    },
}

#[derive(Clone, Debug)]
pub struct BoundaryGrid {
    pub domain: Domain,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub normals: Vec<Vec<f64>>,
    pub complex_normals: Vec<Vec<Complex64>>,
    pub layout: GridLayout,
}

impl BoundaryGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n(&self) -> usize {
        self.domain.n
    }

    pub fn complex_node(&self, i: usize) -> Vec<Complex64> {
        to_complex(&self.nodes[i])
    }

    /// Largest distance between neighbouring nodes along a coordinate line.
    pub fn spacing(&self) -> f64 {
        let r = self.domain.radius;
        match &self.layout {
            GridLayout::Circle { nodes } => 2.0 * PI * r / *nodes as f64,
            GridLayout::Hopf { n_t1, n_t2, eta, .. } => {
                let mut h: f64 = 2.0 * PI * r / (*n_t1.min(n_t2) as f64);
                let mut prev = 0.0;
                for &e in eta.iter().chain(std::iter::once(&(PI / 2.0))) {
                    h = h.max(r * (e - prev));
                    prev = e;
                }
                h
            }
        }
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex(&self, f: impl Fn(&[f64]) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| f(x) * *w).sum()
    }
}

pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|j| c(x[j], x[n + j])).collect()
}

pub fn to_real(z: &[Complex64]) -> Vec<f64> {
    let mut x: Vec<f64> = z.iter().map(|v| v.re).collect();
    x.extend(z.iter().map(|v| v.im));
    x
}

fn sphere_point_data(domain: &Domain, x: Vec<f64>) -> (Vec<f64>, Vec<f64>, Vec<Complex64>) {
    let nu: Vec<f64> = x
        .iter()
        .zip(&domain.center)
        .map(|(a, b)| (a - b) / domain.radius)
        .collect();
    let nu_c = to_complex(&nu);
    (x, nu, nu_c)
}

pub fn make_circle_grid(n_nodes: usize, radius: f64) -> Result<BoundaryGrid> {
    if n_nodes < 4 || n_nodes % 2 == 1 {
        return Err(invalid(format!("circle grid needs an even node count >= 4, got {n_nodes}")));
    }
    if radius <= 0.0 {
        return Err(invalid("radius must be positive"));
    }
    let domain = Domain::ball(1, radius);
    let mut grid = empty_grid(domain.clone(), GridLayout::Circle { nodes: n_nodes });
    let w = 2.0 * PI * radius / n_nodes as f64;
    for m in 0..n_nodes {
        let t = 2.0 * PI * m as f64 / n_nodes as f64;
        let (x, nu, nu_c) = sphere_point_data(&domain, vec![radius * t.cos(), radius * t.sin()]);
        grid.nodes.push(x);
        grid.normals.push(nu);
        grid.complex_normals.push(nu_c);
        grid.weights.push(w);
    }
    Ok(grid)
}

fn empty_grid(domain: Domain, layout: GridLayout) -> BoundaryGrid {
    BoundaryGrid {
        domain,
        nodes: Vec::new(),
        weights: Vec::new(),
        normals: Vec::new(),
        complex_normals: Vec::new(),
        layout,
    }
}

/// Gauss–Legendre nodes in `η ∈ [0, π/2]` (weights carry `sin η cos η`).
pub fn hopf_eta_rule(n_eta: usize) -> (Vec<f64>, Vec<f64>) {
    let (eta, w) = gauss_legendre_on(n_eta, 0.0, PI / 2.0);
    let wa = eta.iter().zip(&w).map(|(e, v)| v * e.sin() * e.cos()).collect();
    (eta, wa)
}

/// Unit sphere S³ ⊂ ℂ² in Hopf coordinates.
pub fn make_s3_grid(n_eta: usize, n_t1: usize, n_t2: usize) -> Result<BoundaryGrid> {
    if n_eta < 4 || n_t1 < 4 || n_t2 < 4 {
        return Err(invalid("Hopf grid counts must all be >= 4"));
    }
    if n_t1 % 2 == 1 || n_t2 % 2 == 1 {
        return Err(invalid("Hopf angular counts must be even"));
    }
    let domain = Domain::ball(2, 1.0);
    let (eta, eta_weights) = hopf_eta_rule(n_eta);
    let layout = GridLayout::Hopf { n_eta, n_t1, n_t2, eta: eta.clone(), eta_weights: eta_weights.clone() };
    let mut grid = empty_grid(domain.clone(), layout);
    let dt = 4.0 * PI * PI / (n_t1 * n_t2) as f64;
    for (a, &e) in eta.iter().enumerate() {
        for p in 0..n_t1 {
            let t1 = 2.0 * PI * p as f64 / n_t1 as f64;
            for q in 0..n_t2 {
                let t2 = 2.0 * PI * q as f64 / n_t2 as f64;
                let x = vec![e.cos() * t1.cos(), e.sin() * t2.cos(), e.cos() * t1.sin(), e.sin() * t2.sin()];
                let (x, nu, nu_c) = sphere_point_data(&domain, x);
                grid.nodes.push(x);
                grid.normals.push(nu);
                grid.complex_normals.push(nu_c);
                grid.weights.push(eta_weights[a] * dt);
            }
        }
    }
    Ok(grid)
}

#[derive(Clone, Debug)]
pub struct VolumeGrid {
    pub domain: Domain,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl VolumeGrid {
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex(&self, f: impl Fn(&[f64]) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| f(x) * *w).sum()
    }
}

/// Polar product grid on the disc of radius `radius` centred at the origin.
pub fn make_disc_grid(n_r: usize, n_t: usize, radius: f64) -> Result<VolumeGrid> {
    make_polar_disc_grid(&Domain::ball(1, radius), &[0.0, 0.0], n_r, n_t)
}

/// Polar grid about an interior point `p`: rays from `p` to the circle,
/// Gauss–Legendre along each ray (Jacobian `r`), trapezoid in angle. The
/// Jacobian cancels a `1/|x − p|` singularity at the pole.
pub fn make_polar_disc_grid(domain: &Domain, p: &[f64], n_r: usize, n_t: usize) -> Result<VolumeGrid> {
    if domain.n != 1 {
        return Err(invalid("volume grids are only provided for discs"));
    }
    if n_r < 4 || n_t < 4 {
        return Err(invalid("disc grid counts must be >= 4"));
    }
    let q = [p[0] - domain.center[0], p[1] - domain.center[1]];
    let r2 = domain.radius * domain.radius;
    if q[0] * q[0] + q[1] * q[1] >= r2 {
        return Err(Error::Domain("pole of polar disc grid must be interior".into()));
    }
    let (x, w) = gauss_legendre(n_r);
    let mut nodes = Vec::with_capacity(n_r * n_t);
    let mut weights = Vec::with_capacity(n_r * n_t);
    for m in 0..n_t {
        let phi = 2.0 * PI * m as f64 / n_t as f64;
        let e = [phi.cos(), phi.sin()];
        let pe = q[0] * e[0] + q[1] * e[1];
        let reach = -pe + (pe * pe - (q[0] * q[0] + q[1] * q[1]) + r2).sqrt();
        for (t, wt) in x.iter().zip(&w) {
            let r = 0.5 * reach * (t + 1.0);
            nodes.push(vec![p[0] + r * e[0], p[1] + r * e[1]]);
            weights.push(0.5 * reach * wt * r * 2.0 * PI / n_t as f64);
        }
    }
    Ok(VolumeGrid { domain: domain.clone(), nodes, weights })
}

/// Real polynomial in `2n` real variables: list of (exponents, coefficient).
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly {
    pub terms: Vec<(Vec<u32>, f64)>,
}

impl RealPoly {
    pub fn new(terms: Vec<(Vec<u32>, f64)>) -> Self {
        RealPoly { terms }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, cf)| cf * e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn partial(&self, m: usize) -> RealPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[m] > 0)
            .map(|(e, cf)| {
                let mut e2 = e.clone();
                e2[m] -= 1;
                (e2, cf * e[m] as f64)
            })
            .collect();
        RealPoly { terms }
    }

    /// Exact integral over the ball of radius `r` centred at the origin.
    pub fn ball_integral(&self, r: f64) -> f64 {
        self.terms.iter().map(|(e, cf)| cf * ball_monomial_integral(e, r)).sum()
    }
}

/// `Γ(m/2)` for a positive integer `m`.
fn gamma_half(m: u32) -> f64 {
    if m % 2 == 0 {
        (1..m / 2).map(|k| k as f64).product()
    } else {
        // Γ(k + 1/2) = (2k)! √π / (4ᵏ k!)
        let k = (m - 1) / 2;
        let mut g = PI.sqrt();
        for j in 0..k {
            g *= j as f64 + 0.5;
        }
        g
    }
}

/// `∫_{|x|<r} x^α dx = 2∏Γ(βᵢ)/Γ(Σβᵢ) · r^{|α|+d}/(|α|+d)`, `βᵢ = (αᵢ+1)/2`,
/// zero when any exponent is odd.
pub fn ball_monomial_integral(exps: &[u32], r: f64) -> f64 {
    if exps.iter().any(|e| e % 2 == 1) {
        return 0.0;
    }
    let d = exps.len() as u32;
    let total: u32 = exps.iter().sum();
    let num: f64 = exps.iter().map(|&e| gamma_half(e + 1)).product();
    let sum_twice: u32 = exps.iter().map(|e| e + 1).sum();
    2.0 * num / gamma_half(sum_twice) * r.powi((total + d) as i32) / (total + d) as f64
}

/// Divergence-theorem form of the surface-form pullback:
/// `|∫_S f ν_m ds − ∫_D ∂f/∂x_m dv|`. The volume side uses a disc
/// quadrature for `n = 1` and exact ball moments otherwise.
pub fn check_form_pullback(grid: &BoundaryGrid, m: usize, f: &RealPoly) -> Result<f64> {
    let d = 2 * grid.n();
    if m >= d {
        return Err(invalid(format!("coordinate index {m} out of range")));
    }
    if grid.domain.center.iter().any(|&v| v != 0.0) {
        return Err(invalid("form check expects a ball centred at the origin"));
    }
    let surface = grid.integrate(|x| f.eval(x) * x[m] / grid.domain.radius);
    let df = f.partial(m);
    let volume = if grid.n() == 1 {
        let vol = make_disc_grid(48, 96, grid.domain.radius)?;
        vol.integrate(|x| df.eval(x))
    } else {
        df.ball_integral(grid.domain.radius)
    };
    Ok((surface - volume).abs())
}

/// Pullback of `dζ₁∧…∧dζₙ∧dζ̄₁∧…[dζ̄ⱼ omitted]…∧dζ̄ₙ` to the sphere at the
/// point with unit normal `nu`, as a multiple of the area form. The tangent
/// frame `(t₁,…,t_{2n−1})` is oriented so that `(ν, t₁, …)` is positive in
/// the coordinate order `(x₁,…,xₙ,xₙ₊₁,…,x₂ₙ)`.
pub fn form_pullback_density(nu: &[f64], j: usize) -> Result<Complex64> {
    let d = nu.len();
    let n = d / 2;
    if j >= n {
        return Err(invalid("form index out of range"));
    }
    let frame = oriented_tangent_frame(nu);
    let mut covectors: Vec<Vec<Complex64>> = Vec::new();
    for l in 0..n {
        let mut v = vec![c(0.0, 0.0); d];
        v[l] = c(1.0, 0.0);
        v[n + l] = c(0.0, 1.0);
        covectors.push(v);
    }
    for l in (0..n).filter(|&l| l != j) {
        let mut v = vec![c(0.0, 0.0); d];
        v[l] = c(1.0, 0.0);
        v[n + l] = c(0.0, -1.0);
        covectors.push(v);
    }
    let m = CMat::from_fn(d - 1, d - 1, |r, s| {
        (0..d).map(|i| covectors[r][i] * frame[s][i]).sum()
    });
    Ok(m.determinant())
}

fn oriented_tangent_frame(nu: &[f64]) -> Vec<Vec<f64>> {
    let d = nu.len();
    let mut basis: Vec<Vec<f64>> = vec![nu.to_vec()];
    for e in 0..d {
        let mut v = vec![0.0; d];
        v[e] = 1.0;
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
        if basis.len() == d {
            break;
        }
    }
    let m = nalgebra::DMatrix::from_fn(d, d, |r, s| basis[s][r]);
    if m.determinant() < 0.0 {
        basis[d - 1].iter_mut().for_each(|x| *x = -*x);
    }
    basis.split_off(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_point_circle() {
        let g = make_circle_grid(4, 1.0).unwrap();
        for (m, x) in g.nodes.iter().enumerate() {
            let t = PI / 2.0 * m as f64;
            assert!((x[0] - t.cos()).abs() < 1e-15 && (x[1] - t.sin()).abs() < 1e-15);
            assert!((g.weights[m] - PI / 2.0).abs() < 1e-15);
        }
        assert!(make_circle_grid(5, 1.0).is_err());
        assert!(make_circle_grid(2, 1.0).is_err());
    }

    #[test]
    fn circle_trapezoid_exactness() {
        let g = make_circle_grid(64, 1.0).unwrap();
        assert!((g.integrate(|_| 1.0) - 2.0 * PI).abs() < 1e-13);
        for k in 1..32 {
            let v = g.integrate_complex(|x| Complex64::new(0.0, k as f64 * x[1].atan2(x[0])).exp());
            assert!(v.norm() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn s3_area_and_normals() {
        let g = make_s3_grid(16, 16, 16).unwrap();
        assert!((g.integrate(|_| 1.0) - 2.0 * PI * PI).abs() < 1e-10);
        assert!(g.integrate_complex(|x| c(x[0], x[2])).norm() < 1e-10);
        for (x, nu) in g.nodes.iter().zip(&g.normals) {
            let len: f64 = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((len - 1.0).abs() < 1e-13);
            let outward: f64 = nu.iter().zip(x).map(|(a, b)| a * b).sum();
            assert!(outward > 0.0);
        }
        assert!(make_s3_grid(3, 8, 8).is_err());
    }

    #[test]
    fn s3_area_matches_monte_carlo() {
        use rand::{Rng, SeedableRng};
        // Fraction of the cube [-1,1]^4 inside the unit ball gives the volume
        // π²/2; the area follows as 4·volume.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let trials = 400_000;
        let hits = (0..trials)
            .filter(|_| (0..4).map(|_| rng.gen_range(-1.0f64..1.0).powi(2)).sum::<f64>() < 1.0)
            .count();
        let area_mc = 4.0 * 16.0 * hits as f64 / trials as f64;
        let g = make_s3_grid(8, 8, 8).unwrap();
        assert!((g.integrate(|_| 1.0) - area_mc).abs() < 0.05 * area_mc);
    }

    #[test]
    fn area_error_decreases_under_refinement() {
        let exact = 2.0 * PI * PI;
        let errs: Vec<f64> = [4usize, 5, 6]
            .iter()
            .map(|&m| (make_s3_grid(m, 8, 8).unwrap().integrate(|_| 1.0) - exact).abs())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn disc_moments() {
        let v = make_disc_grid(16, 32, 1.0).unwrap();
        assert!((v.integrate(|_| 1.0) - PI).abs() < 1e-12);
        assert!(v.integrate_complex(|x| c(x[0], x[1])).norm() < 1e-12);
        assert!((v.integrate(|x| x[0] * x[0] + x[1] * x[1]) - PI / 2.0).abs() < 1e-10);
        let off = make_polar_disc_grid(&Domain::ball(1, 1.0), &[0.3, -0.2], 24, 64).unwrap();
        assert!((off.integrate(|_| 1.0) - PI).abs() < 1e-10);
    }

    #[test]
    fn divergence_form_checks() {
        let g1 = make_circle_grid(64, 1.0).unwrap();
        let one = RealPoly::new(vec![(vec![0, 0], 1.0)]);
        let x1 = RealPoly::new(vec![(vec![1, 0], 1.0)]);
        for m in 0..2 {
            assert!(check_form_pullback(&g1, m, &one).unwrap() < 1e-13);
        }
        let s = g1.integrate(|x| x[0] * x[0]);
        assert!((s - PI).abs() < 1e-13);
        assert!(check_form_pullback(&g1, 0, &x1).unwrap() < 1e-12);
        let g2 = make_s3_grid(12, 12, 12).unwrap();
        let x1 = RealPoly::new(vec![(vec![1, 0, 0, 0], 1.0)]);
        assert!((g2.integrate(|x| x[0] * x[0]) - PI * PI / 2.0).abs() < 1e-8);
        let f = RealPoly::new(vec![(vec![2, 1, 0, 1], 1.5), (vec![0, 0, 3, 0], -0.5), (vec![1, 0, 0, 0], 2.0)]);
        for m in 0..4 {
            assert!(check_form_pullback(&g2, m, &x1).unwrap() < 1e-8);
            assert!(check_form_pullback(&g2, m, &f).unwrap() < 1e-8);
        }
    }

    #[test]
    fn ball_moments() {
        assert!((ball_monomial_integral(&[0, 0], 1.0) - PI).abs() < 1e-14);
        assert!((ball_monomial_integral(&[0, 0, 0, 0], 1.0) - PI * PI / 2.0).abs() < 1e-14);
        assert!((ball_monomial_integral(&[2, 0], 1.0) - PI / 4.0).abs() < 1e-14);
        assert!((Domain::ball(2, 1.0).area() - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn surface_form_carries_factor_i() {
        // pullback = i·(−1)^{j}(2i)^{n−1}ν_{c,j} (0-based j) times the area form
        for n in 1..=3usize {
            let d = 2 * n;
            let x: Vec<f64> = (0..d).map(|i| ((i * 7 + 3) as f64).sin()).collect();
            let len = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let nu: Vec<f64> = x.iter().map(|v| v / len).collect();
            for j in 0..n {
                let val = form_pullback_density(&nu, j).unwrap();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let pred = c(0.0, 1.0) * sign * c(0.0, 2.0).powu((n - 1) as u32) * c(nu[j], nu[n + j]);
                assert!((val - pred).norm() < 1e-12, "n={n} j={j} {val} {pred}");
            }
        }
    }
}
