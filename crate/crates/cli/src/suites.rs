//! One function per suite. Each records checks, unjudged observations and
//! CSV tables into a [`Sink`].

use crate::config::{RunConfig, Suite};
use crate::report::{Check, Observation, Report, Table};
use diracop::boundary_ops::torus::resolved_defect;
use diracop::boundary_ops::{
    assemble_cauchy, circle_band_projector, exact_szego_circle, exterior_vanishing, interior_eval, jump_residual,
    projection_defect, szego_projection, Density, OperatorData, VolumeTerm,
};
use diracop::cayley::{
    alternativity_check, associator_norm_sqr, commutant_multiplier, dickson_product, octonion_dirac, octonion_mult,
    printed_dickson_product, symbol_commutator, x_form, x_invertibility, ConjOrder, DicksonMatrix, Octonion,
    Quaternion, RealLinearMap,
};
use diracop::clifford::{
    adjoint_symbol, boundary_symbol, build_dirac, check_identities, complexify, polynomial_solutions, principal_symbol,
};
use diracop::geometry::{make_circle_grid, make_polar_disc_grid, make_s3_grid};
use diracop::linalg::{c, identity, max_abs, spectral_norm};
use diracop::symbols::{
    calibrate_kappa, cauchy_symbol_at, circle_cosphere, ellipticity_scan, numeric_symbol_extraction,
    projection_symbol, pv_integral_check, pv_symbol_integral, random_cosphere, CosphereSample, SymbolConvention,
};
use diracop::toeplitz::{
    extension_op, numeric_kernel_count, numerical_rank, semicommutator, toeplitz_op, winding_index, KernelCount,
};
use diracop::{CMat, CVec, Complex64, Error, Multiplier, Result};
use num::{BigInt, BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Default)]
pub struct Sink {
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
    pub tables: Vec<Table>,
    /// Extra JSON documents, `(file name, contents)`.
    pub documents: Vec<(String, String)>,
}

impl Sink {
    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn observe(&mut self, name: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("plain data");
        self.observations.push(Observation { name: name.into(), value });
    }

    fn table(&mut self, t: Table) {
        self.tables.push(t);
    }
}

/// A finished run: the report and every file that belongs next to it.
pub struct Run {
    pub report: Report,
    pub files: Vec<(String, String)>,
}

pub fn run_suite(cfg: &RunConfig) -> Result<Run> {
    let kappa = calibrate_kappa(SymbolConvention::Adopted)?;
    let mut sink = Sink::default();
    match cfg.suite {
        Suite::Clifford => clifford(cfg, &mut sink)?,
        Suite::Green => green(cfg, &mut sink)?,
        Suite::Cauchy => cauchy(cfg, &mut sink)?,
        Suite::Symbol => symbol(cfg, kappa, &mut sink)?,
        Suite::ToeplitzIndex => toeplitz_index(cfg, kappa, &mut sink)?,
        Suite::Octonion => octonion(cfg, &mut sink)?,
    }
    let mut files: Vec<(String, String)> = sink.tables.iter().map(|t| (t.file.clone(), t.to_csv())).collect();
    files.extend(sink.documents);
    let report = Report {
        suite: cfg.suite.name().into(),
        version: diracop::VERSION.into(),
        config: cfg.clone(),
        kappa: [kappa.re, kappa.im],
        checks: sink.checks,
        observations: sink.observations,
        files: files.iter().map(|(n, _)| n.clone()).collect(),
    };
    Ok(Run { report, files })
}

fn rand_xi(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect()
}

fn clifford(cfg: &RunConfig, s: &mut Sink) -> Result<()> {
    let tol = cfg.tol_or(1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = Table::new("clifford.csv", &["n", "k", "identity_residual", "factorization_residual", "solution_residual"]);
    for n in 1..=cfg.n {
        let op = build_dirac(n)?;
        let id = check_identities(&op).max_residual;
        let mut fact: f64 = 0.0;
        for _ in 0..100 {
            let xi = rand_xi(&mut rng, 2 * n);
            let sym = principal_symbol(&op, &xi)?;
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            fact = fact.max(max_abs(&(sym.adjoint() * &sym - identity(op.k) * c(r2 / 4.0, 0.0))));
        }
        let sol = polynomial_solutions(&op, 1).max_residual();
        s.check(Check::le(format!("identities n={n}"), id, 0.0));
        s.check(Check::le(format!("symbol factorization n={n}"), fact, tol));
        s.check(Check::le(format!("degree-1 solutions n={n}"), sol, tol));
        table.push(vec![n as f64, op.k as f64, id, fact, sol]);
    }
    if cfg.n >= 2 {
        let op = build_dirac(2)?;
        let m = |v: [f64; 4]| CMat::from_row_slice(2, 2, &v.map(|x| c(x, 0.0)));
        let verbatim = op.alpha[0] == m([0.0, 0.0, 0.0, 1.0])
            && op.alpha[1] == m([0.0, 0.0, 1.0, 0.0])
            && op.beta[0] == m([1.0, 0.0, 0.0, 0.0])
            && op.beta[1] == m([0.0, -1.0, 0.0, 0.0]);
        s.check(Check::holds("n=2 coefficients match the worked example", verbatim));
        s.documents.push(("operator_n2.json".into(), to_json(&op.to_json())));
    }
    s.table(table);
    Ok(())
}

fn to_json(v: &impl Serialize) -> String {
    let mut out = serde_json::to_string_pretty(v).expect("plain data");
    out.push('\n');
    out
}

fn scalar(v: Complex64) -> CVec {
    CVec::from_element(1, v)
}

fn green(cfg: &RunConfig, s: &mut Sink) -> Result<()> {
    match cfg.n {
        1 => green_circle(cfg, s),
        2 => green_sphere(cfg, s),
        n => Err(Error::InvalidArgument(format!("green suite supports n = 1 or 2, got {n}"))),
    }
}

fn green_circle(cfg: &RunConfig, s: &mut Sink) -> Result<()> {
    let tol = cfg.tol_or(1e-10);
    let op = build_dirac(1)?;
    let g = make_circle_grid(cfg.nodes, 1.0)?;

    let u = Density::from_fn(&g, 1, |z| scalar(z[0] * z[0]));
    let mut interior: f64 = 0.0;
    for i in 0..10 {
        let a = 2.0 * std::f64::consts::PI * i as f64 / 10.0;
        let z = Complex64::from_polar(0.09 * i as f64, a);
        let v = interior_eval(&op, &g, &u, &[z], None)?;
        interior = interior.max((v[0] - z * z).norm());
    }
    s.check(Check::le("interior reproduction of z^2", interior, tol));

    let mut exterior: f64 = 0.0;
    for m in 0..=5 {
        let u = Density::from_fn(&g, 1, |z| scalar(z[0].powi(m)));
        for w in [c(2.0, 0.0), c(0.0, 1.5), c(-1.2, -1.2)] {
            exterior = exterior.max(exterior_vanishing(&op, &g, &u, &[w])?);
        }
    }
    s.check(Check::le("exterior vanishing of z^m, m = 0..5", exterior, tol));

    let ub = Density::from_fn(&g, 1, |z| scalar(z[0].conj()));
    let mut volume: f64 = 0.0;
    for z in [c(0.3, -0.2), c(-0.5, 0.1), c(0.0, 0.6)] {
        let vg = make_polar_disc_grid(&g.domain, &[z.re, z.im], 64, 128)?;
        let vol = VolumeTerm { grid: &vg, au: vec![scalar(c(1.0, 0.0)); vg.nodes.len()] };
        let v = interior_eval(&op, &g, &ub, &[z], Some(&vol))?;
        volume = volume.max((v[0] - z.conj()).norm());
    }
    s.check(Check::le("conj(z) with volume term", volume, 1e-6));

    // a holomorphic trace with a pole at 1.5: geometric convergence at z = 0
    let mut conv = Table::new("green_convergence.csv", &["nodes", "interior_error"]);
    for n in [16, 24, 32] {
        let gn = make_circle_grid(n, 1.0)?;
        let u = Density::from_fn(&gn, 1, |z| scalar(1.0 / (z[0] - 1.5)));
        let v = interior_eval(&op, &gn, &u, &[c(0.0, 0.0)], None)?;
        conv.push(vec![n as f64, (v[0] + 2.0 / 3.0).norm()]);
    }
    s.check(conv.decreasing("interior_error"));
    s.table(conv);

    let gj = make_circle_grid(512, 1.0)?;
    let uj = Density::circle_fn(&gj, |t| c((3.0 * t).cos() + 0.5, (3.0 * t).sin()));
    let mut jump = Table::new("jump.csv", &["offset", "residual"]);
    let mut first_order: f64 = 0.0;
    for d in [0.2, 0.1, 0.05, 3.0 * gj.spacing()] {
        let r = jump_residual(&op, &gj, &uj, 5, d)?;
        first_order = first_order.max(r / d);
        jump.push(vec![d, r]);
    }
    s.check(jump.decreasing("residual"));
    s.check(Check::le("jump residual / offset", first_order, 3.5));
    s.table(jump);
    Ok(())
}

fn green_sphere(cfg: &RunConfig, s: &mut Sink) -> Result<()> {
    let tol = cfg.tol_or(1e-10);
    let op = build_dirac(2)?;
    let [a, b, cc] = cfg.hopf;
    let g = make_s3_grid(a, b, cc)?;
    let zero = c(0.0, 0.0);
    let fields: [(&str, fn(&[Complex64]) -> CVec); 3] = [
        ("constant", |_| CVec::from_vec(vec![c(1.0, 0.0), c(-2.0, 0.5)])),
        ("(z1, 0)", |z| CVec::from_vec(vec![z[0], c(0.0, 0.0)])),
        ("(conj z2, 0)", |z| CVec::from_vec(vec![z[1].conj(), c(0.0, 0.0)])),
    ];
    let points = [[zero, zero], [c(0.1, 0.0), c(0.0, 0.05)], [c(-0.15, 0.05), c(0.1, 0.0)]];
    for (name, f) in fields {
        let u = Density::from_fn(&g, 2, f);
        let mut err: f64 = 0.0;
        for z in &points {
            err = err.max((interior_eval(&op, &g, &u, z, None)? - f(z)).norm());
        }
        s.check(Check::le(format!("interior reproduction of {name}"), err, tol));
    }

    // exterior values are smooth integrals that only converge spectrally
    let outside = [[c(2.0, 0.0), zero], [zero, c(0.0, 2.2)]];
    let mut table = Table::new("s3_exterior.csv", &["n_eta", "n_t1", "n_t2", "exterior_residual"]);
    for step in 0..3 {
        let [a, b, cc] = cfg.hopf.map(|m| m + 4 * step);
        let g = make_s3_grid(a, b, cc)?;
        let mut ext: f64 = 0.0;
        for (_, f) in fields {
            let u = Density::from_fn(&g, 2, f);
            for w in &outside {
                ext = ext.max(exterior_vanishing(&op, &g, &u, w)?);
            }
        }
        table.push(vec![a as f64, b as f64, cc as f64, ext]);
    }
    s.check(table.decreasing("exterior_residual"));
    s.table(table);
    Ok(())
}

fn cauchy(cfg: &RunConfig, s: &mut Sink) -> Result<()> {
    match cfg.n {
        1 => cauchy_circle(cfg, s),
        2 => cauchy_sphere(cfg, s),
        n => Err(Error::InvalidArgument(format!("cauchy suite supports n = 1 or 2, got {n}"))),
    }
}

fn cauchy_circle(cfg: &RunConfig, s: &mut Sink) -> Result<()> {
    let tol = cfg.tol_or(1e-8);
    let op = build_dirac(1)?;
    let n = cfg.nodes;
    let g = make_circle_grid(n, 1.0)?;
    let ch = assemble_cauchy(&op, &g)?;
    s.check(Check::le("projection_defect", projection_defect(&ch)?, tol));
    let pi = szego_projection(&ch).to_dense()?;
    let full = spectral_norm(&(&pi - exact_szego_circle(n, n / 2 - 1)?.to_dense()?));
    let band =
        spectral_norm(&((&pi - exact_szego_circle(n, n / 4)?.to_dense()?) * circle_band_projector(n, n / 4)));
    s.check(Check::le("szego projection vs Fourier oracle", full, tol));
    s.check(Check::le("szego projection vs oracle on |k| <= N/4", band, tol));

    // 1/(ζ − 1.1) is holomorphic inside, so C u = u/2; the discrete error is
    // pure aliasing of its slowly decaying Fourier tail
    let mut table = Table::new("cauchy_convergence.csv", &["nodes", "defect", "holomorphic_error", "constant_error"]);
    for m in [n / 4, n / 2, n] {
        let gm = make_circle_grid(m, 1.0)?;
        let cm = assemble_cauchy(&op, &gm)?;
        let u = Density::from_fn(&gm, 1, |z| scalar(1.0 / (z[0] - 1.1)));
        let holo = (cm.apply(&u.values)? - &u.values * c(0.5, 0.0)).camax();
        let one = CVec::from_element(m, c(1.0, 0.0));
        let cst = (cm.apply(&one)? - &one * c(0.5, 0.0)).camax();
        table.push(vec![m as f64, projection_defect(&cm)?, holo, cst]);
    }
    s.check(table.bounded("defect", tol));
    s.check(table.decreasing("holomorphic_error"));
    s.check(table.bounded("constant_error", 1e-14));
    s.table(table);
    Ok(())
}

fn cauchy_sphere(cfg: &RunConfig, s: &mut Sink) -> Result<()> {
    let op = build_dirac(2)?;
    let mut table = Table::new(
        "s3_defect.csv",
        &["n_eta", "n_t1", "n_t2", "defect", "resolved_defect", "constant_error", "z1_error"],
    );
    for step in 0..3 {
        let [a, b, cc] = cfg.hopf.map(|m| m + 4 * step);
        let g = make_s3_grid(a, b, cc)?;
        let ch = assemble_cauchy(&op, &g)?;
        let defect = projection_defect(&ch)?;
        let OperatorData::Torus(tb) = &ch.data else {
            return Err(Error::InvalidArgument("S³ operator is not block-circulant".into()));
        };
        let resolved = resolved_defect(tb, (b.min(cc) / 4) as i64, a / 2)?;
        let half = |f: fn(&[Complex64]) -> CVec| -> Result<f64> {
            let u = Density::from_fn(&g, 2, f);
            Ok((ch.apply(&u.values)? - &u.values * c(0.5, 0.0)).camax())
        };
        let cst = half(|_| CVec::from_vec(vec![c(1.0, 0.0), c(-2.0, 0.5)]))?;
        let z1 = half(|z| CVec::from_vec(vec![z[0], c(0.0, 0.0)]))?;
        table.push(vec![a as f64, b as f64, cc as f64, defect, resolved, cst, z1]);
    }
    s.check(table.decreasing("defect"));
    s.check(table.bounded("constant_error", cfg.tol_or(1e-12)));
    s.table(table);
    Ok(())
}

fn symbol(cfg: &RunConfig, kappa: Complex64, s: &mut Sink) -> Result<()> {
    let tol = cfg.tol_or(1e-12);
    let op1 = build_dirac(1)?;
    let op2 = build_dirac(2)?;
    let circle: Vec<CosphereSample> = circle_cosphere(&make_circle_grid(cfg.nodes, 1.0)?);
    let [a, b, cc] = cfg.hopf;
    let g2 = make_s3_grid(a, b, cc)?;
    let sphere = random_cosphere(&g2, (g2.len() / 16).max(1), 8, cfg.seed);
    let mut idem: f64 = 0.0;
    for (op, samples) in [(&op1, &circle), (&op2, &sphere)] {
        for smp in samples {
            let p = projection_symbol(op, smp, kappa)?;
            idem = idem.max(max_abs(&(&p * &p - &p)));
        }
    }
    s.check(Check::le("projection symbol idempotency", idem, tol));
    s.observe("cosphere samples", [circle.len(), sphere.len()]);

    // the principal-value route lands on −2σ¹(A*)(ξ̂)σ, independently of κ
    let mut pv_route: f64 = 0.0;
    for (op, samples) in [(&op1, &circle[..8]), (&op2, &sphere[..8.min(sphere.len())])] {
        for smp in samples {
            let got = pv_symbol_integral(op, &smp.nu, &smp.xi)?;
            let want = adjoint_symbol(op, &smp.xi)? * boundary_symbol(op, &complexify(&smp.nu))? * c(-2.0, 0.0);
            pv_route = pv_route.max(max_abs(&(got - want)));
        }
    }
    s.check(Check::le("principal-value symbol route", pv_route, 1e-10));
    let pv = [0.5, 1.0, 2.0].iter().map(|r| pv_integral_check(*r)).collect::<Result<Vec<_>>>()?;
    s.check(Check::le("principal-value scalar integral", pv.into_iter().fold(0.0, f64::max), 1e-10));

    let v = scalar(c(1.0, 0.0));
    let mut table = Table::new("symbol_extraction.csv", &["omega", "nodes", "error"]);
    for (n, w) in [(512, 20.0), (1024, 40.0)] {
        let g = make_circle_grid(n, 1.0)?;
        let ch = assemble_cauchy(&op1, &g)?;
        let xi = [0.0, 1.0];
        let got = numeric_symbol_extraction(&ch, &g, 0, &xi, w, &v)?;
        let want = cauchy_symbol_at(&op1, &g.normals[0], &xi, kappa)? * &v;
        table.push(vec![w, n as f64, (got - want).norm()]);
    }
    let errs = table.column("error");
    s.check(Check::le("extraction error at omega = 20", errs[0], 0.1));
    s.check(Check::le("extraction error at omega = 40 vs 1.2 x omega = 20", errs[1], 1.2 * errs[0] + 1e-12));
    s.table(table);
    Ok(())
}

/// Scalar multiplier families accepted by `--symbol`.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Family {
    Mode(i64),
    Cos,
    ShiftedCos,
    One,
}

impl Family {
    fn parse(text: &str, k: i64) -> Result<Self> {
        let t: String = text.chars().filter(|ch| !ch.is_whitespace()).collect::<String>().to_lowercase();
        match t.as_str() {
            "exp(i*k*theta)" | "exp(ik*theta)" | "exp(ikθ)" | "exp(i*k*θ)" => Ok(Family::Mode(k)),
            "cos(theta)" | "cosθ" | "cos(θ)" => Ok(Family::Cos),
            "2+cos(theta)" | "2+cos(θ)" => Ok(Family::ShiftedCos),
            "1" | "const" | "identity" => Ok(Family::One),
            _ => Err(Error::InvalidArgument(format!(
                "unknown symbol {text:?}; expected exp(i*k*theta), cos(theta), 2+cos(theta) or 1"
            ))),
        }
    }

    fn eval(self, t: f64) -> Complex64 {
        match self {
            Family::Mode(k) => Complex64::from_polar(1.0, k as f64 * t),
            Family::Cos => c(t.cos(), 0.0),
            Family::ShiftedCos => c(2.0 + t.cos(), 0.0),
            Family::One => c(1.0, 0.0),
        }
    }

    fn descriptor(self) -> String {
        match self {
            Family::Mode(k) => format!("exp(i*{k}*theta)"),
            Family::Cos => "cos(theta)".into(),
            Family::ShiftedCos => "2+cos(theta)".into(),
            Family::One => "1".into(),
        }
    }

    /// `None` when the symbol vanishes somewhere on the circle.
    fn expected_index(self) -> Option<i64> {
        match self {
            Family::Mode(k) => Some(-k),
            Family::Cos => None,
            Family::ShiftedCos | Family::One => Some(0),
        }
    }
}

#[derive(Serialize)]
struct IndexReport {
    symbol: String,
    winding: Option<i64>,
    toeplitz: Option<KernelCount>,
    extension: Option<KernelCount>,
    index: Option<i64>,
    agree: bool,
}

fn toeplitz_index(cfg: &RunConfig, kappa: Complex64, s: &mut Sink) -> Result<()> {
    if cfg.n != 1 {
        return Err(Error::InvalidArgument("index computation is available for n = 1 only".into()));
    }
    let fam = Family::parse(&cfg.symbol, cfg.k)?;
    let op = build_dirac(1)?;
    let g = make_circle_grid(cfg.nodes, 1.0)?;
    let pi = szego_projection(&assemble_cauchy(&op, &g)?);
    let m = Multiplier::circle(&g, &fam.descriptor(), |t| fam.eval(t))?;

    let samples = circle_cosphere(&g);
    let scan = ellipticity_scan(&op, |smp| CMat::from_element(1, 1, fam.eval(smp.z[1].atan2(smp.z[0]))), &samples, kappa)?;
    let expected = fam.expected_index();
    s.check(Check::holds("ellipticity verdict", scan.elliptic == expected.is_some()));
    s.observe("min singular value of the extension symbol", scan.min_sv);

    let mut doc = IndexReport {
        symbol: fam.descriptor(),
        winding: None,
        toeplitz: None,
        extension: None,
        index: None,
        agree: false,
    };
    let winding = winding_index(&m.scalar_samples()?);
    match expected {
        None => {
            s.check(Check::holds("winding route rejects a vanishing symbol", matches!(winding, Err(Error::NonFredholm(_)))));
        }
        Some(want) => {
            let w = winding?;
            let tm = toeplitz_op(&pi, &m)?;
            let kt = numeric_kernel_count(&tm, Some(&pi), &g, cfg.tau, cfg.eta)?;
            let ke = numeric_kernel_count(&extension_op(&tm, &pi)?, None, &g, cfg.tau, cfg.eta)?;
            s.check(Check::agree("winding index vs expected", w.index, want));
            s.check(Check::agree("finite-section index vs winding", kt.index, w.index));
            s.check(Check::agree("extension index vs Toeplitz index", ke.index, kt.index));
            s.check(Check::holds("finite-section counts conclusive", !kt.inconclusive && !ke.inconclusive));
            doc.agree = w.index == kt.index && kt.index == ke.index && !kt.inconclusive && !ke.inconclusive;
            doc.winding = Some(w.winding);
            doc.index = Some(kt.index);
            doc.toeplitz = Some(kt);
            doc.extension = Some(ke);
        }
    }
    s.documents.push(("index.json".into(), to_json(&doc)));

    let z = Multiplier::circle_mode(&g, 1)?;
    let zb = Multiplier::circle_mode(&g, -1)?;
    let smooth = Multiplier::circle(&g, "2+cos", |t| c(2.0 + t.cos(), 0.3 * (2.0 * t).sin()))?;
    let hankel = semicommutator(&pi, &z, &zb)?;
    let mixed = semicommutator(&pi, &smooth, &z)?;
    let tol = cfg.tol_or(1e-9);
    s.check(Check::le("semicommutator identity (z, conj z)", hankel.identity_residual, tol));
    s.check(Check::le("semicommutator identity (smooth, z)", mixed.identity_residual, tol));
    s.check(Check::agree("rank of T_z T_conj(z) - I", numerical_rank(&hankel.singular_values, 1e-6) as i64, 1));
    let mut prof = Table::new("semicommutator_sv.csv", &["j", "sigma"]);
    for (j, v) in hankel.singular_values.iter().enumerate() {
        prof.push(vec![(j + 1) as f64, *v]);
    }
    s.table(prof);
    Ok(())
}

fn rq(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-20..=20)), BigInt::from(rng.gen_range(1..=7)))
}

fn rational_octonion(rng: &mut ChaCha8Rng) -> Octonion<BigRational> {
    let mut q = || Quaternion::new(rq(rng), rq(rng), rq(rng), rq(rng));
    Octonion::new(q(), q())
}

fn float_octonion(rng: &mut ChaCha8Rng) -> Octonion<f64> {
    let mut q = || Quaternion::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    Octonion::new(q(), q())
}

fn random_cmat(rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(2, 2, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
}

fn octonion(cfg: &RunConfig, s: &mut Sink) -> Result<()> {
    let tol = cfg.tol_or(1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut alternative = 0usize;
    for _ in 0..1000 {
        let d = DicksonMatrix::from_octonion(&rational_octonion(&mut rng));
        let p = DicksonMatrix::from_octonion(&rational_octonion(&mut rng));
        let (l, r) = alternativity_check(&d, &p);
        alternative += usize::from(!(l.is_zero() && r.is_zero()));
    }
    s.check(Check::le("alternativity failures over 1000 rational pairs", alternative as f64, 0.0));

    let mut comp: f64 = 0.0;
    let mut printed: f64 = 0.0;
    for _ in 0..1000 {
        let (x, y) = (float_octonion(&mut rng), float_octonion(&mut rng));
        let rhs = (x.norm_sqr() * y.norm_sqr()).sqrt();
        comp = comp.max((octonion_mult(&x, &y).norm_sqr().sqrt() - rhs).abs() / rhs);
        let (dx, dy) = (DicksonMatrix::from_octonion(&x), DicksonMatrix::from_octonion(&y));
        let good = dickson_product(&dx, &dy).entries();
        let lit = printed_dickson_product(&dx, &dy);
        let diff: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| lit[i][j].sub(&good[i][j]).norm_sqr()).sum();
        printed = printed.max(diff.sqrt() / rhs);
    }
    s.check(Check::le("composition law |xy| = |x||y| (relative)", comp, tol));
    s.observe("largest relative deviation of the printed Dickson product", printed);

    let (e1, e2, e4) = (Octonion::<BigRational>::basis(1), Octonion::basis(2), Octonion::basis(4));
    s.check(Check::holds("(e1 e2) e4 != e1 (e2 e4)", !associator_norm_sqr(&e1, &e2, &e4).is_zero()));

    let op = octonion_dirac(ConjOrder::DerivativeOfConjugate);
    let xis: Vec<Vec<f64>> = (0..1000).map(|_| rand_xi(&mut rng, 8)).collect();
    let zero = RealLinearMap::zero(2);
    let mut forward: f64 = 0.0;
    for _ in 0..20 {
        let w1 = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let w2 = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let m = commutant_multiplier(&x_form(w1, w2), &zero)?;
        forward = forward.max(symbol_commutator(&op, &m, &xis[..100])?);
    }
    s.check(Check::le("commutant-form multipliers commute with the symbol", forward, tol));
    let mut converse = f64::INFINITY;
    for _ in 0..20 {
        let (a, b) = (random_cmat(&mut rng), random_cmat(&mut rng));
        let m = commutant_multiplier(&RealLinearMap::from_parts(&b, &a)?, &RealLinearMap::from_parts(&a, &b)?)?;
        converse = converse.min(symbol_commutator(&op, &m, &xis[..20])?);
    }
    s.check(Check::gt("generic multipliers fail to commute (min commutator)", converse, 0.1));

    let mut ratio = f64::INFINITY;
    for xi in &xis {
        let r: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        ratio = ratio.min(op.symbol(xi)?.singular_values()[7] / r);
    }
    s.check(Check::gt("min sigma_min(symbol) / |xi| over 1000 xi", ratio, 1e-8));
    let singular = op.symbol(&[0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0])?.singular_values()[7];
    s.observe("sigma_min of the symbol at xi = e4 + e5 (1-based)", singular);

    let inv = x_invertibility(c(0.0, 1.0), c(0.0, 0.0));
    s.observe("det at (w1, w2) = (i, 0): real 4x4 determinant", inv.real_det);
    s.observe("det at (w1, w2) = (i, 0): closed form w1^2 + |w2|^2", [inv.printed_det.re, inv.printed_det.im]);
    Ok(())
}
