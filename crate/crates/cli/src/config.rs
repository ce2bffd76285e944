//! Run configuration: built-in defaults, then an optional `key = value`
//! file, then command-line flags.
//!
//! Recognised keys: `n`, `nodes`, `hopf` (`a,b,c`), `symbol`, `k`, `tol`,
//! `tau`, `eta`, `seed`, `out`. Blank lines and lines starting with `#` are
//! ignored.

use clap::ValueEnum;
use serde::Serialize;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Clifford,
    Green,
    Cauchy,
    Symbol,
    ToeplitzIndex,
    Octonion,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Clifford => "clifford",
            Suite::Green => "green",
            Suite::Cauchy => "cauchy",
            Suite::Symbol => "symbol",
            Suite::ToeplitzIndex => "toeplitz-index",
            Suite::Octonion => "octonion",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub suite: Suite,
    pub n: usize,
    /// Circle grid size.
    pub nodes: usize,
    /// `(n_η, n_θ₁, n_θ₂)` for S³ grids.
    pub hopf: [usize; 3],
    pub symbol: String,
    pub k: i64,
    /// Overrides the primary tolerance of the suite.
    pub tol: Option<f64>,
    pub tau: f64,
    pub eta: f64,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub nodes: Option<usize>,
    pub hopf: Option<[usize; 3]>,
    pub symbol: Option<String>,
    pub k: Option<i64>,
    pub tol: Option<f64>,
    pub tau: Option<f64>,
    pub eta: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn parse_hopf(s: &str) -> Result<[usize; 3], UsageError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(usage(format!("hopf expects a,b,c, got {s:?}")));
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| usage(format!("bad hopf entry {p:?}")))?;
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, UsageError> {
    v.parse().map_err(|_| usage(format!("bad value for {key}: {v:?}")))
}

impl Overrides {
    pub fn parse_file(text: &str) -> Result<Self, UsageError> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim().trim_matches('"'));
            match key {
                "n" => o.n = Some(parse_value(key, value)?),
                "nodes" => o.nodes = Some(parse_value(key, value)?),
                "hopf" => o.hopf = Some(parse_hopf(value)?),
                "symbol" => o.symbol = Some(value.to_string()),
                "k" => o.k = Some(parse_value(key, value)?),
                "tol" => o.tol = Some(parse_value(key, value)?),
                "tau" => o.tau = Some(parse_value(key, value)?),
                "eta" => o.eta = Some(parse_value(key, value)?),
                "seed" => o.seed = Some(parse_value(key, value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                _ => return Err(usage(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        Ok(o)
    }

    /// Fields set in `over` win.
    pub fn merge(self, over: Overrides) -> Overrides {
        Overrides {
            n: over.n.or(self.n),
            nodes: over.nodes.or(self.nodes),
            hopf: over.hopf.or(self.hopf),
            symbol: over.symbol.or(self.symbol),
            k: over.k.or(self.k),
            tol: over.tol.or(self.tol),
            tau: over.tau.or(self.tau),
            eta: over.eta.or(self.eta),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
        }
    }
}

impl RunConfig {
    pub fn resolve(suite: Suite, o: Overrides) -> Result<Self, UsageError> {
        let cfg = RunConfig {
            suite,
            n: o.n.unwrap_or(1),
            nodes: o.nodes.unwrap_or(256),
            hopf: o.hopf.unwrap_or([16, 16, 16]),
            symbol: o.symbol.unwrap_or_else(|| "exp(i*k*theta)".into()),
            k: o.k.unwrap_or(1),
            tol: o.tol,
            tau: o.tau.unwrap_or(1e-6),
            eta: o.eta.unwrap_or(0.9),
            seed: o.seed.unwrap_or(0),
            out: o.out.unwrap_or_else(|| PathBuf::from("diracop-out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), UsageError> {
        if self.n == 0 || self.n > 6 {
            return Err(usage("n must be between 1 and 6"));
        }
        if self.nodes < 32 || self.nodes % 2 != 0 {
            return Err(usage("nodes must be even and at least 32"));
        }
        if self.hopf.iter().any(|&m| m < 4) {
            return Err(usage("every hopf entry must be at least 4"));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(usage("tol must be positive"));
            }
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(usage("tau must be positive"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(usage("eta must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = Overrides::parse_file("# comment\nn = 2\nnodes = 64\nhopf = 8, 8, 12\nsymbol = \"cos(theta)\"\n").unwrap();
        assert_eq!(file.hopf, Some([8, 8, 12]));
        assert_eq!(file.symbol.as_deref(), Some("cos(theta)"));
        let flags = Overrides { nodes: Some(128), ..Default::default() };
        let cfg = RunConfig::resolve(Suite::Cauchy, file.merge(flags)).unwrap();
        assert_eq!((cfg.n, cfg.nodes), (2, 128));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Overrides::parse_file("speed = 3").is_err());
        assert!(Overrides::parse_file("n 3").is_err());
        assert!(parse_hopf("8,8").is_err());
        let bad_tol = Overrides { tol: Some(-1.0), ..Default::default() };
        assert!(RunConfig::resolve(Suite::Clifford, bad_tol).is_err());
        let odd = Overrides { nodes: Some(33), ..Default::default() };
        assert!(RunConfig::resolve(Suite::Cauchy, odd).is_err());
    }
}
