use crate::config::RunConfig;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `metric ≤ tol`
    Le,
    /// `metric > tol`
    Gt,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub metric: f64,
    pub tol: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, metric: f64, tol: f64) -> Self {
        Check { name: name.into(), metric, tol, relation: Relation::Le, pass: metric <= tol }
    }

    pub fn gt(name: impl Into<String>, metric: f64, tol: f64) -> Self {
        Check { name: name.into(), metric, tol, relation: Relation::Gt, pass: metric > tol }
    }

    /// Boolean outcome recorded as metric 0 (holds) or 1 (fails).
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::le(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    /// Integer agreement, metric `|a − b|`.
    pub fn agree(name: impl Into<String>, a: i64, b: i64) -> Self {
        Self::le(name, (a - b).abs() as f64, 0.0)
    }
}

/// A measured quantity that is reported but not judged.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observation {
    pub name: String,
    pub value: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub version: String,
    pub config: RunConfig,
    pub kappa: [f64; 2],
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
    pub files: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(file: &str, columns: &[&str]) -> Self {
        Table { file: file.into(), columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        let j = self.columns.iter().position(|c| c == name).expect("known column");
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Check that `name` strictly decreases down the table.
    pub fn decreasing(&self, name: &str) -> Check {
        let col = self.column(name);
        let violations = col.windows(2).filter(|w| !(w[1] < w[0])).count();
        Check::le(format!("{}: {name} strictly decreasing", self.file), violations as f64, 0.0)
    }

    /// Check that every entry of `name` is at most `tol`.
    pub fn bounded(&self, name: &str, tol: f64) -> Check {
        let worst = self.column(name).into_iter().fold(0.0, f64::max);
        Check::le(format!("{}: max {name}", self.file), worst, tol)
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r
                .iter()
                .map(|v| if v.fract() == 0.0 && v.abs() < 1e15 { format!("{v}") } else { format!("{v:.6e}") })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> std::io::Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_flag() {
        let mut t = Table::new("t.csv", &["n", "err"]);
        for (n, e) in [(1.0, 3.0), (2.0, 2.0), (3.0, 2.0)] {
            t.push(vec![n, e]);
        }
        let c = t.decreasing("err");
        assert!(!c.pass && c.metric == 1.0);
        assert_eq!(t.to_csv(), "n,err\n1,3\n2,2\n3,2\n");
        assert!(t.bounded("err", 3.0).pass);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.txt", b"one").unwrap();
        write_atomic(dir.path(), "a.txt", b"two").unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("a.txt")).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
