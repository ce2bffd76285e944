//! Fixtures shared by the benchmarks.

use diracop::boundary_ops::{assemble_cauchy, Density};
use diracop::clifford::build_dirac;
use diracop::geometry::{make_circle_grid, make_s3_grid};
use diracop::{BoundaryGrid, BoundaryOperator, CVec, DiracOperator};

pub fn circle(nodes: usize) -> (DiracOperator, BoundaryGrid) {
    (build_dirac(1).expect("n = 1"), make_circle_grid(nodes, 1.0).expect("even node count"))
}

pub fn sphere(m: usize) -> (DiracOperator, BoundaryGrid) {
    (build_dirac(2).expect("n = 2"), make_s3_grid(m, m, m).expect("grid size"))
}

/// Assembled `C_h` together with a smooth non-polynomial density.
pub fn operator_and_density(op: &DiracOperator, grid: &BoundaryGrid) -> (BoundaryOperator, CVec) {
    let ch = assemble_cauchy(op, grid).expect("assembly");
    let u = Density::from_fn(grid, op.k, |z| CVec::from_fn(op.k, |i, _| (z[0] * (i as f64 + 1.0)).exp()));
    (ch, u.values)
}
