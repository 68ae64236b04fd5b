//! Weighted Sturm–Liouville eigenproblem `−(w u′)′ = λ w u` with
//! `w = F^{n−1}`, which carries the co-closed `p`-forms `u(t)·vol_{S^p}` of
//! the product `S^p × chain`.
//!
//! The spectrum computed here is that of the quadratic form restricted to
//! this invariant sector, not the full Hodge spectrum.

mod bound;
mod matrices;
mod problem;
mod solver;
mod testform;

pub use bound::{eigenvalue_bound, bound_constant, richardson_extrapolate, richardson_order};
pub use matrices::{assemble, discretize, Discretization, PathLaplacian, SymTridiagonal};
pub use problem::{allocate_cells, reduce_to_sl, Boundary, Mesh, SturmLiouvilleProblem, MIN_GRID};
pub use solver::{eigenvector, solve_lowest, solve_problem, solve_with_refinement, Spectrum, BISECTION_REL_TOL};
pub use testform::{build_cutoffs, PiecewiseLinear, TestFormFamily, TestFunction};
