//! Small dense solvers sized for single-battery models.

pub mod barrier;
pub mod bb;
pub mod model;
pub mod program;
pub mod qp;
pub mod simplex;
pub mod vertices;

pub use program::{Cmp, MathProgram, ProgramSolution, Row, Sense, Status};
pub use qp::solve_quadratic;
pub use simplex::solve_linear;
