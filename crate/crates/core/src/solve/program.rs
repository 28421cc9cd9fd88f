//! Solver-level problem representation shared by the LP, QP, conic and
//! branch-and-bound engines.

use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Sparse linear row `coeffs . x (cmp) rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) -> Self {
        Row { coeffs, cmp, rhs }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Signed violation; positive means infeasible.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.dot(x);
        match self.cmp {
            Cmp::Le => lhs - self.rhs,
            Cmp::Ge => self.rhs - lhs,
            Cmp::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// `optimize  1/2 x'Hx + g'x + constant` subject to rows and variable bounds.
///
/// Lower bounds must be finite. A quadratic term is only allowed with
/// [`Sense::Minimize`] and a positive semidefinite `H`.
#[derive(Clone, Debug)]
pub struct MathProgram {
    pub num_vars: usize,
    pub sense: Sense,
    pub linear: Vec<f64>,
    pub hessian: Option<DMatrix<f64>>,
    pub constant: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

impl MathProgram {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        MathProgram {
            num_vars,
            sense,
            linear: vec![0.0; num_vars],
            hessian: None,
            constant: 0.0,
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let mut v = self.constant + self.linear.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        if let Some(h) = &self.hessian {
            let hx = h * nalgebra::DVector::from_column_slice(x);
            v += 0.5 * hx.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
        v
    }

    /// Largest violation over rows and bounds.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x)).fold(0.0, f64::max);
        let bounds = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| (lo - v).max(v - hi))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

#[derive(Clone, Debug)]
pub struct ProgramSolution {
    pub status: Status,
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Stationarity residual of the KKT system, where the engine computes one.
    pub kkt_residual: Option<f64>,
}

impl ProgramSolution {
    pub(crate) fn failed(status: Status, num_vars: usize, iterations: usize) -> Self {
        ProgramSolution {
            status,
            x: vec![f64::NAN; num_vars],
            objective: f64::NAN,
            iterations,
            kkt_residual: None,
        }
    }
}
