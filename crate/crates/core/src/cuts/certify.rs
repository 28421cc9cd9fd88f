//! Brute-force certificates for generated cuts: validity on every vertex,
//! tightness counts, and dominance of the baseline cuts.

use nalgebra::DMatrix;

use crate::battery::BatteryParams;
use crate::cuts::redundancy::{is_redundant, redundancy_filter};
use crate::cuts::{gen_pozo_cuts, gen_window_cuts, CoefficientTable, CutFamily, LinearCut};
use crate::error::{Error, Result};
use crate::solve::program::{MathProgram, Sense, Status};
use crate::solve::simplex::solve_linear;
use crate::solve::vertices::{enumerate_vertices, enumerate_vertices_by_pattern};

pub const VALIDITY_TOL: f64 = 1e-8;
pub const TIGHT_TOL: f64 = 1e-8;
pub const DOMINANCE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport {
    pub max_violation: f64,
    /// Index of the cut attaining `max_violation`.
    pub worst_cut: Option<usize>,
    pub vertices_checked: usize,
    pub pass: bool,
}

/// Checks every cut on every vertex of every fixed-mode polytope. Mode terms
/// are evaluated at the integral pattern of the polytope.
pub fn validate_cuts(cuts: &[LinearCut], params: &BatteryParams) -> Result<ValidityReport> {
    let patterns = enumerate_vertices_by_pattern(params)?;
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst_cut = None;
    let mut vertices_checked = 0;
    for pat in &patterns {
        for v in &pat.vertices {
            vertices_checked += 1;
            for (i, cut) in cuts.iter().enumerate() {
                let viol = cut.violation(&v.p_ch, &v.p_dis, Some(&pat.mode));
                if viol > max_violation {
                    max_violation = viol;
                    worst_cut = Some(i);
                }
            }
        }
    }
    if cuts.is_empty() {
        max_violation = 0.0;
    }
    Ok(ValidityReport { max_violation, worst_cut, vertices_checked, pass: max_violation <= VALIDITY_TOL })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FacetCertificate {
    pub tight_count: usize,
    pub affine_rank: usize,
    /// Tight vertices needed to pass: `2 (tau_bar + 1)`.
    pub required: usize,
    /// Window variables fixed at zero by the SoC envelope. Each one lowers
    /// the dimension of the hull, and with it the number of tight vertices a
    /// facet needs.
    pub frozen_vars: usize,
    /// The cut was filtered as redundant, so no certificate is required.
    pub skipped: bool,
    pub pass: bool,
}

impl FacetCertificate {
    /// Pass test with the requirement lowered by the frozen variables.
    pub fn pass_adjusted(&self) -> bool {
        self.skipped || self.tight_count + self.frozen_vars >= self.required
    }
}

/// Counts distinct vertices of the complementarity set at which `cut` holds
/// with equality, and the affine rank of that set.
pub fn facet_certificate(cut: &LinearCut, params: &BatteryParams) -> Result<FacetCertificate> {
    if !matches!(
        cut.family,
        CutFamily::WindowCharge | CutFamily::WindowDischarge | CutFamily::SingleperiodBox
    ) {
        return Err(Error::Model(format!("no facet certificate for {} cuts", cut.family)));
    }
    let required = 2 * (cut.meta.tau_bar + 1);
    let tab = CoefficientTable::new(params);
    let frozen_vars = (cut.meta.t..=cut.meta.t + cut.meta.tau_bar)
        .map(|k| (tab.ch_rate(k) <= tab.zero_tol) as usize + (tab.dis_rate(k) <= tab.zero_tol) as usize)
        .sum();
    if is_redundant(params, cut) {
        return Ok(FacetCertificate {
            tight_count: 0,
            affine_rank: 0,
            required,
            frozen_vars,
            skipped: true,
            pass: true,
        });
    }
    let verts = enumerate_vertices(params)?;
    let scale = 1.0 + cut.rhs.abs();
    let tight: Vec<Vec<f64>> = verts
        .iter()
        .filter(|v| cut.violation(&v.p_ch, &v.p_dis, None).abs() <= TIGHT_TOL * scale)
        .map(|v| v.p_ch.iter().chain(&v.p_dis).copied().collect())
        .collect();
    let tight_count = tight.len();
    let affine_rank = affine_rank(&tight);
    Ok(FacetCertificate {
        tight_count,
        affine_rank,
        required,
        frozen_vars,
        skipped: false,
        pass: tight_count >= required,
    })
}

/// Affine rank of a point set (dimension of its affine hull).
pub fn affine_rank(points: &[Vec<f64>]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let dim = points[0].len();
    let diffs = DMatrix::from_fn(points.len() - 1, dim, |i, j| points[i + 1][j] - points[0][j]);
    let sv = diffs.svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-9 * smax).count()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceReport {
    /// Largest `max lhs - rhs` of a baseline cut over the window-cut polytope.
    pub max_violation: f64,
    pub worst_cut: Option<usize>,
    pub cuts_checked: usize,
    pub pass: bool,
}

/// Maximises each baseline cut over the redundancy-filtered window-cut
/// polytope; the baseline is implied when no maximum exceeds its rhs.
pub fn pozo_dominance(params: &BatteryParams) -> Result<DominanceReport> {
    params.validate()?;
    let n = params.horizon;
    let window = redundancy_filter(gen_window_cuts(params), params);
    let mut lp = MathProgram::new(2 * n, Sense::Maximize);
    lp.rows = window.iter().map(|c| c.to_row(0, n, None)).collect();
    let pozo = gen_pozo_cuts(params);
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst_cut = None;
    for (i, cut) in pozo.iter().enumerate() {
        lp.linear = vec![0.0; 2 * n];
        for (j, a) in cut.to_row(0, n, None).coeffs {
            lp.linear[j] += a;
        }
        let sol = solve_linear(&lp);
        if sol.status != Status::Optimal {
            return Err(Error::Solver(format!("dominance LP returned {:?}", sol.status)));
        }
        let viol = sol.objective - cut.rhs;
        if viol > max_violation {
            max_violation = viol;
            worst_cut = Some(i);
        }
    }
    Ok(DominanceReport {
        max_violation,
        worst_cut,
        cuts_checked: pozo.len(),
        pass: max_violation <= DOMINANCE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_simplex() {
        let pts = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0]];
        assert_eq!(affine_rank(&pts), 2);
        assert_eq!(affine_rank(&pts[..1]), 0);
    }
}
