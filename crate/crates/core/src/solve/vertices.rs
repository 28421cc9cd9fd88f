//! Brute-force vertex enumeration of the fixed-mode polytopes of the
//! mixed-integer battery set. Exponential; intended for `T <= 4`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::battery::BatteryParams;
use crate::error::{Error, Result};

pub const MAX_VERTEX_HORIZON: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub p_ch: Vec<f64>,
    pub p_dis: Vec<f64>,
}

/// Vertices of one fixed-mode polytope; `mode[t] = 1.0` means charging.
#[derive(Clone, Debug)]
pub struct PatternVertices {
    pub mode: Vec<f64>,
    pub vertices: Vec<Vertex>,
}

/// Vertices of every fixed-mode polytope, one entry per mode pattern.
pub fn enumerate_vertices_by_pattern(params: &BatteryParams) -> Result<Vec<PatternVertices>> {
    params.validate()?;
    let n = params.horizon;
    if n > MAX_VERTEX_HORIZON {
        return Err(Error::HorizonTooLarge { horizon: n, max: MAX_VERTEX_HORIZON });
    }
    (0..1u32 << n).map(|mask| pattern_vertices(params, mask)).collect()
}

/// Distinct vertices of the complementarity set (union over mode patterns).
pub fn enumerate_vertices(params: &BatteryParams) -> Result<Vec<Vertex>> {
    let mut seen = BTreeMap::new();
    for pat in enumerate_vertices_by_pattern(params)? {
        for v in pat.vertices {
            seen.entry(grid_key(&v)).or_insert(v);
        }
    }
    Ok(seen.into_values().collect())
}

fn grid_key(v: &Vertex) -> Vec<i64> {
    v.p_ch.iter().chain(&v.p_dis).map(|x| (x * 1e9).round() as i64).collect()
}

fn pattern_vertices(params: &BatteryParams, mask: u32) -> Result<PatternVertices> {
    let n = params.horizon;
    let charging: Vec<bool> = (0..n).map(|t| mask >> t & 1 == 1).collect();
    // each period has one free variable: p_ch if charging else p_dis
    let step: Vec<f64> = charging
        .iter()
        .map(|&c| if c { params.delta * params.eta_c } else { -params.delta / params.eta_d })
        .collect();
    let rating: Vec<f64> =
        charging.iter().map(|&c| if c { params.p_ch_max } else { params.p_dis_max }).collect();

    // rows g . x <= h
    let mut g: Vec<Vec<f64>> = Vec::with_capacity(4 * n);
    let mut h: Vec<f64> = Vec::with_capacity(4 * n);
    for t in 0..n {
        let mut lo = vec![0.0; n];
        lo[t] = -1.0;
        g.push(lo);
        h.push(0.0);
        let mut hi = vec![0.0; n];
        hi[t] = 1.0;
        g.push(hi);
        h.push(rating[t]);
    }
    for t in 0..n {
        let mut row = vec![0.0; n];
        row[..=t].copy_from_slice(&step[..=t]);
        g.push(row.clone());
        h.push(params.soc_max - params.soc_init);
        g.push(row.iter().map(|a| -a).collect());
        h.push(params.soc_init - params.soc_min);
    }

    let scale = 1.0 + params.p_ch_max.max(params.p_dis_max).max(params.soc_max.abs());
    let feas_tol = 1e-9 * scale;
    let mut found = BTreeMap::new();
    for subset in combinations(g.len(), n) {
        let a = DMatrix::from_fn(n, n, |i, j| g[subset[i]][j]);
        let b = DVector::from_iterator(n, subset.iter().map(|&i| h[i]));
        let sv = a.clone().svd(false, false).singular_values;
        let (smin, smax) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        if smax == 0.0 || smin < 1e-10 * smax {
            continue;
        }
        let Some(x) = a.lu().solve(&b) else { continue };
        let feasible = g
            .iter()
            .zip(&h)
            .all(|(row, &rhs)| row.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= rhs + feas_tol);
        if !feasible {
            continue;
        }
        let mut v = Vertex { p_ch: vec![0.0; n], p_dis: vec![0.0; n] };
        for t in 0..n {
            let val = if x[t].abs() < feas_tol { 0.0 } else { x[t] };
            if charging[t] {
                v.p_ch[t] = val;
            } else {
                v.p_dis[t] = val;
            }
        }
        found.entry(grid_key(&v)).or_insert(v);
    }
    Ok(PatternVertices {
        mode: charging.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect(),
        vertices: found.into_values().collect(),
    })
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::tests::b1;

    #[test]
    fn combination_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(4, 4).len(), 1);
        assert_eq!(combinations(16, 4).len(), 1820);
    }

    #[test]
    fn single_period_box() {
        let p = BatteryParams { horizon: 1, soc_init: 2.0, ..b1() };
        let verts = enumerate_vertices(&p).unwrap();
        let mut pts: Vec<(f64, f64)> = verts.iter().map(|v| (v.p_ch[0], v.p_dis[0])).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(pts, vec![(0.0, 0.0), (0.0, 2.0), (3.0, 0.0)]);
    }

    #[test]
    fn horizon_guard() {
        let p = BatteryParams { horizon: 5, ..b1() };
        assert!(matches!(enumerate_vertices(&p), Err(Error::HorizonTooLarge { .. })));
    }

    #[test]
    fn b1_patterns() {
        let pats = enumerate_vertices_by_pattern(&b1()).unwrap();
        assert_eq!(pats.len(), 8);
        for pat in &pats {
            for v in &pat.vertices {
                for t in 0..3 {
                    assert!(v.p_ch[t] * v.p_dis[t] == 0.0);
                    assert!(v.p_ch[t] <= 10.0 * pat.mode[t]);
                }
            }
        }
    }
}
