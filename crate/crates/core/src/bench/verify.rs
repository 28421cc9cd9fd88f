//! Property and certificate checks for one battery, run by `bench verify`.

use crate::battery::{soc_envelope, BatteryParams};
use crate::cuts::certify::{facet_certificate, pozo_dominance, validate_cuts};
use crate::cuts::redundancy::{is_redundant, redundancy_filter};
use crate::cuts::{gen_anchor_cuts, gen_pozo_cuts, gen_u_cuts, gen_window_cuts, LinearCut};
use crate::error::Result;
use crate::soc::{cylinder_value, hull_decompose, soc_cut};
use crate::solve::barrier::{solve_conic, ConicModel};
use crate::solve::model::{build_preset, solve, Instance, Objective, Preset, RelaxationModel};
use crate::solve::vertices::MAX_VERTEX_HORIZON;
use crate::solve::{Sense, Status};
use crate::submodular::{check_submodularity, eval_f_closed, eval_f_lp, eval_g_closed, eval_g_lp, PeriodSet, WindowSpec};

/// Longest window used for the set-function checks.
const WINDOW: usize = 5;
/// Longest horizon for the branch-and-bound and interior-point checks.
const SOLVE_HORIZON: usize = 24;
const CONIC_HORIZON: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        Check { name, pass, detail }
    }
}

/// Runs every check on `params` (its `horizon` sets the problem size).
/// Vertex-based checks use the first `min(T, 4)` periods.
pub fn run_verify(params: &BatteryParams) -> Result<Vec<Check>> {
    params.validate()?;
    let n = params.horizon;
    let short = BatteryParams { horizon: n.min(MAX_VERTEX_HORIZON), ..params.clone() };
    let env = soc_envelope(params);
    let mut checks = Vec::new();

    // set functions on every window start, from both envelope ends
    let mut margin = f64::INFINITY;
    let mut lp_gap: f64 = 0.0;
    let mut windows = 0;
    for t in 1..=n {
        let len = WINDOW.min(n - t + 1);
        for soc in [env.soc_lo[t - 1], env.soc_hi[t - 1]] {
            let win = WindowSpec::new(params, t, len, soc)?;
            margin = margin.min(check_submodularity(&win)?.min_margin());
            for mask in 0..1u64 << len {
                let omega = PeriodSet(mask);
                lp_gap = lp_gap.max((eval_f_closed(&win, omega) - eval_f_lp(&win, omega)?).abs());
                lp_gap = lp_gap.max((eval_g_closed(&win, omega) - eval_g_lp(&win, omega)?).abs());
            }
            windows += 1;
        }
    }
    checks.push(Check::new(
        "submodularity",
        margin >= -1e-9,
        format!("{windows} windows, smallest gain difference {margin:.3e}"),
    ));
    checks.push(Check::new("closed_form_vs_lp", lp_gap <= 1e-9, format!("largest difference {lp_gap:.3e}")));

    let mut cuts: Vec<LinearCut> = gen_window_cuts(&short);
    cuts.extend(gen_u_cuts(&short));
    cuts.extend(gen_pozo_cuts(&short));
    for t in 1..short.horizon {
        for tau_bar in 1..=short.horizon - t {
            for tau_star in 0..=tau_bar {
                cuts.extend(gen_anchor_cuts(&short, t, tau_bar, tau_star)?);
            }
        }
    }
    let validity = validate_cuts(&cuts, &short)?;
    checks.push(Check::new(
        "cut_validity",
        validity.pass,
        format!(
            "{} cuts on {} vertices (T={}), worst excess {:.3e}",
            cuts.len(),
            validity.vertices_checked,
            short.horizon,
            validity.max_violation
        ),
    ));

    let (mut literal, mut adjusted, mut total) = (0, 0, 0);
    for cut in gen_window_cuts(&short).iter().filter(|c| !is_redundant(&short, c)) {
        let cert = facet_certificate(cut, &short)?;
        total += 1;
        literal += usize::from(cert.pass);
        adjusted += usize::from(cert.pass_adjusted());
    }
    checks.push(Check::new(
        "facet_count",
        adjusted == total,
        format!("{literal}/{total} tight at 2(tau_bar+1) vertices, {adjusted}/{total} counting frozen variables"),
    ));

    let dom = pozo_dominance(params)?;
    checks.push(Check::new(
        "pozo_dominance",
        dom.pass,
        format!("{} baseline cuts, largest LP excess {:.3e}", dom.cuts_checked, dom.max_violation),
    ));

    let prices = price_profile(n);
    let mut lp_diff: f64 = 0.0;
    for signs in [1.0, -1.0] {
        let p: Vec<f64> = prices.iter().map(|v| v * signs).collect();
        let mut full =
            RelaxationModel::new(params, false, Objective::Linear { prices: p.clone(), sense: Sense::Maximize });
        full.linear_cuts = gen_window_cuts(params);
        let mut filtered = full.clone();
        filtered.linear_cuts = redundancy_filter(gen_window_cuts(params), params);
        lp_diff = lp_diff.max((solve(&full)?.objective - solve(&filtered)?.objective).abs());
    }
    checks.push(Check::new(
        "redundancy_filter",
        lp_diff <= 1e-7,
        format!("LP values with and without dropped cuts differ by {lp_diff:.3e}"),
    ));

    checks.push(soc_algebra());

    if n <= SOLVE_HORIZON {
        let inst = Instance::Prices(prices);
        let mut obj = Vec::new();
        for preset in [Preset::HCHLP, Preset::TLP, Preset::TLPu, Preset::MILP] {
            let rep = solve(&build_preset(params, preset, &inst)?)?;
            if rep.status != Status::Optimal {
                obj.clear();
                break;
            }
            obj.push(rep.min_form_objective());
        }
        let ordered = obj.len() == 4 && obj.windows(2).all(|w| w[0] <= w[1] + 1e-6);
        checks.push(Check::new("relaxation_sandwich", ordered, format!("min-form values {obj:?}")));
    }

    if n <= CONIC_HORIZON {
        let setpoints: Vec<f64> = (0..n).map(|t| params.p_ch_max.max(params.p_dis_max) * ((t as f64) * 1.7).sin()).collect();
        let qp = solve(&build_preset(params, Preset::TLPSOC, &Instance::Setpoints(setpoints.clone()))?)?;
        let conic = solve_conic(&ConicModel::tracking(params, &setpoints)?)?;
        let diff = (qp.objective - conic.objective).abs();
        checks.push(Check::new(
            "cone_vs_cylinder_qp",
            diff <= 1e-7,
            format!("substituted QP {:.9}, explicit cone {:.9}", qp.objective, conic.objective),
        ));
    }
    Ok(checks)
}

/// Evening peak with a negative midday dip.
fn price_profile(n: usize) -> Vec<f64> {
    (0..n)
        .map(|t| {
            let h = (t % 24) as f64;
            40.0 + 30.0 * ((h - 12.0) / 24.0 * std::f64::consts::TAU).cos() - if (10.0..14.0).contains(&h) { 60.0 } else { 0.0 }
        })
        .collect()
}

fn soc_algebra() -> Check {
    let grid = [0.0, 0.25, 1.0, 2.5, 7.0];
    let setpoints = [-5.0, -1.0, 0.0, 0.5, 3.0];
    let (mut identity, mut norm, mut hull): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut hull_failures = 0;
    for &pd in &grid {
        for &pc in &grid {
            for &ps in &setpoints {
                let q = cylinder_value(pd, pc, ps);
                let direct = (pd - pc - ps).powi(2) + 4.0 * pd * pc;
                identity = identity.max((q - direct).abs() / (1.0 + direct));
                let cut = soc_cut(ps);
                for dz in [-0.5, 0.0, 0.5] {
                    let (u, v) = cut.norm_form(pd, pc, q + dz);
                    // u^2 - |v|^2 = z - q
                    let diff = u * u - v.iter().map(|a| a * a).sum::<f64>();
                    norm = norm.max((diff - dz).abs() / (1.0 + u.abs()).powi(2));
                    if dz != 0.0 && cut.satisfied(pd, pc, q + dz) != (dz > 0.0) {
                        norm = f64::INFINITY;
                    }
                }
                match hull_decompose(q + 0.1, pd, pc, ps) {
                    Ok(h) => {
                        let [z, d, c] = h.combination();
                        hull = hull.max((d - pd).abs()).max((c - pc).abs()).max((z - (q + 0.1)).max(0.0));
                    }
                    Err(_) => hull_failures += 1,
                }
            }
        }
    }
    Check::new(
        "soc_algebra",
        identity <= 1e-12 && norm <= 1e-10 && hull <= 1e-10 && hull_failures == 0,
        format!("identity {identity:.1e}, norm form {norm:.1e}, hull {hull:.1e}"),
    )
}
