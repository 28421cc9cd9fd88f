//! Single-anchor cuts on a four-period battery, and a point of the window
//! relaxation that they separate.
//!
//! cargo run --example anchor_cut

use storage_cuts::cuts::certify::validate_cuts;
use storage_cuts::cuts::redundancy::redundancy_filter;
use storage_cuts::cuts::{gen_anchor_cuts, gen_window_cuts};
use storage_cuts::solve::{solve_linear, MathProgram, Sense};
use storage_cuts::BatteryParams;

fn main() -> storage_cuts::Result<()> {
    let params = BatteryParams {
        p_dis_max: 0.5,
        p_ch_max: 1.0,
        soc_min: 0.0,
        soc_max: 1.0,
        eta_c: 1.0,
        eta_d: 1.0,
        delta: 1.0,
        soc_init: 0.5,
        horizon: 4,
    };
    let n = params.horizon;
    let anchors = gen_anchor_cuts(&params, 2, 2, 1)?;
    for cut in &anchors {
        let terms: Vec<String> = cut.terms().map(|(k, t, a)| format!("{a:+.3} {}_{t}", k.as_str())).collect();
        println!("{:<18} {} <= {:.3}", cut.family.as_str(), terms.join(" "), cut.rhs);
    }
    let rep = validate_cuts(&anchors, &params)?;
    println!("valid on all {} vertices: {}", rep.vertices_checked, rep.pass);

    // how far the window relaxation alone goes on the first anchor's lhs
    let mut lp = MathProgram::new(2 * n, Sense::Maximize);
    lp.rows = redundancy_filter(gen_window_cuts(&params), &params).iter().map(|c| c.to_row(0, n, None)).collect();
    for (j, a) in anchors[0].to_row(0, n, None).coeffs {
        lp.linear[j] += a;
    }
    let sol = solve_linear(&lp);
    println!(
        "window polytope reaches {:.3} on the anchor lhs (rhs {:.3}) at p_ch = {:?}, p_dis = {:?}",
        sol.objective,
        anchors[0].rhs,
        &sol.x[..n],
        &sol.x[n..]
    );
    Ok(())
}
