//! Window and mode cuts for a small battery, the redundancy filter, and the
//! cut-pool CSV format.
//!
//! cargo run --example window_cuts

use storage_cuts::cuts::certify::validate_cuts;
use storage_cuts::cuts::export::write_cuts_csv;
use storage_cuts::cuts::redundancy::redundancy_filter;
use storage_cuts::cuts::{gen_u_cuts, gen_window_cuts, LinearCut};
use storage_cuts::BatteryParams;

fn show(cut: &LinearCut) -> String {
    let terms: Vec<String> = cut.terms().map(|(k, t, a)| format!("{a:+.3} {}_{t}", k.as_str())).collect();
    format!("{:<16} {} <= {:.3}", cut.family.as_str(), terms.join(" "), cut.rhs)
}

fn main() -> storage_cuts::Result<()> {
    let params = BatteryParams {
        p_dis_max: 10.0,
        p_ch_max: 10.0,
        soc_min: 0.0,
        soc_max: 5.0,
        eta_c: 1.0,
        eta_d: 1.0,
        delta: 1.0,
        soc_init: 0.0,
        horizon: 3,
    };
    let all = gen_window_cuts(&params);
    let kept = redundancy_filter(all.clone(), &params);
    println!("{} window cuts, {} after dropping implied ones", all.len(), kept.len());
    for cut in &kept {
        println!("  {}", show(cut));
    }
    let u = gen_u_cuts(&params);
    println!("{} mode cuts", u.len());
    for cut in u.iter().take(4) {
        println!("  {}", show(cut));
    }

    let mut pool = kept;
    pool.extend(u);
    let rep = validate_cuts(&pool, &params)?;
    println!(
        "checked against {} vertices: worst excess {:.2e}, valid = {}",
        rep.vertices_checked, rep.max_violation, rep.pass
    );

    println!("\nCSV export:");
    write_cuts_csv(&pool[..2], std::io::stdout())?;
    Ok(())
}
