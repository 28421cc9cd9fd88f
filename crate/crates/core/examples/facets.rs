//! Tight-vertex counts for the non-redundant window cuts of a three-period
//! battery.
//!
//! cargo run --example facets

use storage_cuts::cuts::certify::facet_certificate;
use storage_cuts::cuts::gen_window_cuts;
use storage_cuts::cuts::redundancy::is_redundant;
use storage_cuts::solve::vertices::enumerate_vertices;
use storage_cuts::BatteryParams;

fn main() -> storage_cuts::Result<()> {
    let params = BatteryParams {
        p_dis_max: 2.0,
        p_ch_max: 1.5,
        soc_min: 0.0,
        soc_max: 4.0,
        eta_c: 0.9,
        eta_d: 0.9,
        delta: 1.0,
        soc_init: 1.0,
        horizon: 3,
    };
    println!("{} vertices in the complementarity set", enumerate_vertices(&params)?.len());
    println!("family            t  tau_bar  tight  required  affine rank  pass");
    for cut in gen_window_cuts(&params) {
        if is_redundant(&params, &cut) {
            continue;
        }
        let cert = facet_certificate(&cut, &params)?;
        println!(
            "{:<16} {:2} {:8} {:6} {:9} {:12}  {}",
            cut.family.as_str(),
            cut.meta.t,
            cut.meta.tau_bar,
            cert.tight_count,
            cert.required,
            cert.affine_rank,
            cert.pass
        );
    }
    Ok(())
}
