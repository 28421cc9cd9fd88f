//! The cylinder cut for setpoint tracking: norm form, hull certificate, and
//! the coefficient export.
//!
//! cargo run --example soc_hull

use storage_cuts::soc::{cylinder_value, hull_decompose, soc_cut, write_soc_csv};

fn main() -> storage_cuts::Result<()> {
    let ps = 1.0;
    let cut = soc_cut(ps);
    println!("b = {:?}, c = {}", cut.vec_b.as_slice(), cut.scal_c);

    for (pd, pc) in [(1.0, 1.0), (2.0, 0.0), (0.0, 0.5), (0.3, 0.2)] {
        let q = cylinder_value(pd, pc, ps);
        let tracking = (pd - pc - ps) * (pd - pc - ps);
        let (u, v) = cut.norm_form(pd, pc, q);
        let h = hull_decompose(q, pd, pc, ps)?;
        println!(
            "pd={pd} pc={pc}: q={q:.3} (tracking error {tracking:.3}), u={u:.3}, |v|={:.3}, lam={:.3}, combo={:?}",
            v.iter().map(|a| a * a).sum::<f64>().sqrt(),
            h.lam,
            h.combination()
        );
    }

    println!("\nper-period coefficients:");
    write_soc_csv(&[1.0, -0.5, 2.0], std::io::stdout())?;
    Ok(())
}
