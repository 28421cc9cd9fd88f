use proptest::prelude::*;
use storage_cuts::battery::{membership, simulate_soc};
use storage_cuts::bench::{parse_report, render_csv, BenchRow};
use storage_cuts::cuts::coefficients::rho_bar;
use storage_cuts::cuts::export::{read_cuts_csv, write_cuts_csv};
use storage_cuts::cuts::{gen_anchor_cuts, gen_pozo_cuts, gen_u_cuts, gen_window_cuts};
use storage_cuts::soc::{cylinder_value, hull_decompose};
use storage_cuts::submodular::PeriodSet;
use storage_cuts::{BatteryParams, FeasibleSet, LinearCut};

fn battery(horizon: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = BatteryParams> {
    let eta = prop_oneof![Just(1.0), 0.8..1.0f64];
    (
        0.3..5.0f64,
        0.3..5.0f64,
        prop_oneof![Just(0.0), 0.0..1.0f64],
        0.5..6.0f64,
        eta.clone(),
        eta,
        prop_oneof![Just(1.0), Just(0.5)],
        prop_oneof![Just(0.0), Just(1.0), 0.0..1.0f64],
        horizon,
    )
        .prop_map(|(d, c, lo, cap, ec, ed, delta, frac, n)| BatteryParams {
            p_dis_max: d,
            p_ch_max: c,
            soc_min: lo,
            soc_max: lo + cap,
            eta_c: ec,
            eta_d: ed,
            delta,
            soc_init: lo + frac * cap,
            horizon: n,
        })
}

/// Per period: mode (0 idle, 1 charge, 2 discharge), share of the available
/// room to use, and the mode value reported on idle periods.
fn moves(n: usize) -> impl Strategy<Value = Vec<(u8, f64, bool)>> {
    proptest::collection::vec((0u8..3, prop_oneof![Just(1.0), Just(0.0), 0.0..1.0f64], any::<bool>()), n)
}

struct Point {
    p_ch: Vec<f64>,
    p_dis: Vec<f64>,
    u: Vec<f64>,
}

fn greedy(p: &BatteryParams, plan: &[(u8, f64, bool)]) -> Point {
    let mut s = p.soc_init;
    let mut pt = Point { p_ch: vec![], p_dis: vec![], u: vec![] };
    for &(mode, phi, idle_u) in plan {
        let (mut c, mut d) = (0.0, 0.0);
        match mode {
            1 => c = phi * p.p_ch_max.min((p.soc_max - s) / (p.delta * p.eta_c)).max(0.0),
            2 => d = phi * p.p_dis_max.min(p.eta_d * (s - p.soc_min) / p.delta).max(0.0),
            _ => {}
        }
        s += p.delta * (p.eta_c * c - d / p.eta_d);
        pt.p_ch.push(c);
        pt.p_dis.push(d);
        pt.u.push(match mode {
            1 => 1.0,
            2 => 0.0,
            _ => f64::from(u8::from(idle_u)),
        });
    }
    pt
}

fn scale(cut: &LinearCut) -> f64 {
    1.0 + cut.rhs.abs() + cut.terms().map(|(_, _, a)| a.abs()).sum::<f64>()
}

fn all_cuts(p: &BatteryParams) -> Vec<LinearCut> {
    let mut cuts = gen_window_cuts(p);
    cuts.extend(gen_u_cuts(p));
    cuts.extend(gen_pozo_cuts(p));
    for t in 1..p.horizon {
        for tau_bar in 1..=p.horizon - t {
            for tau_star in 0..=tau_bar {
                cuts.extend(gen_anchor_cuts(p, t, tau_bar, tau_star).unwrap());
            }
        }
    }
    cuts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn feasible_points_satisfy_every_cut((p, plan) in battery(1..=6).prop_flat_map(|p| { let n = p.horizon; (Just(p), moves(n)) })) {
        let pt = greedy(&p, &plan);
        let traj = simulate_soc(&p, &pt.p_dis, &pt.p_ch).unwrap().with_mode(pt.u.clone());
        prop_assert!(membership(&p, &traj, FeasibleSet::P).unwrap().member);
        prop_assert!(membership(&p, &traj, FeasibleSet::P01).unwrap().member);
        for cut in all_cuts(&p) {
            let v = cut.violation(&pt.p_ch, &pt.p_dis, Some(&pt.u));
            prop_assert!(v <= 1e-9 * scale(&cut), "{:?} {:?} violated by {v:e}", cut.family, cut.meta);
        }
    }

    #[test]
    fn cylinder_identity_and_hull(pd in 0.0..10.0f64, pc in 0.0..10.0f64, ps in -5.0..5.0f64, extra in prop_oneof![Just(0.0), 0.0..20.0f64]) {
        let q = cylinder_value(pd, pc, ps);
        let direct = (pd - pc - ps).powi(2) + 4.0 * pd * pc;
        prop_assert!((q - direct).abs() <= 1e-12 * (1.0 + direct));
        let z = q + extra;
        let h = hull_decompose(z, pd, pc, ps).unwrap();
        let [cz, cd, cc] = h.combination();
        prop_assert!((cd - pd).abs() <= 1e-12 * (1.0 + pd));
        prop_assert!((cc - pc).abs() <= 1e-12 * (1.0 + pc));
        prop_assert!(cz <= z + 1e-10 * (1.0 + z));
    }

    #[test]
    fn complement_is_an_involution(mask in any::<u64>(), len in 0usize..=64) {
        let full = PeriodSet::full(len);
        let set = PeriodSet(if len == 64 { mask } else { mask & ((1u64 << len) - 1) });
        let comp = set.complement(len);
        prop_assert_eq!(comp.complement(len), set);
        prop_assert_eq!(comp.union(set), full);
        prop_assert_eq!(comp.len() + set.len(), len);
        prop_assert!(comp.is_subset_of(full));
    }

    #[test]
    fn cut_csv_round_trip(p in battery(1..=5)) {
        let cuts = all_cuts(&p);
        let mut buf = Vec::new();
        write_cuts_csv(&cuts, &mut buf).unwrap();
        let back = read_cuts_csv(buf.as_slice()).unwrap();
        let nonempty: Vec<_> = cuts.into_iter().filter(|c| c.num_terms() > 0).collect();
        prop_assert_eq!(back, nonempty);
    }

    #[test]
    fn report_csv_round_trip(
        rows in proptest::collection::vec(
            ("[A-Za-z]{1,8}", 0.0..100.0f64, 0.0..1e3f64, proptest::option::of(-1e3..1e3f64), proptest::option::of(-1e6..1e6f64), 0usize..1000, 0usize..1000),
            1..6,
        )
    ) {
        let rows: Vec<BenchRow> = rows
            .into_iter()
            .map(|(formulation, pct, prod, dt, obj, instances, failures)| BenchRow {
                formulation,
                pct_hours_violated: pct,
                mean_comp_product: prod,
                delta_time_pct: dt,
                mean_obj: obj,
                instances,
                failures,
            })
            .collect();
        prop_assert_eq!(parse_report(&render_csv(&rows).unwrap()).unwrap(), rows);
    }

    #[test]
    fn rho_bar_cases(rho in -10.0..10.0f64, rate in 0.0..5.0f64, neg in -5.0..0.0f64) {
        let tol = 1e-9;
        let v = rho_bar(rho, rate, neg, tol);
        if rho < -tol {
            prop_assert_eq!(v, neg);
        } else if rho <= tol || rate <= tol {
            prop_assert_eq!(v, 0.0);
        } else {
            prop_assert!((v * rate - rho).abs() <= 1e-12 * rho);
        }
    }
}
