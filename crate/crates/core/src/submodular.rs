//! Set functions over a window of consecutive periods.
//!
//! `f(Ω)` is the largest cumulative charge over the window when charging is
//! only allowed on `Ω` and discharging only on the complement. `g(Ω)` is the
//! mirror: the largest cumulative discharge when `Ω` is the set of periods on
//! which discharging is blocked (and charging allowed). Both are evaluated in
//! closed form by a greedy pass; an LP over the same window is kept as an
//! independent oracle.

use crate::battery::{effective_rates, BatteryParams};
use crate::error::{Error, Result};
use crate::solve::program::{Cmp, MathProgram, Row, Sense, Status};
use crate::solve::simplex::solve_linear;

/// Largest window accepted by [`check_submodularity`].
pub const MAX_CERTIFICATE_WINDOW: usize = 6;
/// Pass threshold for the submodularity margin.
pub const SUBMODULAR_TOL: f64 = 1e-9;

/// Subset of window offsets `0..len`, as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodSet(pub u64);

impl PeriodSet {
    pub const EMPTY: PeriodSet = PeriodSet(0);

    pub fn full(len: usize) -> Self {
        if len >= 64 {
            PeriodSet(u64::MAX)
        } else {
            PeriodSet((1u64 << len) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        PeriodSet(1 << i)
    }

    pub fn from_slice(items: &[usize]) -> Self {
        items.iter().fold(PeriodSet::EMPTY, |s, &i| s.with(i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        PeriodSet(self.0 | 1 << i)
    }

    pub fn union(self, other: Self) -> Self {
        PeriodSet(self.0 | other.0)
    }

    pub fn complement(self, len: usize) -> Self {
        PeriodSet(!self.0 & PeriodSet::full(len).0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

/// A window of `length` periods starting at period `start` (1-based), with
/// the SoC at the end of period `start - 1` fixed to `soc_start`.
#[derive(Clone, Copy, Debug)]
pub struct WindowSpec<'a> {
    pub params: &'a BatteryParams,
    pub start: usize,
    pub length: usize,
    pub soc_start: f64,
}

impl<'a> WindowSpec<'a> {
    pub fn new(params: &'a BatteryParams, start: usize, length: usize, soc_start: f64) -> Result<Self> {
        let end = start + length.max(1) - 1;
        if start == 0 || length == 0 || end > params.horizon {
            return Err(Error::WindowOutOfRange { start, end, horizon: params.horizon });
        }
        if length > 64 {
            return Err(Error::WindowTooLarge { size: length, max: 64 });
        }
        let tol = 1e-9 * (1.0 + params.soc_max.abs());
        if soc_start < params.soc_min - tol || soc_start > params.soc_max + tol {
            return Err(Error::InvalidParams(format!("window start SoC {soc_start} out of bounds")));
        }
        let soc_start = soc_start.clamp(params.soc_min, params.soc_max);
        Ok(WindowSpec { params, start, length, soc_start })
    }

    pub fn full(&self) -> PeriodSet {
        PeriodSet::full(self.length)
    }

    fn check(&self, set: PeriodSet) {
        debug_assert!(set.is_subset_of(self.full()), "subset outside window");
    }
}

/// Closed-form `f(Ω)`: greedy charging on `Ω`, full discharge elsewhere.
pub fn eval_f_closed(win: &WindowSpec, omega: PeriodSet) -> f64 {
    win.check(omega);
    let p = win.params;
    let (p_dis_eff, p_ch_eff) = effective_rates(p);
    let mut soc = win.soc_start;
    let mut total = 0.0;
    for tau in 0..win.length {
        if omega.contains(tau) {
            let x = ((p.soc_max - soc) / (p.delta * p.eta_c)).min(p_ch_eff).max(0.0);
            total += x;
            soc = (soc + p.delta * p.eta_c * x).min(p.soc_max);
        } else {
            soc = (soc - p.delta * p_dis_eff / p.eta_d).max(p.soc_min);
        }
    }
    total
}

/// Closed-form `g(Ω)`: greedy discharging outside `Ω`, full charge on `Ω`.
pub fn eval_g_closed(win: &WindowSpec, omega: PeriodSet) -> f64 {
    win.check(omega);
    let p = win.params;
    let (p_dis_eff, p_ch_eff) = effective_rates(p);
    let mut soc = win.soc_start;
    let mut total = 0.0;
    for tau in 0..win.length {
        if omega.contains(tau) {
            soc = (soc + p.delta * p.eta_c * p_ch_eff).min(p.soc_max);
        } else {
            let x = ((soc - p.soc_min) * p.eta_d / p.delta).min(p_dis_eff).max(0.0);
            total += x;
            soc = (soc - p.delta * x / p.eta_d).max(p.soc_min);
        }
    }
    total
}

/// Window LP with charging allowed on `charge_set`, discharging on its
/// complement; maximises cumulative charge (`charge_objective`) or discharge.
fn window_lp(win: &WindowSpec, charge_set: PeriodSet, charge_objective: bool) -> Result<f64> {
    let p = win.params;
    let (p_dis_eff, p_ch_eff) = effective_rates(p);
    let n = win.length;
    // variables: p_ch[0..n], p_dis[n..2n]
    let mut lp = MathProgram::new(2 * n, Sense::Maximize);
    for tau in 0..n {
        let charging = charge_set.contains(tau);
        lp.upper[tau] = if charging { p_ch_eff } else { 0.0 };
        lp.upper[n + tau] = if charging { 0.0 } else { p_dis_eff };
        if charge_objective {
            lp.linear[tau] = 1.0;
        } else {
            lp.linear[n + tau] = 1.0;
        }
    }
    for tau in 0..n {
        let mut coeffs = Vec::with_capacity(2 * (tau + 1));
        for j in 0..=tau {
            coeffs.push((j, p.delta * p.eta_c));
            coeffs.push((n + j, -p.delta / p.eta_d));
        }
        lp.rows.push(Row::new(coeffs.clone(), Cmp::Le, p.soc_max - win.soc_start));
        lp.rows.push(Row::new(coeffs, Cmp::Ge, p.soc_min - win.soc_start));
    }
    let sol = solve_linear(&lp);
    match sol.status {
        Status::Optimal => Ok(sol.objective),
        other => Err(Error::Solver(format!("window LP returned {other:?}"))),
    }
}

/// LP oracle for `f(Ω)`.
pub fn eval_f_lp(win: &WindowSpec, omega: PeriodSet) -> Result<f64> {
    win.check(omega);
    window_lp(win, omega, true)
}

/// LP oracle for `g(Ω)`.
pub fn eval_g_lp(win: &WindowSpec, omega: PeriodSet) -> Result<f64> {
    win.check(omega);
    window_lp(win, omega, false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetFn {
    F,
    G,
    /// Complement of `f`: `f(T \ A)`.
    FBar,
    /// Complement of `g`.
    GBar,
}

impl SetFn {
    pub const ALL: [SetFn; 4] = [SetFn::F, SetFn::G, SetFn::FBar, SetFn::GBar];

    pub fn eval(self, win: &WindowSpec, set: PeriodSet) -> f64 {
        match self {
            SetFn::F => eval_f_closed(win, set),
            SetFn::G => eval_g_closed(win, set),
            SetFn::FBar => eval_f_closed(win, set.complement(win.length)),
            SetFn::GBar => eval_g_closed(win, set.complement(win.length)),
        }
    }
}

/// Gain of adding `element` to `context`.
pub fn gain(func: SetFn, win: &WindowSpec, element: usize, context: PeriodSet) -> Result<f64> {
    if context.contains(element) {
        return Err(Error::ElementInContext(element));
    }
    if element >= win.length {
        return Err(Error::WindowOutOfRange {
            start: win.start,
            end: win.start + element,
            horizon: win.start + win.length - 1,
        });
    }
    Ok(func.eval(win, context.with(element)) - func.eval(win, context))
}

/// Minimum of `F(j|A) - F(j|B)` over all `A ⊆ B`, `j ∉ B`, per function.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub window_len: usize,
    pub margin_f: f64,
    pub margin_g: f64,
    pub margin_f_bar: f64,
    pub margin_g_bar: f64,
    /// Number of `(A, B, j)` triples checked per function.
    pub triples: usize,
    pub pass: bool,
}

impl CertificateReport {
    pub fn margin(&self, func: SetFn) -> f64 {
        match func {
            SetFn::F => self.margin_f,
            SetFn::G => self.margin_g,
            SetFn::FBar => self.margin_f_bar,
            SetFn::GBar => self.margin_g_bar,
        }
    }

    pub fn min_margin(&self) -> f64 {
        self.margin_f.min(self.margin_g).min(self.margin_f_bar).min(self.margin_g_bar)
    }
}

fn min_margin(values: &[f64], len: usize) -> (f64, usize) {
    let full = PeriodSet::full(len).0;
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for b in 0..=full {
        // submasks of b, including the empty set
        let mut a = b;
        loop {
            for j in 0..len {
                if b >> j & 1 == 1 {
                    continue;
                }
                let gain_a = values[(a | 1 << j) as usize] - values[a as usize];
                let gain_b = values[(b | 1 << j) as usize] - values[b as usize];
                worst = worst.min(gain_a - gain_b);
                count += 1;
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
    }
    (worst, count)
}

/// Exhaustive diminishing-returns check for `f`, `g` and both complements.
pub fn check_submodularity(win: &WindowSpec) -> Result<CertificateReport> {
    if win.length > MAX_CERTIFICATE_WINDOW {
        return Err(Error::WindowTooLarge { size: win.length, max: MAX_CERTIFICATE_WINDOW });
    }
    let n = win.length;
    let table = |func: SetFn| -> Vec<f64> {
        (0..=PeriodSet::full(n).0).map(|s| func.eval(win, PeriodSet(s))).collect()
    };
    let (margin_f, triples) = min_margin(&table(SetFn::F), n);
    let (margin_g, _) = min_margin(&table(SetFn::G), n);
    let (margin_f_bar, _) = min_margin(&table(SetFn::FBar), n);
    let (margin_g_bar, _) = min_margin(&table(SetFn::GBar), n);
    let pass = [margin_f, margin_g, margin_f_bar, margin_g_bar]
        .iter()
        .all(|&m| m >= -SUBMODULAR_TOL);
    Ok(CertificateReport { window_len: n, margin_f, margin_g, margin_f_bar, margin_g_bar, triples, pass })
}
