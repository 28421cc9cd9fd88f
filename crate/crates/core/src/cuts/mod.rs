//! Linear valid inequalities for a single battery.

pub mod certify;
pub mod coefficients;
pub mod export;
pub mod families;
pub mod redundancy;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::solve::program::{Cmp, Row};

pub use coefficients::CoefficientTable;
pub use families::{gen_anchor_cuts, gen_pozo_cuts, gen_u_cuts, gen_window_cuts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutFamily {
    WindowCharge,
    WindowDischarge,
    UCharge,
    UDischarge,
    AnchorNoSelf,
    AnchorWithSelf,
    PozoCharge,
    PozoDischarge,
    SingleperiodBox,
}

impl CutFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            CutFamily::WindowCharge => "window_charge",
            CutFamily::WindowDischarge => "window_discharge",
            CutFamily::UCharge => "u_charge",
            CutFamily::UDischarge => "u_discharge",
            CutFamily::AnchorNoSelf => "anchor_no_self",
            CutFamily::AnchorWithSelf => "anchor_with_self",
            CutFamily::PozoCharge => "pozo_charge",
            CutFamily::PozoDischarge => "pozo_discharge",
            CutFamily::SingleperiodBox => "singleperiod_box",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            CutFamily::WindowCharge,
            CutFamily::WindowDischarge,
            CutFamily::UCharge,
            CutFamily::UDischarge,
            CutFamily::AnchorNoSelf,
            CutFamily::AnchorWithSelf,
            CutFamily::PozoCharge,
            CutFamily::PozoDischarge,
            CutFamily::SingleperiodBox,
        ]
        .into_iter()
        .find(|f| f.as_str() == s)
    }

    pub fn uses_mode(self) -> bool {
        matches!(self, CutFamily::UCharge | CutFamily::UDischarge)
    }
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Charge,
    Discharge,
    Mode,
}

impl VarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Charge => "p_ch",
            VarKind::Discharge => "p_dis",
            VarKind::Mode => "u",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "p_ch" => Some(VarKind::Charge),
            "p_dis" => Some(VarKind::Discharge),
            "u" => Some(VarKind::Mode),
            _ => None,
        }
    }
}

/// Window the cut was generated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CutMeta {
    pub t: usize,
    pub tau_bar: usize,
    pub tau_star: Option<usize>,
}

/// `sum coeff * var <= rhs` over 1-based periods.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearCut {
    pub coeff_ch: BTreeMap<usize, f64>,
    pub coeff_dis: BTreeMap<usize, f64>,
    pub coeff_u: BTreeMap<usize, f64>,
    pub rhs: f64,
    pub family: CutFamily,
    pub meta: CutMeta,
}

impl LinearCut {
    pub fn new(family: CutFamily, t: usize, tau_bar: usize) -> Self {
        LinearCut {
            coeff_ch: BTreeMap::new(),
            coeff_dis: BTreeMap::new(),
            coeff_u: BTreeMap::new(),
            rhs: 0.0,
            family,
            meta: CutMeta { t, tau_bar, tau_star: None },
        }
    }

    /// Adds to a coefficient; exact zeros are not stored.
    pub fn add(&mut self, kind: VarKind, period: usize, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let map = match kind {
            VarKind::Charge => &mut self.coeff_ch,
            VarKind::Discharge => &mut self.coeff_dis,
            VarKind::Mode => &mut self.coeff_u,
        };
        let entry = map.entry(period).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            map.remove(&period);
        }
    }

    /// Left-hand side at a point. `u` may be omitted when the cut has no mode
    /// terms.
    pub fn lhs(&self, p_ch: &[f64], p_dis: &[f64], u: Option<&[f64]>) -> f64 {
        let mut v = 0.0;
        for (&k, &a) in &self.coeff_ch {
            v += a * p_ch[k - 1];
        }
        for (&k, &a) in &self.coeff_dis {
            v += a * p_dis[k - 1];
        }
        if !self.coeff_u.is_empty() {
            let u = u.expect("cut has mode terms");
            for (&k, &a) in &self.coeff_u {
                v += a * u[k - 1];
            }
        }
        v
    }

    /// `lhs - rhs`; positive means violated.
    pub fn violation(&self, p_ch: &[f64], p_dis: &[f64], u: Option<&[f64]>) -> f64 {
        self.lhs(p_ch, p_dis, u) - self.rhs
    }

    /// `(kind, period, coeff)` in a fixed order.
    pub fn terms(&self) -> impl Iterator<Item = (VarKind, usize, f64)> + '_ {
        let ch = self.coeff_ch.iter().map(|(&k, &a)| (VarKind::Charge, k, a));
        let dis = self.coeff_dis.iter().map(|(&k, &a)| (VarKind::Discharge, k, a));
        let u = self.coeff_u.iter().map(|(&k, &a)| (VarKind::Mode, k, a));
        ch.chain(dis).chain(u)
    }

    /// Solver row for a variable layout given by the offsets of the charge,
    /// discharge and mode blocks (period `k` maps to `offset + k - 1`).
    pub fn to_row(&self, ch: usize, dis: usize, mode: Option<usize>) -> Row {
        let coeffs = self
            .terms()
            .map(|(kind, k, a)| {
                let base = match kind {
                    VarKind::Charge => ch,
                    VarKind::Discharge => dis,
                    VarKind::Mode => mode.expect("layout has no mode block"),
                };
                (base + k - 1, a)
            })
            .collect();
        Row::new(coeffs, Cmp::Le, self.rhs)
    }

    pub fn num_terms(&self) -> usize {
        self.coeff_ch.len() + self.coeff_dis.len() + self.coeff_u.len()
    }

    fn key(&self) -> Vec<u64> {
        let scale = if self.rhs > 0.0 { self.rhs } else { 1.0 };
        let mut key: Vec<u64> = self
            .terms()
            .flat_map(|(kind, k, a)| [kind as u64, k as u64, (a / scale).to_bits()])
            .collect();
        key.push((self.rhs / scale).to_bits());
        key
    }
}

/// Removes exact duplicates (after scaling by a positive rhs), keeping the
/// first occurrence.
pub fn dedup(cuts: Vec<LinearCut>) -> Vec<LinearCut> {
    let mut seen = HashSet::new();
    cuts.into_iter().filter(|c| seen.insert(c.key())).collect()
}
