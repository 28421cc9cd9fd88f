//! Cut pool CSV: one row per nonzero coefficient, the rhs repeated on every
//! row of a cut. Rows of one cut are contiguous.
//!
//! ```text
//! family,t,tau_bar,tau_star,var_kind,period,coeff,rhs
//! window_charge,1,1,,p_ch,1,1,5
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cuts::{CutFamily, CutMeta, LinearCut, VarKind};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct CutRecord {
    family: String,
    t: usize,
    tau_bar: usize,
    tau_star: Option<usize>,
    var_kind: String,
    period: usize,
    coeff: f64,
    rhs: f64,
}

pub fn write_cuts_csv<W: Write>(cuts: &[LinearCut], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for cut in cuts {
        for (kind, period, coeff) in cut.terms() {
            w.serialize(CutRecord {
                family: cut.family.as_str().to_string(),
                t: cut.meta.t,
                tau_bar: cut.meta.tau_bar,
                tau_star: cut.meta.tau_star,
                var_kind: kind.as_str().to_string(),
                period,
                coeff,
                rhs: cut.rhs,
            })?;
        }
    }
    w.flush().map_err(|e| Error::io("<cut csv>", e))?;
    Ok(())
}

/// Reads cuts back; consecutive rows with the same header fields form one cut.
pub fn read_cuts_csv<R: Read>(input: R) -> Result<Vec<LinearCut>> {
    let mut r = csv::Reader::from_reader(input);
    let mut cuts: Vec<LinearCut> = Vec::new();
    for rec in r.deserialize() {
        let rec: CutRecord = rec?;
        let family = CutFamily::parse(&rec.family)
            .ok_or_else(|| Error::Model(format!("unknown cut family {:?}", rec.family)))?;
        let kind = VarKind::parse(&rec.var_kind)
            .ok_or_else(|| Error::Model(format!("unknown variable kind {:?}", rec.var_kind)))?;
        let meta = CutMeta { t: rec.t, tau_bar: rec.tau_bar, tau_star: rec.tau_star };
        let same = cuts.last().is_some_and(|c: &LinearCut| {
            c.family == family && c.meta == meta && c.rhs.to_bits() == rec.rhs.to_bits()
                && !has_term(c, kind, rec.period)
        });
        if !same {
            let mut cut = LinearCut::new(family, meta.t, meta.tau_bar);
            cut.meta = meta;
            cut.rhs = rec.rhs;
            cuts.push(cut);
        }
        cuts.last_mut().expect("pushed above").add(kind, rec.period, rec.coeff);
    }
    Ok(cuts)
}

fn has_term(cut: &LinearCut, kind: VarKind, period: usize) -> bool {
    match kind {
        VarKind::Charge => cut.coeff_ch.contains_key(&period),
        VarKind::Discharge => cut.coeff_dis.contains_key(&period),
        VarKind::Mode => cut.coeff_u.contains_key(&period),
    }
}
