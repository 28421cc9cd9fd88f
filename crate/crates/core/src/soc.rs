//! Per-period second-order-cone description of the tracking epigraph under
//! complementarity.
//!
//! For a setpoint `ps` the squared tracking error with complementarity,
//! `z >= (pd - pc - ps)^2` and `pd * pc = 0`, has a convex hull given by the
//! epigraph of the parabolic cylinder
//!
//! ```text
//! q(pd, pc) = (pd + pc)^2 - 2 ps pd + 2 ps pc + ps^2 = (pd - pc - ps)^2 + 4 pd pc
//! ```
//!
//! over `pd, pc >= 0`.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};

use crate::battery::Trajectory;
use crate::error::{Error, Result};

/// Below-cylinder tolerance accepted by [`hull_decompose`].
pub const HULL_TOL: f64 = 1e-10;

/// Cylinder value `q(pd, pc)` for setpoint `ps`.
pub fn cylinder_value(p_dis: f64, p_ch: f64, setpoint: f64) -> f64 {
    let s = p_dis + p_ch;
    s * s - 2.0 * setpoint * p_dis + 2.0 * setpoint * p_ch + setpoint * setpoint
}

/// Coefficients of a quadratic in `(pd, pc)`:
/// `dd pd^2 + cc pc^2 + dc pd pc + d pd + c pc + k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadCoeffs {
    pub dd: f64,
    pub cc: f64,
    pub dc: f64,
    pub d: f64,
    pub c: f64,
    pub k: f64,
}

impl QuadCoeffs {
    pub fn eval(&self, p_dis: f64, p_ch: f64) -> f64 {
        self.dd * p_dis * p_dis
            + self.cc * p_ch * p_ch
            + self.dc * p_dis * p_ch
            + self.d * p_dis
            + self.c * p_ch
            + self.k
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.dd, self.cc, self.dc, self.d, self.c, self.k]
    }
}

/// Member `lambda` of the pencil spanned by the tracking paraboloid and the
/// complementarity quadric `pd pc = 0`.
pub fn pencil_member(lambda: f64, setpoint: f64) -> QuadCoeffs {
    QuadCoeffs {
        dd: 1.0,
        cc: 1.0,
        dc: lambda,
        d: -2.0 * setpoint,
        c: 2.0 * setpoint,
        k: setpoint * setpoint,
    }
}

pub fn cylinder_coeffs(setpoint: f64) -> QuadCoeffs {
    QuadCoeffs {
        dd: 1.0,
        cc: 1.0,
        dc: 2.0,
        d: -2.0 * setpoint,
        c: 2.0 * setpoint,
        k: setpoint * setpoint,
    }
}

/// Norm-form data of one period's cone, in the variable order `(pd, pc, z)`:
/// `|| ((b.x + 1 + c) / 2, A x) || <= (1 - b.x - c) / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SocCutData {
    pub setpoint: f64,
    pub mat_a: Matrix3<f64>,
    pub vec_b: Vector3<f64>,
    pub scal_c: f64,
}

pub fn soc_cut(setpoint: f64) -> SocCutData {
    debug_assert_eq!(pencil_member(2.0, setpoint), cylinder_coeffs(setpoint));
    SocCutData {
        setpoint,
        mat_a: Matrix3::new(1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        vec_b: Vector3::new(-2.0 * setpoint, 2.0 * setpoint, -1.0),
        scal_c: setpoint * setpoint,
    }
}

impl SocCutData {
    /// `(u, v)` with the cone reading `||v|| <= u`.
    pub fn norm_form(&self, p_dis: f64, p_ch: f64, z: f64) -> (f64, [f64; 4]) {
        let x = Vector3::new(p_dis, p_ch, z);
        let bx = self.vec_b.dot(&x);
        let ax = self.mat_a * x;
        let u = 0.5 * (1.0 - bx - self.scal_c);
        (u, [0.5 * (bx + 1.0 + self.scal_c), ax[0], ax[1], ax[2]])
    }

    /// `u - ||v||`; nonnegative iff the point is inside the cone.
    pub fn margin(&self, p_dis: f64, p_ch: f64, z: f64) -> f64 {
        let (u, v) = self.norm_form(p_dis, p_ch, z);
        u - v.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn satisfied(&self, p_dis: f64, p_ch: f64, z: f64) -> bool {
        self.margin(p_dis, p_ch, z) >= 0.0
    }
}

/// Two points on the boundary curves and the weight that combine into a
/// queried epigraph point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullDecomposition {
    pub lam: f64,
    /// `(z, pd, 0)` on the discharge-only curve.
    pub point_d: [f64; 3],
    /// `(z, 0, pc)` on the charge-only curve.
    pub point_c: [f64; 3],
}

impl HullDecomposition {
    /// `lam * point_d + (1 - lam) * point_c`.
    pub fn combination(&self) -> [f64; 3] {
        let l = self.lam;
        [
            l * self.point_d[0] + (1.0 - l) * self.point_c[0],
            l * self.point_d[1] + (1.0 - l) * self.point_c[1],
            l * self.point_d[2] + (1.0 - l) * self.point_c[2],
        ]
    }
}

/// Writes `(z, pd, pc)` in the cylinder epigraph as a convex combination of
/// a discharge-only and a charge-only point of the nonconvex set, lifted
/// along `z`.
pub fn hull_decompose(z: f64, p_dis: f64, p_ch: f64, setpoint: f64) -> Result<HullDecomposition> {
    if p_dis < 0.0 || p_ch < 0.0 {
        return Err(Error::Model(format!("negative power ({p_dis}, {p_ch})")));
    }
    let q = cylinder_value(p_dis, p_ch, setpoint);
    if z < q - HULL_TOL * (1.0 + q.abs()) {
        return Err(Error::Model(format!("point below the cylinder: z={z} < q={q}")));
    }
    let p0 = p_dis + p_ch;
    let lam = if p0 > 0.0 { p_dis / p0 } else { 1.0 };
    let zd = (p0 - setpoint) * (p0 - setpoint);
    let zc = (p0 + setpoint) * (p0 + setpoint);
    Ok(HullDecomposition { lam, point_d: [zd, p0, 0.0], point_c: [zc, 0.0, p0] })
}

/// `sum_t q_t` over a trajectory.
pub fn aggregate_cylinder(traj: &Trajectory, setpoints: &[f64]) -> Result<f64> {
    if setpoints.len() != traj.len() {
        return Err(Error::LengthMismatch { expected: traj.len(), got: setpoints.len() });
    }
    Ok((0..traj.len())
        .map(|t| cylinder_value(traj.p_dis[t], traj.p_ch[t], setpoints[t]))
        .sum())
}

/// Slack `sum_t z_t - sum_t q_t` of the aggregated cylinder bound for a
/// per-period feasible `z`. Diagnostic only: the summed constraint is looser
/// than the per-period cones.
pub fn aggregate_cylinder_check(traj: &Trajectory, setpoints: &[f64], z: &[f64]) -> Result<f64> {
    if z.len() != traj.len() {
        return Err(Error::LengthMismatch { expected: traj.len(), got: z.len() });
    }
    let sum_q = aggregate_cylinder(traj, setpoints)?;
    for t in 0..traj.len() {
        let q = cylinder_value(traj.p_dis[t], traj.p_ch[t], setpoints[t]);
        if z[t] < q - HULL_TOL * (1.0 + q.abs()) {
            return Err(Error::Model(format!("z below the cylinder at period {}", t + 1)));
        }
    }
    Ok(z.iter().sum::<f64>() - sum_q)
}

/// SOC cut CSV: `period,setpoint,q_dd,q_cc,q_dc,q_d,q_c,q_0`, one row per
/// period. The cone is `z >= q_dd pd^2 + q_cc pc^2 + q_dc pd pc + q_d pd +
/// q_c pc + q_0` with `pd, pc >= 0`.
pub fn write_soc_csv<W: Write>(setpoints: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["period", "setpoint", "q_dd", "q_cc", "q_dc", "q_d", "q_c", "q_0"])?;
    for (t, &ps) in setpoints.iter().enumerate() {
        let mut rec = vec![(t + 1).to_string(), ps.to_string()];
        // + 0.0 turns -0 into 0
        rec.extend(cylinder_coeffs(ps).as_array().iter().map(|v| (v + 0.0).to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<soc csv>", e))?;
    Ok(())
}
