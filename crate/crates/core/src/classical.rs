//! Classical ground state of the two ferromagnets.
//!
//! Spins are uniform inside each plane and tilted by ϑ from z inside the x–z
//! plane. The energy is reported per spin of the whole bilayer: the total
//! energy divided by 2N.

use rayon::prelude::*;

use crate::dipole::{plane_sum, DipoleSums, LatticeSum, DEFAULT_REL_TOL};
use crate::error::{Error, Result};
use crate::params::{Phase, ValidatedParams};

/// Residuals closer to zero than this count as the phase boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Separation bracket searched by [`phase_boundary_distance`].
pub const BOUNDARY_BRACKET: (f64, f64) = (0.05, 10.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalConfig {
    pub theta_a: f64,
    pub theta_b: f64,
}

impl ClassicalConfig {
    /// Wraps both angles into (−π, π].
    pub fn new(theta_a: f64, theta_b: f64) -> Self {
        ClassicalConfig {
            theta_a: wrap(theta_a),
            theta_b: wrap(theta_b),
        }
    }

    pub fn of_phase(phase: Phase) -> Self {
        let (a, b) = phase.angles();
        ClassicalConfig::new(a, b)
    }
}

fn wrap(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let t = theta.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Energy per spin, computing the lattice sums on the fly.
pub fn classical_energy(config: ClassicalConfig, params: &ValidatedParams) -> Result<f64> {
    let sums = DipoleSums::compute(params.separation, params.lattice, DEFAULT_REL_TOL)?;
    Ok(classical_energy_with(config, params, &sums))
}

/// Energy per spin from precomputed lattice sums.
pub fn classical_energy_with(
    config: ClassicalConfig,
    params: &ValidatedParams,
    sums: &DipoleSums,
) -> f64 {
    let p = params.get();
    let s2 = p.spin * p.spin;
    let (sa, ca) = config.theta_a.sin_cos();
    let (sb, cb) = config.theta_b.sin_cos();

    // One plane, per spin. Ordered pair sums count each bond twice.
    let plane = |s: f64, c: f64| {
        let intra = &sums.intra;
        -4.0 * p.j1 * s2 - p.kz * s2 * c * c - p.kx * s2 * s * s
            + p.d * s2 * (intra.iso - 3.0 * (s * s * intra.xx + c * c * intra.zz))
    };
    let inter = &sums.inter;
    let coupling = p.d
        * s2
        * (inter.iso * (config.theta_a - config.theta_b).cos()
            - 3.0 * (sa * sb * inter.xx + ca * cb * inter.zz + (sa * cb + ca * sb) * inter.xz));

    0.5 * (plane(sa, ca) + plane(sb, cb) + coupling)
}

/// E(IP AFM) − E(OOP FM) per spin; positive when the out-of-plane state wins.
pub fn boundary_residual(params: &ValidatedParams, sums: &DipoleSums) -> f64 {
    let p = params.get();
    let (intra, inter) = (&sums.intra, &sums.inter);
    let left = p.kz - p.kx - 3.0 * p.d * intra.xx;
    let right = p.d * (inter.iso - 1.5 * (inter.xx + inter.zz));
    (left - right) * p.spin * p.spin
}

pub fn determine_phase(params: &ValidatedParams) -> Result<Phase> {
    let sums = DipoleSums::compute(params.separation, params.lattice, DEFAULT_REL_TOL)?;
    determine_phase_with(params, &sums)
}

pub fn determine_phase_with(params: &ValidatedParams, sums: &DipoleSums) -> Result<Phase> {
    let residual = boundary_residual(params, sums);
    if residual.abs() < BOUNDARY_TOL {
        Err(Error::Boundary { residual })
    } else if residual > 0.0 {
        Ok(Phase::OopFm)
    } else {
        Ok(Phase::IpAfm)
    }
}

/// Critical separation l* on [`BOUNDARY_BRACKET`]; the separation stored in
/// `params` is ignored.
pub fn phase_boundary_distance(params: &ValidatedParams) -> Result<f64> {
    let intra = plane_sum(0.0, params.lattice, DEFAULT_REL_TOL)?;
    let (lo, hi) = BOUNDARY_BRACKET;
    phase_boundary_in(params, &intra, lo, hi, DEFAULT_REL_TOL)
}

/// Bisection for the sign change of [`boundary_residual`] on `[lo, hi]`.
pub fn phase_boundary_in(
    params: &ValidatedParams,
    intra: &LatticeSum,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    let residual_at = |l: f64| -> Result<f64> {
        let sums = DipoleSums::with_intra(intra, l, params.lattice, rel_tol)?;
        Ok(boundary_residual(&params.at_separation(l)?, &sums))
    };
    let (mut a, mut b) = (lo, hi);
    let fa = residual_at(a)?;
    let fb = residual_at(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBoundary { lo, hi });
    }
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = residual_at(mid)?;
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm == 0.0 || (b - a) < 1e-14 * mid {
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    if best.1.abs() >= BOUNDARY_TOL {
        return Err(Error::Numerical(format!(
            "bisection stalled at l = {} with residual {:e}",
            best.0, best.1
        )));
    }
    Ok(best.0)
}

/// Angle grid oracle: minimum of [`classical_energy_with`] over ϑ_A in
/// [−90°, 90°] and ϑ_B in [−180°, 180°] at 1° steps. Flipping every spin
/// leaves the energy unchanged, so ϑ_A needs only half the circle.
pub fn grid_minimum(params: &ValidatedParams, sums: &DipoleSums) -> (ClassicalConfig, f64) {
    let points: Vec<(i32, i32)> = (-90..=90)
        .flat_map(|a| (-180..=180).map(move |b| (a, b)))
        .collect();
    points
        .par_iter()
        .map(|&(a, b)| {
            let config = ClassicalConfig {
                theta_a: (a as f64).to_radians(),
                theta_b: (b as f64).to_radians(),
            };
            (config, classical_energy_with(config, params, sums))
        })
        .reduce_with(|x, y| if y.1 < x.1 { y } else { x })
        .expect("grid is nonempty")
}

/// Phase of the grid minimum, or `None` if the minimum is neither of the two
/// collinear states.
pub fn grid_phase(params: &ValidatedParams, sums: &DipoleSums) -> Option<Phase> {
    let (c, _) = grid_minimum(params, sums);
    let deg = |x: f64| x.to_degrees().round() as i32;
    match (deg(c.theta_a), deg(c.theta_b)) {
        (0, 0) => Some(Phase::OopFm),
        (90, -90) | (-90, 90) => Some(Phase::IpAfm),
        _ => None,
    }
}
