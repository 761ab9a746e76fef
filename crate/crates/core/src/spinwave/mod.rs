//! Quadratic k = 0 magnon Hamiltonian.
//!
//! With ψ = (a, b, a†, b†) the uniform-mode Hamiltonian is ½ψ†H₀ψ,
//!
//! ```text
//!       ⎡ E   μ₁  2ξ  μ₂ ⎤
//! H₀ =  ⎢ μ₁  E   μ₂  2ξ ⎥
//!       ⎢ 2ξ  μ₂  E   μ₁ ⎥
//!       ⎣ μ₂  2ξ  μ₁  E  ⎦
//! ```
//!
//! Each spin is written in its local frame (e₁, e₂, e₃) with e₃ along the
//! classical moment, tilted by ϑ from z in the x–z plane, and expanded to
//! linear order in Holstein–Primakoff bosons. A pair term Sᵢᵀ Λ Sⱼ becomes
//! sᵢᵀ C sⱼ with C = R(ϑᵢ)ᵀ Λ R(ϑⱼ), which at k = 0 gives
//!
//! ```text
//! E  += S (C₁₁ + C₂₂ − 2C₃₃)   intra-plane, ordered pairs
//! ξ  += S (C₁₁ − C₂₂) / 2      intra-plane
//! E  += −S C₃₃                 inter-plane
//! μ₁ += S (C₁₁ + C₂₂) / 2      inter-plane
//! μ₂ += S (C₁₁ − C₂₂) / 2      inter-plane
//! ```
//!
//! Anisotropies enter the same way through Q = −K u′u′ᵀ with u′ = Rᵀu.
//! The exchange drops out at k = 0. See `docs/spinwave_derivation.md`.

mod oracle;

pub use oracle::{brute_force_block, brute_force_report, BruteForceReport, ORACLE_MAX_SIDE};

use nalgebra::{Matrix3, Vector3};

use crate::classical::{boundary_residual, BOUNDARY_TOL};
use crate::dipole::{DipoleSums, Moments};
use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::params::{Phase, ValidatedParams};

/// Real k = 0 coefficients of H₀; both planes share E and ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdgBlock {
    pub e: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub xi: f64,
    pub phase: Phase,
}

impl BdgBlock {
    pub fn matrix(&self) -> Mat4 {
        let (e, m1, m2, x2) = (self.e, self.mu1, self.mu2, 2.0 * self.xi);
        Mat4::new(
            e, m1, x2, m2, //
            m1, e, m2, x2, //
            x2, m2, e, m1, //
            m2, x2, m1, e,
        )
    }

    pub fn max_abs_diff(&self, other: &BdgBlock) -> f64 {
        [
            self.e - other.e,
            self.mu1 - other.mu1,
            self.mu2 - other.mu2,
            self.xi - other.xi,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Rotation whose columns are the local frame (e₁, e₂, e₃).
pub(crate) fn frame(theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3::new(
        c, 0.0, s, //
        0.0, 1.0, 0.0, //
        -s, 0.0, c,
    )
}

/// D Σ (1/r³ − 3 r rᵀ/r⁵) as a lab-frame tensor.
pub(crate) fn dipole_tensor(d: f64, m: &Moments) -> Matrix3<f64> {
    d * Matrix3::new(
        m.iso - 3.0 * m.xx,
        0.0,
        -3.0 * m.xz,
        0.0,
        m.iso - 3.0 * m.yy,
        0.0,
        -3.0 * m.xz,
        0.0,
        m.iso - 3.0 * m.zz,
    )
}

pub(crate) fn anisotropy_tensor(params: &ValidatedParams) -> Matrix3<f64> {
    let z = Vector3::z();
    let x = Vector3::x();
    -params.kz * z * z.transpose() - params.kx * x * x.transpose()
}

/// Coefficients for the collinear state of `phase`, without checking that
/// it is the ground state. Both states are stationary, so the expansion is
/// well defined either way.
pub fn block_for_phase(params: &ValidatedParams, phase: Phase, sums: &DipoleSums) -> BdgBlock {
    let (theta_a, theta_b) = phase.angles();
    let s = params.spin;
    let (ra, rb) = (frame(theta_a), frame(theta_b));

    let intra = ra.transpose() * dipole_tensor(params.d, &sums.intra) * ra;
    let aniso = ra.transpose() * anisotropy_tensor(params) * ra;
    let inter = ra.transpose() * dipole_tensor(params.d, &sums.inter) * rb;

    let on_site = |c: &Matrix3<f64>| (c[(0, 0)] + c[(1, 1)] - 2.0 * c[(2, 2)], c[(0, 0)] - c[(1, 1)]);
    let (e_intra, xi_intra) = on_site(&intra);
    let (e_aniso, xi_aniso) = on_site(&aniso);

    BdgBlock {
        e: s * (e_intra + e_aniso - inter[(2, 2)]),
        mu1: 0.5 * s * (inter[(0, 0)] + inter[(1, 1)]),
        mu2: 0.5 * s * (inter[(0, 0)] - inter[(1, 1)]),
        xi: 0.5 * s * (xi_intra + xi_aniso),
        phase,
    }
}

/// k = 0 block for the classical ground state `phase`. Within
/// [`BOUNDARY_TOL`] of the phase boundary either phase is accepted.
pub fn bdg_block(params: &ValidatedParams, phase: Phase, sums: &DipoleSums) -> Result<BdgBlock> {
    let residual = boundary_residual(params, sums);
    if residual.abs() >= BOUNDARY_TOL {
        let actual = if residual > 0.0 {
            Phase::OopFm
        } else {
            Phase::IpAfm
        };
        if actual != phase {
            return Err(Error::PhaseMismatch {
                requested: phase,
                actual,
            });
        }
    }
    Ok(block_for_phase(params, phase, sums))
}

/// Block of one plane on its own (inter-plane sums dropped), expanded about
/// that plane's own ground state: in-plane along x if the intra-plane dipole
/// energy beats K_z − K_x, out of plane otherwise.
pub fn isolated_block(params: &ValidatedParams, sums: &DipoleSums) -> BdgBlock {
    let decoupled = DipoleSums {
        inter: Moments::default(),
        ..*sums
    };
    let in_plane = 3.0 * params.d * sums.intra.xx > params.kz - params.kx;
    let phase = if in_plane { Phase::IpAfm } else { Phase::OopFm };
    block_for_phase(params, phase, &decoupled)
}

/// ε̃₀ = √(E² − 4ξ²) of an isolated plane.
pub fn eps_tilde(params: &ValidatedParams, sums: &DipoleSums) -> Result<f64> {
    let b = isolated_block(params, sums);
    let arg = b.e * b.e - 4.0 * b.xi * b.xi;
    if arg <= 0.0 {
        return Err(Error::Instability(arg));
    }
    Ok(arg.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dipole::DEFAULT_REL_TOL;
    use crate::params::{LatticeSpec, ModelParams};

    fn setup(l: f64) -> (ValidatedParams, DipoleSums) {
        let p = ModelParams::reference().with_separation(l).validate().unwrap();
        let s = DipoleSums::compute(l, LatticeSpec::Infinite, DEFAULT_REL_TOL).unwrap();
        (p, s)
    }

    #[test]
    fn closed_forms_out_of_plane() {
        let (p, s) = setup(0.2);
        let b = bdg_block(&p, Phase::OopFm, &s).unwrap();
        let m = p.d * s.intra.iso;
        let g = p.d * (s.inter.iso - 3.0 * s.inter.zz);
        let want_e = 2.0 * p.kz - p.kx - 3.0 * m - g;
        assert!((b.e - want_e).abs() < 1e-15);
        assert!((b.xi + p.kx / 2.0).abs() < 1e-18);
        assert!((b.mu1 + g / 2.0).abs() < 1e-15);
        assert!(b.mu2.abs() < 1e-15);
    }

    #[test]
    fn closed_forms_in_plane() {
        let (p, s) = setup(1.0);
        let b = bdg_block(&p, Phase::IpAfm, &s).unwrap();
        let m = p.d * s.intra.iso;
        let g = p.d * (s.inter.iso - 3.0 * s.inter.zz);
        assert!((b.e - (1.5 * m - p.kz + 2.0 * p.kx - g / 2.0)).abs() < 1e-15);
        assert!((b.xi - (0.75 * m - p.kz / 2.0)).abs() < 1e-15);
        assert!((b.mu1 + 0.75 * g).abs() < 1e-15);
        assert!((b.mu2 + 0.25 * g).abs() < 1e-15);
    }

    #[test]
    fn no_coupling_without_dipoles() {
        let p = ModelParams::reference().with_d(0.0).validate().unwrap();
        let s = DipoleSums::compute(0.5, LatticeSpec::Infinite, DEFAULT_REL_TOL).unwrap();
        let b = bdg_block(&p, Phase::OopFm, &s).unwrap();
        assert_eq!(b.mu1, 0.0);
        assert_eq!(b.mu2, 0.0);
        assert_eq!(b.xi, -p.kx / 2.0);
    }

    #[test]
    fn wrong_phase_is_rejected() {
        let (p, s) = setup(1.0);
        assert!(matches!(
            bdg_block(&p, Phase::OopFm, &s),
            Err(Error::PhaseMismatch { .. })
        ));
    }

    #[test]
    fn eps_tilde_closed_form() {
        let (p, s) = setup(1.0);
        let m = p.d * s.intra.iso;
        let want = (2.0 * p.kx * (3.0 * m - 2.0 * p.kz + 2.0 * p.kx)).sqrt();
        assert!((eps_tilde(&p, &s).unwrap() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_layout() {
        let b = BdgBlock {
            e: 1.0,
            mu1: 2.0,
            mu2: 3.0,
            xi: 4.0,
            phase: Phase::OopFm,
        };
        let h = b.matrix();
        assert_eq!(h, h.transpose());
        assert_eq!(h[(0, 2)], 8.0);
        assert_eq!(h[(0, 3)], 3.0);
        assert_eq!(h[(2, 3)], 2.0);
    }
}
