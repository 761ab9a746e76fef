//! Logarithmic negativity of the k = 0 modes of the two planes.
//!
//! Quadratures R = (q_A, q_B, p_A, p_B) = Mψ with
//! M = (1/√2)[[1, 1], [−i, i]] blockwise. In the squeezed vacuum the
//! covariance V_ij = ½⟨{R_i, R_j}⟩ is ½ Re[(M𝒰)(M𝒰)†]; the vacuum gives ½.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::bogoliubov::BogoliubovDecomposition;
use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::squeezing::{sinc_of_sq, SqueezingParams};

/// Tolerance on the ± pairing of the spectrum of Ω V, relative to ‖V‖.
const PAIRING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    /// Ordering (q_A, q_B, p_A, p_B).
    pub v: Mat4,
}

/// Which plane's momenta change sign under partial transposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Ω = [[0, 1], [−1, 0]] on (q, p).
pub fn symplectic_form() -> Mat4 {
    Mat4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    )
}

fn phase_space_map() -> Matrix4<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let one = Complex64::new(r, 0.0);
    let i = Complex64::new(0.0, r);
    let z = Complex64::new(0.0, 0.0);
    Matrix4::new(
        one, z, one, z, //
        z, one, z, one, //
        -i, z, i, z, //
        z, -i, z, i,
    )
}

pub fn covariance_from_bogoliubov(decomp: &BogoliubovDecomposition) -> CovarianceMatrix {
    covariance_from_matrix(&decomp.matrix())
}

pub fn covariance_from_matrix(u: &Mat4) -> CovarianceMatrix {
    let t = phase_space_map() * u.map(|x| Complex64::new(x, 0.0));
    let v = (t * t.adjoint()).map(|z| 0.5 * z.re);
    // Round-off only; the exact result is symmetric.
    CovarianceMatrix {
        v: (v + v.transpose()) * 0.5,
    }
}

impl CovarianceMatrix {
    pub fn vacuum() -> Self {
        CovarianceMatrix {
            v: Mat4::identity() * 0.5,
        }
    }

    pub fn partial_transpose(&self, which: Subsystem) -> CovarianceMatrix {
        let flip = match which {
            Subsystem::A => 2,
            Subsystem::B => 3,
        };
        let mut lambda = Mat4::identity();
        lambda[(flip, flip)] = -1.0;
        CovarianceMatrix {
            v: lambda * self.v * lambda,
        }
    }

    /// The two symplectic eigenvalues, ascending.
    pub fn symplectic_eigenvalues(&self) -> Result<[f64; 2]> {
        let mut m: Vec<f64> = (symplectic_form() * self.v)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect();
        m.sort_by(f64::total_cmp);
        let scale = self.v.abs().max().max(1.0);
        if (m[0] - m[1]).abs() > PAIRING_TOL * scale || (m[2] - m[3]).abs() > PAIRING_TOL * scale {
            return Err(Error::Numerical(format!("symplectic spectrum does not pair: {m:?}")));
        }
        Ok([0.5 * (m[0] + m[1]), 0.5 * (m[2] + m[3])])
    }
}

/// Smallest symplectic eigenvalue after transposing plane B.
pub fn eta_minus_numeric(cov: &CovarianceMatrix) -> Result<f64> {
    eta_minus_on(cov, Subsystem::B)
}

pub fn eta_minus_on(cov: &CovarianceMatrix, which: Subsystem) -> Result<f64> {
    Ok(cov.partial_transpose(which).symplectic_eigenvalues()?[0])
}

/// X = (θ₄/2θ) sin 2θ − (θ₃θ₁/θ²) sin²θ.
pub fn entangling_amplitude(p: &SqueezingParams) -> f64 {
    let s = sinc_of_sq(p.theta_sq);
    p.theta4 * sinc_of_sq(4.0 * p.theta_sq) - p.theta3 * p.theta1 * s * s
}

/// η⁻ = ½(√(1 + 4X²) − 2|X|), in the cancellation-free form.
pub fn eta_minus_analytic(p: &SqueezingParams) -> f64 {
    let x = entangling_amplitude(p).abs();
    0.5 / ((1.0 + 4.0 * x * x).sqrt() + 2.0 * x)
}

/// E_N = max(0, −ln 2η).
pub fn log_negativity(eta: f64) -> Result<f64> {
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::Domain(format!("symplectic eigenvalue must be positive, got {eta}")));
    }
    Ok((-(2.0 * eta).ln()).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeezing::bogoliubov_matrix;

    #[test]
    fn vacuum_covariance() {
        let c = covariance_from_matrix(&Mat4::identity());
        assert!((c.v - Mat4::identity() * 0.5).abs().max() < 1e-15);
        assert!((eta_minus_numeric(&c).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_mode_squeezed_vacuum() {
        let r = 0.3;
        let u = bogoliubov_matrix(&SqueezingParams::new(0.0, 0.0, 0.0, r));
        let c = covariance_from_matrix(&u);
        assert!((c.v[(0, 0)] - 0.5 * (2.0 * r).cosh()).abs() < 1e-14);
        assert!((c.v[(0, 1)].abs() - 0.5 * (2.0 * r).sinh()).abs() < 1e-14);
        let eta = eta_minus_numeric(&c).unwrap();
        assert!((eta - 0.5 * (-2.0 * r).exp()).abs() < 1e-14);
        assert!((log_negativity(eta).unwrap() - 0.6).abs() < 1e-13);
    }

    #[test]
    fn hybridisation_is_separable() {
        let u = bogoliubov_matrix(&SqueezingParams::new(0.0, 0.0, 0.8, 0.0));
        let eta = eta_minus_numeric(&covariance_from_matrix(&u)).unwrap();
        assert!((eta - 0.5).abs() < 1e-14);
    }

    #[test]
    fn analytic_limits() {
        assert_eq!(eta_minus_analytic(&SqueezingParams::new(0.0, 0.0, 0.0, 0.0)), 0.5);
        let p = SqueezingParams::new(0.0, 0.0, 0.0, 0.3);
        let en = log_negativity(eta_minus_analytic(&p)).unwrap();
        assert!((en - 0.6).abs() < 1e-12);
        let p = SqueezingParams::new(0.4, 0.0, 0.0, 0.0);
        assert_eq!(log_negativity(eta_minus_analytic(&p)).unwrap(), 0.0);
    }

    #[test]
    fn log_negativity_domain() {
        assert_eq!(log_negativity(0.5).unwrap(), 0.0);
        assert_eq!(log_negativity(0.9).unwrap(), 0.0);
        assert!((log_negativity((-0.6f64).exp() / 2.0).unwrap() - 0.6).abs() < 1e-15);
        assert!(log_negativity(0.0).is_err());
        assert!(log_negativity(-1.0).is_err());
        assert!(log_negativity(f64::NAN).is_err());
    }

    #[test]
    fn routes_agree_on_mixed_parameters() {
        let p = SqueezingParams::new(0.3, -0.2, 0.5, 0.1);
        let num = eta_minus_numeric(&covariance_from_matrix(&bogoliubov_matrix(&p))).unwrap();
        assert!((num - eta_minus_analytic(&p)).abs() < 1e-13);
    }
}
