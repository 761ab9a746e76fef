//! Four-parameter squeezing decomposition of the k = 0 Bogoliubov matrix.
//!
//! The generators are the adjoint actions ψ ↦ [Φᵢ, ψ] on ψ = (a, b, a†, b†)
//! of
//!
//! ```text
//! Φ₁ = ½(a†² − a²) − ½(b†² − b²)      Φ₃ = a†b − ab†
//! Φ₂ = ½(a†² − a²) + ½(b†² − b²)      Φ₄ = a†b† − ab
//! ```
//!
//! Conjugating by S = exp(Σθᵢ Φᵢ) acts on ψ as exp(Σθᵢ gᵢ), which equals
//! 𝒰⁻¹. In 2×2 blocks, with Z = diag(1, −1), X the swap and J the 90°
//! rotation,
//!
//! ```text
//! g₁ = [[0, −Z], [−Z, 0]]   g₂ = [[0, −1], [−1, 0]]
//! g₃ = [[J, 0], [0, J]]     g₄ = [[0, −X], [−X, 0]]
//! ```
//!
//! The generators are orthogonal under the Frobenius product, each with
//! squared norm 4, so projection onto their span is a division.
//!
//! θ = √(θ₃² − θ₁² − θ₄²) is never formed; functions of θ are evaluated
//! from `theta_sq` with the hyperbolic branch when it is negative.

use crate::bogoliubov::BogoliubovDecomposition;
use crate::error::{Error, Result};
use crate::linalg::{expm, logm, max_abs, Mat4};

/// Below this |θ²| the trigonometric helpers switch to their series.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// Accepted projection residual, relative to max(1, max |log 𝒰⁻¹|).
pub const PROJECTION_TOL: f64 = 1e-10;

/// Accepted symplectic defect of the input, relative to max(1, max |𝒰|²).
pub const SYMPLECTIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSet {
    pub g1: Mat4,
    pub g2: Mat4,
    pub g3: Mat4,
    pub g4: Mat4,
}

impl GeneratorSet {
    pub fn all(&self) -> [Mat4; 4] {
        [self.g1, self.g2, self.g3, self.g4]
    }

    pub fn combine(&self, theta: [f64; 4]) -> Mat4 {
        self.g1 * theta[0] + self.g2 * theta[1] + self.g3 * theta[2] + self.g4 * theta[3]
    }
}

/// [[D, O], [O, D]] from row-major 2×2 blocks.
fn blocks(d: [f64; 4], o: [f64; 4]) -> Mat4 {
    Mat4::new(
        d[0], d[1], o[0], o[1], //
        d[2], d[3], o[2], o[3], //
        o[0], o[1], d[0], d[1], //
        o[2], o[3], d[2], d[3],
    )
}

pub fn generator_matrices() -> GeneratorSet {
    let zero = [0.0; 4];
    GeneratorSet {
        g1: blocks(zero, [-1.0, 0.0, 0.0, 1.0]),
        g2: blocks(zero, [-1.0, 0.0, 0.0, -1.0]),
        g3: blocks([0.0, -1.0, 1.0, 0.0], zero),
        g4: blocks(zero, [0.0, -1.0, -1.0, 0.0]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingParams {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
    /// θ₃² − θ₁² − θ₄²
    pub theta_sq: f64,
    /// max |log 𝒰⁻¹ − Σθᵢgᵢ| of the extraction; zero when built by hand.
    pub residual: f64,
}

impl SqueezingParams {
    pub fn new(theta1: f64, theta2: f64, theta3: f64, theta4: f64) -> Self {
        SqueezingParams {
            theta1,
            theta2,
            theta3,
            theta4,
            theta_sq: theta3 * theta3 - theta1 * theta1 - theta4 * theta4,
            residual: 0.0,
        }
    }

    pub fn from_array(t: [f64; 4]) -> Self {
        SqueezingParams::new(t[0], t[1], t[2], t[3])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.theta1, self.theta2, self.theta3, self.theta4]
    }
}

/// cos θ as a function of t = θ².
pub fn cos_of_sq(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        1.0 - t / 2.0 + t * t / 24.0
    } else if t > 0.0 {
        t.sqrt().cos()
    } else {
        (-t).sqrt().cosh()
    }
}

/// sin θ / θ as a function of t = θ². sin 2θ / 2θ is `sinc_of_sq(4t)`.
pub fn sinc_of_sq(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        1.0 - t / 6.0 + t * t / 120.0
    } else if t > 0.0 {
        let r = t.sqrt();
        r.sin() / r
    } else {
        let r = (-t).sqrt();
        r.sinh() / r
    }
}

/// L = log 𝒰⁻¹ projected onto the generators.
pub fn extract(decomp: &BogoliubovDecomposition) -> Result<SqueezingParams> {
    extract_matrix(&decomp.matrix())
}

/// As [`extract`] for a bare 4×4 Bogoliubov matrix.
pub fn extract_matrix(u: &Mat4) -> Result<SqueezingParams> {
    let sigma = Mat4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, -1.0, -1.0));
    let scale = max_abs(u).powi(2).max(1.0);
    let defect = max_abs(&(u.transpose() * sigma * u - sigma));
    if defect > SYMPLECTIC_TOL * scale {
        return Err(Error::Numerical(format!(
            "Bogoliubov matrix is not paraunitary (defect {defect:e})"
        )));
    }
    // Paraunitary: 𝒰⁻¹ = σ₃ 𝒰ᵀ σ₃.
    let inverse = sigma * u.transpose() * sigma;
    let log = logm(&inverse)?;
    let gens = generator_matrices();
    let mut theta = [0.0; 4];
    for (t, g) in theta.iter_mut().zip(gens.all()) {
        *t = g.dot(&log) / 4.0;
    }
    let residual = max_abs(&(log - gens.combine(theta)));
    if residual > PROJECTION_TOL * max_abs(&log).max(1.0) {
        return Err(Error::Projection(residual));
    }
    let mut p = SqueezingParams::new(theta[0], theta[1], theta[2], theta[3]);
    p.residual = residual;
    Ok(p)
}

/// exp(Σθᵢgᵢ) = 𝒰⁻¹.
pub fn reconstruct(params: &SqueezingParams) -> Mat4 {
    expm(&generator_matrices().combine(params.as_array()))
}

/// exp(−Σθᵢgᵢ) = 𝒰.
pub fn bogoliubov_matrix(params: &SqueezingParams) -> Mat4 {
    expm(&-generator_matrices().combine(params.as_array()))
}

/// u₁ = cosh θ₂ cos θ + (θ₁/θ) sin θ sinh θ₂.
pub fn u1_closed(p: &SqueezingParams) -> f64 {
    p.theta2.cosh() * cos_of_sq(p.theta_sq) + p.theta1 * sinc_of_sq(p.theta_sq) * p.theta2.sinh()
}

/// u₂ = (θ₄/θ) sin θ sinh θ₂ + (θ₃/θ) sin θ cosh θ₂.
pub fn u2_closed(p: &SqueezingParams) -> f64 {
    let s = sinc_of_sq(p.theta_sq);
    p.theta4 * s * p.theta2.sinh() + p.theta3 * s * p.theta2.cosh()
}
