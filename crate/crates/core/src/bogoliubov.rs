//! Symplectic diagonalisation of the k = 0 block.
//!
//! ψ = 𝒰 φ with ψ = (a, b, a†, b†), φ = (α, β, α†, β†) and
//! 𝒰 = [[U, V], [V, U]] real. The analytic route uses the swap symmetry
//! of two identical planes: c± = (b ± a)/√2 decouple into single-mode
//! problems A c†c + B(c² + c†²) with A± = E ± μ₁ and B± = ξ ± μ₂/2.
//! α is the symmetric mode, β the antisymmetric one.
//!
//! The numeric route is Colpa's Cholesky construction and never uses the
//! swap symmetry except to name the columns.

use nalgebra::{Matrix2, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Mat4};
use crate::spinwave::BdgBlock;

/// Gap below which the analytic Bogoliubov elements are refused.
pub const TOL_GAP: f64 = 1e-9;

/// Negative squared energies down to this value are clamped to zero.
pub const CLAMP: f64 = -1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovDecomposition {
    /// [[u₁, u₂], [u₃, u₄]]
    pub u: Matrix2<f64>,
    /// [[v₁, v₂], [v₃, v₄]]
    pub v: Matrix2<f64>,
    pub eps_alpha: f64,
    pub eps_beta: f64,
}

impl BogoliubovDecomposition {
    pub fn matrix(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.u);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.v);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.v);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.u);
        m
    }

    /// (u₁, u₂, u₃, u₄)
    pub fn u_elements(&self) -> [f64; 4] {
        [self.u[(0, 0)], self.u[(0, 1)], self.u[(1, 0)], self.u[(1, 1)]]
    }

    /// (v₁, v₂, v₃, v₄)
    pub fn v_elements(&self) -> [f64; 4] {
        [self.v[(0, 0)], self.v[(0, 1)], self.v[(1, 0)], self.v[(1, 1)]]
    }

    /// max |UUᵀ − VVᵀ − 1| and max |UVᵀ − VUᵀ|.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        let (u, v) = (&self.u, &self.v);
        let norm = u * u.transpose() - v * v.transpose() - Matrix2::identity();
        let cross = u * v.transpose() - v * u.transpose();
        (
            norm.iter().fold(0.0, |m, x| m.max(x.abs())),
            cross.iter().fold(0.0, |m, x| m.max(x.abs())),
        )
    }

    /// Magnitude of 𝒰 squared; round-off in the constraints scales with it.
    pub fn scale(&self) -> f64 {
        max_abs(&self.matrix()).powi(2).max(1.0)
    }

    /// max |𝒰ᵀH₀𝒰 − diag(ε_α, ε_β, ε_α, ε_β)|.
    pub fn diagonalization_residual(&self, block: &BdgBlock) -> f64 {
        let t = self.matrix();
        let d = t.transpose() * block.matrix() * t;
        let want = Mat4::from_diagonal(&nalgebra::Vector4::new(
            self.eps_alpha,
            self.eps_beta,
            self.eps_alpha,
            self.eps_beta,
        ));
        max_abs(&(d - want))
    }

    /// Largest element difference to another decomposition.
    pub fn max_abs_diff(&self, other: &BogoliubovDecomposition) -> f64 {
        max_abs(&(self.matrix() - other.matrix()))
    }
}

fn squared_energies(block: &BdgBlock) -> (f64, f64) {
    let (e, m1, m2, x) = (block.e, block.mu1, block.mu2, block.xi);
    (
        (e + m1).powi(2) - (m2 + 2.0 * x).powi(2),
        (e - m1).powi(2) - (m2 - 2.0 * x).powi(2),
    )
}

/// ε_α/β = √((E ± μ₁)² − (μ₂ ± 2ξ)²).
pub fn eigenenergies(block: &BdgBlock) -> Result<(f64, f64)> {
    let (a, b) = squared_energies(block);
    for s in [a, b] {
        if s < CLAMP {
            return Err(Error::Instability(s));
        }
    }
    Ok((a.max(0.0).sqrt(), b.max(0.0).sqrt()))
}

/// (cosh r, sinh r) diagonalising A c†c + B(c² + c†²) at energy `eps`.
fn single_mode(a: f64, b: f64, eps: f64) -> (f64, f64) {
    let ch = ((a + eps) / (2.0 * eps)).sqrt();
    let sh = ((a - eps).max(0.0) / (2.0 * eps)).sqrt();
    (ch, if b > 0.0 { -sh } else { sh })
}

pub fn analytic_bogoliubov(block: &BdgBlock) -> Result<BogoliubovDecomposition> {
    analytic_bogoliubov_with(block, TOL_GAP)
}

pub fn analytic_bogoliubov_with(block: &BdgBlock, tol_gap: f64) -> Result<BogoliubovDecomposition> {
    let (eps_alpha, eps_beta) = eigenenergies(block)?;
    let (a_plus, a_minus) = (block.e + block.mu1, block.e - block.mu1);
    if a_plus <= 0.0 || a_minus <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    for eps in [eps_alpha, eps_beta] {
        if eps <= tol_gap {
            return Err(Error::Gapless(eps));
        }
    }
    let (chp, shp) = single_mode(a_plus, block.xi + block.mu2 / 2.0, eps_alpha);
    let (chm, shm) = single_mode(a_minus, block.xi - block.mu2 / 2.0, eps_beta);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok(BogoliubovDecomposition {
        u: Matrix2::new(r * chp, -r * chm, r * chp, r * chm),
        v: Matrix2::new(r * shp, -r * shm, r * shp, r * shm),
        eps_alpha,
        eps_beta,
    })
}

/// Paraunitary diagonalisation by Cholesky factorisation (Colpa).
///
/// Columns are named by swap parity (α symmetric) and signed so that
/// u₁ > 0 and u₄ > 0. If ε_α = ε_β the basis inside the degenerate pair is
/// fixed by making U symmetric positive semidefinite.
pub fn numeric_paraunitary(block: &BdgBlock) -> Result<BogoliubovDecomposition> {
    let h = block.matrix();
    let chol = h.cholesky().ok_or(Error::NotPositiveDefinite)?;
    let k = chol.l().transpose();
    let sigma = Mat4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, -1.0, -1.0));
    let w = k * sigma * k.transpose();
    let eig = SymmetricEigen::new(w);

    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let k_inv = k
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;

    // Positive-norm columns (u; v) of 𝒰.
    let mut cols = Vec::with_capacity(2);
    for &i in &order[..2] {
        let lambda = eig.eigenvalues[i];
        if lambda <= 0.0 {
            return Err(Error::Numerical("paraunitary spectrum is not split".into()));
        }
        cols.push((k_inv * eig.eigenvectors.column(i) * lambda.sqrt(), lambda));
    }
    let parity = |c: &nalgebra::Vector4<f64>| (c[0] + c[1]).abs() + (c[2] + c[3]).abs();
    if parity(&cols[1].0) > parity(&cols[0].0) {
        cols.swap(0, 1);
    }
    let (mut ca, eps_alpha) = cols[0];
    let (mut cb, eps_beta) = cols[1];

    let mut u = Matrix2::new(ca[0], cb[0], ca[1], cb[1]);
    let mut v = Matrix2::new(ca[2], cb[2], ca[3], cb[3]);
    if (eps_alpha - eps_beta).abs() <= 1e-10 * eps_alpha.max(eps_beta) {
        // U = P·R with P symmetric positive; rotate the pair by Rᵀ.
        let svd = u.svd(true, true);
        let rot = svd.u.unwrap() * svd.v_t.unwrap();
        u *= rot.transpose();
        v *= rot.transpose();
        return Ok(BogoliubovDecomposition {
            u,
            v,
            eps_alpha,
            eps_beta,
        });
    }
    if ca[0] < 0.0 {
        ca = -ca;
    }
    if cb[1] < 0.0 {
        cb = -cb;
    }
    u = Matrix2::new(ca[0], cb[0], ca[1], cb[1]);
    v = Matrix2::new(ca[2], cb[2], ca[3], cb[3]);
    Ok(BogoliubovDecomposition {
        u,
        v,
        eps_alpha,
        eps_beta,
    })
}
