//! Small dense matrix functions on 4×4 real matrices.
//!
//! `expm` is the degree-13 Padé approximant with scaling and squaring.
//! `logm` is the principal logarithm by inverse scaling and squaring:
//! repeated square roots until the matrix is close to the identity, then the
//! `atanh` series `log A = 2 Σ Z^{2j+1}/(2j+1)` with `Z = (A − I)(A + I)⁻¹`.

use nalgebra::Matrix4;

use crate::error::{Error, Result};

pub type Mat4 = Matrix4<f64>;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Maximum absolute column sum.
pub fn norm1(a: &Mat4) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(a: &Mat4) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn expm(a: &Mat4) -> Mat4 {
    let norm = norm1(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / 2f64.powi(squarings);
    let b = &PADE13;
    let id = Mat4::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u = a
        * (a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9])
            + a6 * b[7]
            + a4 * b[5]
            + a2 * b[3]
            + id * b[1]);
    let v = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8])
        + a6 * b[6]
        + a4 * b[4]
        + a2 * b[2]
        + id * b[0];
    let mut r = (v - u)
        .lu()
        .solve(&(v + u))
        .expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = r * r;
    }
    r
}

/// Truncated Taylor series with scaling and squaring. Slower and less
/// accurate than [`expm`]; kept as an independent check.
pub fn expm_taylor(a: &Mat4) -> Mat4 {
    let norm = norm1(a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = a / 2f64.powi(squarings);
    let mut term = Mat4::identity();
    let mut sum = Mat4::identity();
    for k in 1..40 {
        term = term * a / k as f64;
        sum += term;
        if max_abs(&term) < 1e-18 * max_abs(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Principal square root by the scaled product-form Denman–Beavers iteration.
pub fn sqrtm(a: &Mat4) -> Result<Mat4> {
    let id = Mat4::identity();
    let mut m = *a;
    let mut y = *a;
    for _ in 0..100 {
        let m_inv = m
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular matrix in square root".into()))?;
        let mu = m.determinant().abs().powf(-1.0 / 8.0);
        let (mu2, inv_mu2) = (mu * mu, 1.0 / (mu * mu));
        y = y * (id + m_inv * inv_mu2) * (0.5 * mu);
        m = (id + (m * mu2 + m_inv * inv_mu2) * 0.5) * 0.5;
        if max_abs(&(m - id)) < 1e-15 {
            return Ok(y);
        }
    }
    Err(Error::Numerical("square-root iteration did not converge".into()))
}

/// Principal matrix logarithm.
pub fn logm(a: &Mat4) -> Result<Mat4> {
    let scale = max_abs(a).max(1.0);
    for ev in a.complex_eigenvalues().iter() {
        if ev.re <= 0.0 && ev.im.abs() <= 1e-12 * scale {
            return Err(Error::LogBranch(format!("eigenvalue {:.3e}{:+.3e}i", ev.re, ev.im)));
        }
    }
    let id = Mat4::identity();
    let mut x = *a;
    let mut roots = 0;
    while norm1(&(x - id)) > 0.25 {
        if roots == 64 {
            return Err(Error::Numerical("logarithm scaling did not reach the identity".into()));
        }
        x = sqrtm(&x)?;
        roots += 1;
    }
    let z = (x + id)
        .lu()
        .solve(&(x - id))
        .ok_or_else(|| Error::Numerical("singular matrix in logarithm".into()))?;
    // Z and (A + I)⁻¹ commute with A, so left or right division is the same.
    let z2 = z * z;
    let mut power = z;
    let mut sum = z;
    for j in 1..60 {
        power *= z2;
        let term = power / (2 * j + 1) as f64;
        sum += term;
        if max_abs(&term) <= 1e-18 * max_abs(&sum) {
            break;
        }
    }
    Ok(sum * 2f64.powi(roots + 1))
}
