//! Real-space construction of the k = 0 block, term by term.
//!
//! Every bond of the finite torus is expanded in Holstein–Primakoff bosons
//! with s¹ = √(S/2)(a + a†), s² = −i√(S/2)(a − a†), s³ = S − a†a. A product
//! c·OₚO_q of two boson operators is stored at H[p̄, q], where p̄ is the
//! index of Oₚ†, so that the Hamiltonian reads Ψ†HΨ with
//! Ψ = (a₁ … a_M, a₁† … a_M†). Symmetrising with the particle–hole swap
//! gives the BdG matrix 𝐇 with H = ½Ψ†𝐇Ψ, and the k = 0 block is P†𝐇P for
//! the uniform vectors P.
//!
//! This shares nothing with [`super::block_for_phase`] except the frame
//! convention: pair tensors are built per bond from the torus images, not
//! from lattice sums.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use super::{frame, BdgBlock};
use crate::error::{Error, Result};
use crate::params::{LatticeSpec, Phase, ValidatedParams};

pub const ORACLE_MAX_SIDE: usize = 64;

/// Oracle output plus the consistency checks made along the way.
#[derive(Debug, Clone)]
pub struct BruteForceReport {
    pub block: BdgBlock,
    /// max |𝐇 − 𝐇†| before hermitisation.
    pub hermiticity: f64,
    /// max |𝐇P − P·block|: coupling of k = 0 to other momenta.
    pub mixing: f64,
    /// Largest linear (one-boson) coefficient.
    pub linear: f64,
    /// Largest imaginary part in the k = 0 block.
    pub imaginary: f64,
    /// Largest deviation of the block from the E_A = E_B, ξ_A = ξ_B layout.
    pub layout: f64,
}

pub fn brute_force_block(params: &ValidatedParams, phase: Phase) -> Result<BdgBlock> {
    Ok(brute_force_report(params, phase)?.block)
}

pub fn brute_force_report(params: &ValidatedParams, phase: Phase) -> Result<BruteForceReport> {
    let n = match params.lattice {
        LatticeSpec::Finite(n) => n,
        LatticeSpec::Infinite => {
            return Err(Error::Domain("brute-force oracle needs a finite lattice".into()))
        }
    };
    if n > ORACLE_MAX_SIDE {
        return Err(Error::Size(n));
    }
    let mut q = QuadraticForm::new(n, params.spin);
    let (theta_a, theta_b) = phase.angles();
    let frames = [frame(theta_a), frame(theta_b)];
    let sites = n * n;
    let coord = |i: usize| ((i / n) as i64, (i % n) as i64);

    // Exchange, both orientations of every bond.
    let exchange = -params.j1 * Matrix3::identity();
    for plane in 0..2 {
        let r = frames[plane];
        let c = r.transpose() * exchange * r;
        for i in 0..sites {
            let (x, y) = coord(i);
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let j = torus_index(x + dx, y + dy, n);
                q.pair(plane * sites + i, plane * sites + j, &c);
            }
        }
    }

    // Anisotropy.
    let lab = -params.kz * Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
        - params.kx * Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for plane in 0..2 {
        let r = frames[plane];
        let c = r.transpose() * lab * r;
        for i in 0..sites {
            q.single(plane * sites + i, &c);
        }
    }

    // Dipoles inside each plane (ordered pairs) and between the planes.
    for i in 0..sites {
        let (xi, yi) = coord(i);
        for j in 0..sites {
            let (xj, yj) = coord(j);
            let (dx, dy) = (xj - xi, yj - yi);
            if i != j {
                let t = bond_tensor(params.d, dx, dy, 0.0, n);
                for plane in 0..2 {
                    let r = frames[plane];
                    q.pair(plane * sites + i, plane * sites + j, &(r.transpose() * t * r));
                }
            }
            let t = bond_tensor(params.d, dx, dy, params.separation, n);
            let c = frames[0].transpose() * t * frames[1];
            q.pair(i, sites + j, &c);
        }
    }

    Ok(q.finish(phase))
}

fn torus_index(x: i64, y: i64, n: usize) -> usize {
    let n = n as i64;
    (x.rem_euclid(n) * n + y.rem_euclid(n)) as usize
}

/// Minimum images of one displacement component; a component of exactly
/// n/2 has two images of weight ½.
fn images(d: i64, n: usize) -> Vec<(f64, f64)> {
    let n = n as i64;
    let mut m = d.rem_euclid(n);
    if 2 * m > n {
        m -= n;
    }
    if 2 * m == n {
        vec![(m as f64, 0.5), (-m as f64, 0.5)]
    } else {
        vec![(m as f64, 1.0)]
    }
}

/// D Σ_images w (1/r³ − 3 r rᵀ/r⁵) for one bond.
fn bond_tensor(d: f64, dx: i64, dy: i64, h: f64, n: usize) -> Matrix3<f64> {
    let mut t = Matrix3::zeros();
    for (x, wx) in images(dx, n) {
        for (y, wy) in images(dy, n) {
            let r = nalgebra::Vector3::new(x, y, h);
            let r2 = r.norm_squared();
            let r3 = r2 * r2.sqrt();
            t += wx * wy * d * (Matrix3::identity() / r3 - 3.0 * r * r.transpose() / (r3 * r2));
        }
    }
    t
}

struct QuadraticForm {
    /// Number of boson modes M (both planes).
    modes: usize,
    sites: usize,
    spin: f64,
    h: DMatrix<Complex64>,
    linear: Vec<Complex64>,
    /// Coefficients of s¹, s² on (a, a†).
    coeff: [[Complex64; 2]; 2],
}

impl QuadraticForm {
    fn new(n: usize, spin: f64) -> Self {
        let sites = n * n;
        let modes = 2 * sites;
        let r = (spin / 2.0).sqrt();
        QuadraticForm {
            modes,
            sites,
            spin,
            h: DMatrix::zeros(2 * modes, 2 * modes),
            linear: vec![Complex64::new(0.0, 0.0); 2 * modes],
            coeff: [
                [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
                [Complex64::new(0.0, -r), Complex64::new(0.0, r)],
            ],
        }
    }

    /// Index of mode k's annihilator (kind 0) or creator (kind 1).
    fn op(&self, k: usize, kind: usize) -> usize {
        k + kind * self.modes
    }

    fn dagger(&self, p: usize) -> usize {
        (p + self.modes) % (2 * self.modes)
    }

    fn product(&mut self, p: usize, q: usize, c: Complex64) {
        let row = self.dagger(p);
        self.h[(row, q)] += c;
    }

    fn number(&mut self, k: usize, c: f64) {
        let (cr, an) = (self.op(k, 1), self.op(k, 0));
        self.product(cr, an, Complex64::new(c, 0.0));
    }

    /// sᵢᵀ C sⱼ for a bond between different modes i ≠ j.
    fn pair(&mut self, i: usize, j: usize, c: &Matrix3<f64>) {
        let s = self.spin;
        for alpha in 0..2 {
            for beta in 0..2 {
                for ki in 0..2 {
                    for kj in 0..2 {
                        let v = c[(alpha, beta)] * self.coeff[alpha][ki] * self.coeff[beta][kj];
                        let (p, q) = (self.op(i, ki), self.op(j, kj));
                        self.product(p, q, v);
                    }
                }
            }
            for k in 0..2 {
                let (pi, pj) = (self.op(i, k), self.op(j, k));
                self.linear[pi] += s * c[(alpha, 2)] * self.coeff[alpha][k];
                self.linear[pj] += s * c[(2, alpha)] * self.coeff[alpha][k];
            }
        }
        self.number(i, -s * c[(2, 2)]);
        self.number(j, -s * c[(2, 2)]);
    }

    /// sᵀ C s on one site.
    fn single(&mut self, i: usize, c: &Matrix3<f64>) {
        let s = self.spin;
        for alpha in 0..2 {
            for beta in 0..2 {
                for ki in 0..2 {
                    for kj in 0..2 {
                        let v = c[(alpha, beta)] * self.coeff[alpha][ki] * self.coeff[beta][kj];
                        let (p, q) = (self.op(i, ki), self.op(i, kj));
                        self.product(p, q, v);
                    }
                }
            }
            for k in 0..2 {
                let p = self.op(i, k);
                self.linear[p] += s * (c[(alpha, 2)] + c[(2, alpha)]) * self.coeff[alpha][k];
            }
        }
        // s³s³ = S² − 2S a†a + O(a⁴).
        self.number(i, -2.0 * s * c[(2, 2)]);
    }

    fn finish(self, phase: Phase) -> BruteForceReport {
        let dim = 2 * self.modes;
        let h = &self.h;
        let full = DMatrix::from_fn(dim, dim, |a, b| {
            h[(a, b)] + h[(self.dagger(b), self.dagger(a))]
        });
        let adjoint = full.adjoint();
        let hermiticity = (&full - &adjoint).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let full = (&full + &adjoint) * Complex64::new(0.5, 0.0);

        // Uniform vectors over (a_A, a_B, a_A†, a_B†).
        let sites = self.sites;
        let group = |p: usize| p / sites;
        let norm = 1.0 / (sites as f64).sqrt();
        let mut hp = DMatrix::<Complex64>::zeros(dim, 4);
        for p in 0..dim {
            for q in 0..dim {
                hp[(p, group(q))] += full[(p, q)] * norm;
            }
        }
        let mut block = [[Complex64::new(0.0, 0.0); 4]; 4];
        for p in 0..dim {
            for c in 0..4 {
                block[group(p)][c] += hp[(p, c)] * norm;
            }
        }
        let mut mixing: f64 = 0.0;
        for p in 0..dim {
            for c in 0..4 {
                mixing = mixing.max((hp[(p, c)] - block[group(p)][c] * norm).norm());
            }
        }
        let imaginary = block.iter().flatten().fold(0.0, |m: f64, z| m.max(z.im.abs()));
        let linear = self.linear.iter().fold(0.0, |m: f64, z| m.max(z.norm()));

        let re = |r: usize, c: usize| block[r][c].re;
        let out = BdgBlock {
            e: re(0, 0),
            mu1: re(0, 1),
            mu2: re(0, 3),
            xi: re(0, 2) / 2.0,
            phase,
        };
        let expected = out.matrix();
        let mut layout: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                layout = layout.max((re(r, c) - expected[(r, c)]).abs());
            }
        }
        BruteForceReport {
            block: out,
            hermiticity,
            mixing,
            linear,
            imaginary,
            layout,
        }
    }
}
