//! Dipolar lattice sums over a square lattice.
//!
//! For a plane offset by `h` along z (h = 0 for the plane itself) the sums are
//!
//! ```text
//! Iso    = Σ 1/r³          Dir(α) = Σ α²/r⁵        Cross = Σ x·h/r⁵
//! ```
//!
//! over in-plane displacements (x, y), r² = x² + y² + h². The origin is
//! skipped only when h = 0. Values are pure geometry; callers multiply by D.
//!
//! Infinite lattices use a square cutoff of half-width N, the exterior
//! integral outside the square of half-width N + ½, and the leading
//! midpoint-rule correction (1/24)∮∇f·n̂ on that square. The error falls as
//! N⁻⁵; the half-width doubles until successive estimates agree to the
//! requested relative tolerance.
//!
//! Finite `n × n` lattices are tori. Displacements use the minimum image; for
//! even `n` a component of exactly ±n/2 has two equally close images and each
//! gets weight ½. [`DisplacementSet::OpenBoundary`] gives the k = 0 average
//! for an isolated flake instead.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::params::LatticeSpec;

pub const DEFAULT_REL_TOL: f64 = 1e-10;

const START_HALF_WIDTH: usize = 16;
const MAX_HALF_WIDTH: usize = 4096;
const QUADRATURE_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumKind {
    Iso,
    Dir(Axis),
    /// x·z weight; zero by symmetry, computed as a geometry check.
    Cross,
}

impl SumKind {
    pub const ALL: [SumKind; 5] = [
        SumKind::Iso,
        SumKind::Dir(Axis::X),
        SumKind::Dir(Axis::Y),
        SumKind::Dir(Axis::Z),
        SumKind::Cross,
    ];
}

/// All five weighted sums for one plane.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub iso: f64,
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xz: f64,
}

impl Moments {
    pub fn get(&self, kind: SumKind) -> f64 {
        match kind {
            SumKind::Iso => self.iso,
            SumKind::Dir(Axis::X) => self.xx,
            SumKind::Dir(Axis::Y) => self.yy,
            SumKind::Dir(Axis::Z) => self.zz,
            SumKind::Cross => self.xz,
        }
    }

    fn add(&mut self, o: &Moments) {
        self.iso += o.iso;
        self.xx += o.xx;
        self.yy += o.yy;
        self.zz += o.zz;
        self.xz += o.xz;
    }

    fn plus(mut self, o: &Moments) -> Moments {
        self.add(o);
        self
    }

    fn max_abs_diff(&self, o: &Moments) -> f64 {
        [
            self.iso - o.iso,
            self.xx - o.xx,
            self.yy - o.yy,
            self.zz - o.zz,
            self.xz - o.xz,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }

    #[inline]
    fn accumulate(&mut self, weight: f64, x: f64, y: f64, h: f64) {
        let u = x * x + y * y + h * h;
        let inv_r3 = weight / (u * u.sqrt());
        let inv_r5 = inv_r3 / u;
        self.iso += inv_r3;
        self.xx += x * x * inv_r5;
        self.yy += y * y * inv_r5;
        self.zz += h * h * inv_r5;
        self.xz += x * h * inv_r5;
    }
}

/// Convergence bookkeeping of an infinite-lattice sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumMeta {
    /// Final square half-width; `None` for exact finite sums.
    pub cutoff: Option<usize>,
    /// Estimated absolute remainder (largest over the five kinds).
    pub remainder: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSum {
    pub moments: Moments,
    pub meta: SumMeta,
}

/// Which displacement set a finite lattice sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisplacementSet {
    /// Torus, one (possibly split) image per displacement.
    MinimumImage,
    /// Open n × n flake, k = 0 average: weight (n − |m|)(n − |k|)/n².
    OpenBoundary,
}

/// Intra- and inter-plane sums for one geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSums {
    pub intra: Moments,
    pub inter: Moments,
    /// `f64::INFINITY` for decoupled planes.
    pub separation: f64,
    pub intra_meta: SumMeta,
    pub inter_meta: SumMeta,
}

impl DipoleSums {
    pub fn compute(l: f64, lattice: LatticeSpec, rel_tol: f64) -> Result<DipoleSums> {
        let intra = plane_sum(0.0, lattice, rel_tol)?;
        DipoleSums::with_intra(&intra, l, lattice, rel_tol)
    }

    /// Reuses an already computed intra-plane sum (it does not depend on l).
    pub fn with_intra(
        intra: &LatticeSum,
        l: f64,
        lattice: LatticeSpec,
        rel_tol: f64,
    ) -> Result<DipoleSums> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Domain(format!("separation must be positive, got {l}")));
        }
        let inter = plane_sum(l, lattice, rel_tol)?;
        Ok(DipoleSums {
            intra: intra.moments,
            inter: inter.moments,
            separation: l,
            intra_meta: intra.meta,
            inter_meta: inter.meta,
        })
    }

    /// Planes infinitely far apart: inter sums vanish.
    pub fn decoupled(intra: &LatticeSum) -> DipoleSums {
        DipoleSums {
            intra: intra.moments,
            inter: Moments::default(),
            separation: f64::INFINITY,
            intra_meta: intra.meta,
            inter_meta: SumMeta {
                cutoff: None,
                remainder: 0.0,
            },
        }
    }

    pub fn intra(&self, kind: SumKind) -> f64 {
        self.intra.get(kind)
    }

    pub fn inter(&self, kind: SumKind) -> f64 {
        self.inter.get(kind)
    }
}

pub fn intra_sum(kind: SumKind, lattice: LatticeSpec, rel_tol: f64) -> Result<f64> {
    Ok(plane_sum(0.0, lattice, rel_tol)?.moments.get(kind))
}

pub fn inter_sum(kind: SumKind, l: f64, lattice: LatticeSpec, rel_tol: f64) -> Result<f64> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Domain(format!("separation must be positive, got {l}")));
    }
    Ok(plane_sum(l, lattice, rel_tol)?.moments.get(kind))
}

/// All moments for a plane at height `h` (0 = same plane).
pub fn plane_sum(h: f64, lattice: LatticeSpec, rel_tol: f64) -> Result<LatticeSum> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
        return Err(Error::Domain(format!(
            "rel_tol must lie in (0, 1e-2], got {rel_tol}"
        )));
    }
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("plane height must be finite and >= 0, got {h}")));
    }
    match lattice.validate()? {
        LatticeSpec::Finite(n) => Ok(LatticeSum {
            moments: finite_moments(n, h, DisplacementSet::MinimumImage),
            meta: SumMeta {
                cutoff: None,
                remainder: 0.0,
            },
        }),
        LatticeSpec::Infinite => infinite_moments(h, rel_tol, MAX_HALF_WIDTH),
    }
}

fn infinite_moments(h: f64, rel_tol: f64, max_half: usize) -> Result<LatticeSum> {
    let mut half = START_HALF_WIDTH.max((2.0 * h).ceil() as usize);
    let mut direct = square_moments(h, half);
    let mut previous = direct.plus(&tail_moments(h, half));
    loop {
        let next = 2 * half;
        direct.add(&ring_moments(h, half, next));
        half = next;
        let total = direct.plus(&tail_moments(h, half));
        let remainder = total.max_abs_diff(&previous);
        let target = rel_tol * total.iso.abs();
        if remainder <= target {
            return Ok(LatticeSum {
                moments: total,
                meta: SumMeta {
                    cutoff: Some(half),
                    remainder,
                },
            });
        }
        if half >= max_half {
            return Err(Error::Convergence {
                cutoff: half,
                remainder,
                target,
            });
        }
        previous = total;
    }
}

fn square_moments(h: f64, half: usize) -> Moments {
    let n = half as i64;
    let mut acc = Moments::default();
    for m in -n..=n {
        for k in -n..=n {
            if h == 0.0 && m == 0 && k == 0 {
                continue;
            }
            acc.accumulate(1.0, m as f64, k as f64, h);
        }
    }
    acc
}

/// Points with `inner < max(|m|, |k|) <= outer`.
fn ring_moments(h: f64, inner: usize, outer: usize) -> Moments {
    let (a, b) = (inner as i64, outer as i64);
    let mut acc = Moments::default();
    for m in -b..=b {
        if m.abs() > a {
            for k in -b..=b {
                acc.accumulate(1.0, m as f64, k as f64, h);
            }
        } else {
            for k in (-b..-a).chain(a + 1..=b) {
                acc.accumulate(1.0, m as f64, k as f64, h);
            }
        }
    }
    acc
}

/// Exterior integral plus boundary-flux correction for the square of
/// half-width `half + ½`.
fn tail_moments(h: f64, half: usize) -> Moments {
    let edge = half as f64 + 0.5;
    let (nodes, weights) = gauss_legendre();
    let h2 = h * h;
    let mut acc = Moments::default();

    // ∫ f dA outside the square, in polar coordinates sector by sector.
    for sector in 0..4 {
        let centre = sector as f64 * FRAC_PI_2;
        for (t, w) in nodes.iter().zip(weights) {
            let offset = t * FRAC_PI_4;
            let w = w * FRAC_PI_4;
            let phi = centre + offset;
            let r = edge / offset.cos();
            let u = r * r + h2;
            let inv_sqrt_u = 1.0 / u.sqrt();
            let inv_u32 = inv_sqrt_u / u;
            let radial_dir = inv_sqrt_u - h2 / 3.0 * inv_u32;
            let (s, c) = phi.sin_cos();
            acc.iso += w * inv_sqrt_u;
            acc.xx += w * c * c * radial_dir;
            acc.yy += w * s * s * radial_dir;
            acc.zz += w * h2 / 3.0 * inv_u32;
            if h > 0.0 {
                // (1 − R³/U^{3/2}) / (3h), written to avoid cancellation.
                let ratio = -(-1.5 * (h2 / (r * r)).ln_1p()).exp_m1();
                acc.xz += w * c * ratio / (3.0 * h);
            }
        }
    }

    // (1/24) ∮ ∇f·n̂ ds along the four edges.
    let mut flux = Moments::default();
    for (t, w) in nodes.iter().zip(weights) {
        let along = t * edge;
        let w = w * edge;
        for sign in [1.0, -1.0] {
            let fixed = sign * edge;
            // Vertical edges x = ±L: outward normal ±x̂.
            let g = gradient(fixed, along, h).0;
            flux.iso += sign * w * g.iso;
            flux.xx += sign * w * g.xx;
            flux.yy += sign * w * g.yy;
            flux.zz += sign * w * g.zz;
            flux.xz += sign * w * g.xz;
            // Horizontal edges y = ±L: outward normal ±ŷ.
            let g = gradient(along, fixed, h).1;
            flux.iso += sign * w * g.iso;
            flux.xx += sign * w * g.xx;
            flux.yy += sign * w * g.yy;
            flux.zz += sign * w * g.zz;
            flux.xz += sign * w * g.xz;
        }
    }
    acc.iso += flux.iso / 24.0;
    acc.xx += flux.xx / 24.0;
    acc.yy += flux.yy / 24.0;
    acc.zz += flux.zz / 24.0;
    acc.xz += flux.xz / 24.0;
    acc
}

/// (∂/∂x, ∂/∂y) of every weight function at (x, y, h).
fn gradient(x: f64, y: f64, h: f64) -> (Moments, Moments) {
    let u = x * x + y * y + h * h;
    let u52 = 1.0 / (u * u * u.sqrt());
    let u72 = u52 / u;
    let dx = Moments {
        iso: -3.0 * x * u52,
        xx: 2.0 * x * u52 - 5.0 * x * x * x * u72,
        yy: -5.0 * x * y * y * u72,
        zz: -5.0 * h * h * x * u72,
        xz: h * u52 - 5.0 * h * x * x * u72,
    };
    let dy = Moments {
        iso: -3.0 * y * u52,
        xx: -5.0 * x * x * y * u72,
        yy: 2.0 * y * u52 - 5.0 * y * y * y * u72,
        zz: -5.0 * h * h * y * u72,
        xz: -5.0 * h * x * y * u72,
    };
    (dx, dy)
}

/// Component offsets and weights of the displacement set along one axis.
pub fn displacement_weights(n: usize, set: DisplacementSet) -> Vec<(i64, f64)> {
    let n = n as i64;
    match set {
        DisplacementSet::MinimumImage => {
            let half = n / 2;
            if n % 2 == 1 {
                (-half..=half).map(|m| (m, 1.0)).collect()
            } else {
                (-half..=half)
                    .map(|m| (m, if m.abs() == half { 0.5 } else { 1.0 }))
                    .collect()
            }
        }
        DisplacementSet::OpenBoundary => (-(n - 1)..n)
            .map(|m| (m, (n - m.abs()) as f64 / n as f64))
            .collect(),
    }
}

pub fn finite_moments(n: usize, h: f64, set: DisplacementSet) -> Moments {
    let offsets = displacement_weights(n, set);
    let mut acc = Moments::default();
    for &(m, wm) in &offsets {
        for &(k, wk) in &offsets {
            if h == 0.0 && m == 0 && k == 0 {
                continue;
            }
            acc.accumulate(wm * wk, m as f64, k as f64, h);
        }
    }
    acc
}

fn gauss_legendre() -> (&'static [f64], &'static [f64]) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = RULE.get_or_init(|| legendre_rule(QUADRATURE_NODES));
    (x, w)
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub(crate) fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
