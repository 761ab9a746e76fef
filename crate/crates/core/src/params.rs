//! Model parameters and conventions.
//!
//! Units: ħ = a = 1 and every coupling is an energy, normally quoted in units
//! of the exchange J₁. The dipole strength `d` is the prefactor of
//! `d / |r|³` and is shared by the intra- and inter-plane interaction.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::error::{Error, Result};

/// Extent of each square-lattice ferromagnet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeSpec {
    Infinite,
    /// `n × n` sites with periodic boundary conditions.
    Finite(usize),
}

impl LatticeSpec {
    pub fn validate(self) -> Result<Self> {
        match self {
            LatticeSpec::Finite(n) if n < 2 => Err(Error::Domain(format!(
                "finite lattice side must be at least 2, got {n}"
            ))),
            other => Ok(other),
        }
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeSpec::Infinite => write!(f, "infinite"),
            LatticeSpec::Finite(n) => write!(f, "finite:{n}"),
        }
    }
}

impl std::str::FromStr for LatticeSpec {
    type Err = Error;

    /// Accepts `infinite`, `finite:N`, `NxN` or a bare side length `N`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "infinite" || t == "inf" {
            return Ok(LatticeSpec::Infinite);
        }
        let side = t
            .strip_prefix("finite:")
            .or_else(|| t.split_once('x').map(|(a, _)| a))
            .unwrap_or(&t);
        let n: usize = side
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("unrecognised lattice `{s}`")))?;
        LatticeSpec::Finite(n).validate()
    }
}

/// Relative orientation of the two ferromagnets in the classical ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Both magnetisations along +z.
    OopFm,
    /// A along +x, B along −x.
    IpAfm,
}

impl Phase {
    /// Tilt angles (ϑ_A, ϑ_B) from the z axis in the x–z plane.
    pub fn angles(self) -> (f64, f64) {
        match self {
            Phase::OopFm => (0.0, 0.0),
            Phase::IpAfm => (FRAC_PI_2, -FRAC_PI_2),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::OopFm => "OopFm",
            Phase::IpAfm => "IpAfm",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Nearest-neighbour ferromagnetic exchange J₁ > 0.
    pub j1: f64,
    /// Easy-axis (z) anisotropy.
    pub kz: f64,
    /// Secondary in-plane (x) anisotropy, 0 < kx < kz.
    pub kx: f64,
    /// Dipole strength D ≥ 0.
    pub d: f64,
    /// Spin length S.
    pub spin: f64,
    /// Plane separation l.
    pub separation: f64,
    pub lattice: LatticeSpec,
}

impl ModelParams {
    /// D = 0.5·10⁻⁴, K_z = 10⁻⁴, K_x = 10⁻⁶ (units of J₁), S = 1, infinite
    /// planes at l = 0.5.
    pub fn reference() -> Self {
        ModelParams {
            j1: 1.0,
            kz: 1e-4,
            kx: 1e-6,
            d: 0.5e-4,
            spin: 1.0,
            separation: 0.5,
            lattice: LatticeSpec::Infinite,
        }
    }

    pub fn with_separation(mut self, l: f64) -> Self {
        self.separation = l;
        self
    }

    pub fn with_lattice(mut self, lattice: LatticeSpec) -> Self {
        self.lattice = lattice;
        self
    }

    pub fn with_d(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    pub fn validate(self) -> Result<ValidatedParams> {
        validate(self)
    }
}

/// Parameters that passed [`validate`]; the only way to build one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedParams(ModelParams);

impl ValidatedParams {
    pub fn get(&self) -> &ModelParams {
        &self.0
    }

    pub fn into_inner(self) -> ModelParams {
        self.0
    }

    pub fn lattice(&self) -> LatticeSpec {
        self.0.lattice
    }

    pub fn separation(&self) -> f64 {
        self.0.separation
    }

    /// Same parameters at a different separation.
    pub fn at_separation(&self, l: f64) -> Result<ValidatedParams> {
        validate(self.0.with_separation(l))
    }
}

impl std::ops::Deref for ValidatedParams {
    type Target = ModelParams;

    fn deref(&self) -> &ModelParams {
        &self.0
    }
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(what.to_string()))
    }
}

pub fn validate(params: ModelParams) -> Result<ValidatedParams> {
    let p = &params;
    let all_finite = [p.j1, p.kz, p.kx, p.d, p.spin, p.separation]
        .iter()
        .all(|v| v.is_finite());
    require(all_finite, "all parameters must be finite")?;
    require(p.j1 > 0.0, "j1 must be positive")?;
    require(p.kx > 0.0, "kx must be positive")?;
    require(p.kz > p.kx, "kz must exceed kx")?;
    require(p.d >= 0.0, "d must be non-negative")?;
    require(p.spin > 0.0, "spin length must be positive")?;
    require(p.separation > 0.0, "separation must be positive")?;
    p.lattice.validate()?;
    Ok(ValidatedParams(params))
}
