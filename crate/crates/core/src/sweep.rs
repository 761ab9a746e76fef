//! Separation sweeps and the phase-diagram scan, written as CSV.
//!
//! Points are independent and run on the current rayon pool; results come
//! back in grid order. A point that fails after the lattice sums keeps its
//! row with a status flag and `nan` in every field it could not compute.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bogoliubov::{analytic_bogoliubov, eigenenergies};
use crate::classical::{boundary_residual, phase_boundary_in, BOUNDARY_BRACKET, BOUNDARY_TOL};
use crate::dipole::{plane_sum, DipoleSums, LatticeSum, DEFAULT_REL_TOL};
use crate::entanglement::{
    covariance_from_bogoliubov, eta_minus_analytic, eta_minus_numeric, log_negativity,
};
use crate::error::{Error, Result};
use crate::params::{LatticeSpec, ModelParams, Phase, ValidatedParams};
use crate::spinwave::{bdg_block, eps_tilde};
use crate::squeezing::extract;

pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LGrid {
    Points(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        count: usize,
        spacing: Spacing,
    },
}

impl LGrid {
    /// 201 logarithmic points on [0.05, 5] for infinite planes, [0.05, 600]
    /// for finite ones.
    pub fn default_for(lattice: LatticeSpec) -> Self {
        let max = match lattice {
            LatticeSpec::Infinite => 5.0,
            LatticeSpec::Finite(_) => 600.0,
        };
        LGrid::Range {
            min: 0.05,
            max,
            count: 201,
            spacing: Spacing::Log,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            LGrid::Points(p) => p.clone(),
            &LGrid::Range {
                min,
                max,
                count,
                spacing,
            } => {
                if count == 0 || count > MAX_GRID_POINTS {
                    return Err(Error::Domain(format!(
                        "grid count must lie in 1..={MAX_GRID_POINTS}, got {count}"
                    )));
                }
                if count == 1 {
                    vec![min]
                } else {
                    let step = 1.0 / (count - 1) as f64;
                    (0..count)
                        .map(|i| {
                            let t = i as f64 * step;
                            match spacing {
                                Spacing::Linear => min + (max - min) * t,
                                Spacing::Log => (min.ln() + (max.ln() - min.ln()) * t).exp(),
                            }
                        })
                        .collect()
                }
            }
        };
        check_grid(&v, "l grid")?;
        if v.iter().any(|&l| l.is_nan() || l <= 0.0) {
            return Err(Error::Domain("separations must be positive".into()));
        }
        Ok(v)
    }
}

fn check_grid(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Domain(format!("{what} is empty")));
    }
    if v.len() > MAX_GRID_POINTS {
        return Err(Error::Domain(format!("{what} has more than {MAX_GRID_POINTS} points")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("{what} contains non-finite values")));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    PhaseDiagram,
    Energies,
    BogoliubovElements,
    SqueezingParams,
    Entanglement,
}

impl Output {
    pub const SWEEP: [Output; 4] = [
        Output::Energies,
        Output::BogoliubovElements,
        Output::SqueezingParams,
        Output::Entanglement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::PhaseDiagram => "phase_diagram",
            Output::Energies => "energies",
            Output::BogoliubovElements => "bogoliubov_elements",
            Output::SqueezingParams => "squeezing_params",
            Output::Entanglement => "entanglement",
        }
    }

    pub fn from_name(s: &str) -> Result<Output> {
        [
            Output::PhaseDiagram,
            Output::Energies,
            Output::BogoliubovElements,
            Output::SqueezingParams,
            Output::Entanglement,
        ]
        .into_iter()
        .find(|o| o.name() == s)
        .ok_or_else(|| Error::Domain(format!("unknown output `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// The separation stored here is ignored.
    pub params: ModelParams,
    pub l_grid: LGrid,
    /// D/K_z values for the phase diagram.
    pub d_grid: Option<Vec<f64>>,
    pub outputs: Vec<Output>,
    pub out_dir: Option<PathBuf>,
    pub rel_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let params = ModelParams::reference();
        SweepConfig {
            l_grid: LGrid::default_for(params.lattice),
            params,
            d_grid: None,
            outputs: Output::SWEEP.to_vec(),
            out_dir: None,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

impl SweepConfig {
    pub fn for_lattice(lattice: LatticeSpec) -> Self {
        SweepConfig {
            params: ModelParams::reference().with_lattice(lattice),
            l_grid: LGrid::default_for(lattice),
            ..SweepConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(ValidatedParams, Vec<f64>)> {
        let l = self.l_grid.values()?;
        let params = self.params.with_separation(l[0]).validate()?;
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::Domain(format!("rel_tol must lie in (0, 1e-2], got {}", self.rel_tol)));
        }
        if let Some(d) = &self.d_grid {
            check_grid(d, "d grid")?;
            if d.iter().any(|&x| x < 0.0) {
                return Err(Error::Domain("D/K_z values must be non-negative".into()));
            }
        }
        if self.outputs.is_empty() {
            return Err(Error::Domain("no outputs requested".into()));
        }
        Ok((params, l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A mode energy is below the gap tolerance (at or next to l*).
    Gapless,
    /// A squared mode energy is negative.
    Unstable,
    /// The squeezing decomposition or covariance step failed.
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "Ok",
            Status::Gapless => "Gapless",
            Status::Unstable => "Unstable",
            Status::Failed => "Failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub l: f64,
    pub phase: Phase,
    pub eps_alpha: f64,
    pub eps_beta: f64,
    pub eps_tilde: f64,
    pub u: [f64; 4],
    pub v: [f64; 4],
    pub theta: [f64; 4],
    pub theta_sq: f64,
    /// Analytic route.
    pub eta_minus: f64,
    /// Covariance route.
    pub eta_minus_numeric: f64,
    pub e_n: f64,
    pub status: Status,
}

impl SweepRecord {
    fn empty(l: f64, phase: Phase, eps_tilde: f64, status: Status) -> Self {
        let nan = f64::NAN;
        SweepRecord {
            l,
            phase,
            eps_alpha: nan,
            eps_beta: nan,
            eps_tilde,
            u: [nan; 4],
            v: [nan; 4],
            theta: [nan; 4],
            theta_sq: nan,
            eta_minus: nan,
            eta_minus_numeric: nan,
            e_n: nan,
            status,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub eps_tilde: f64,
    pub files: Vec<PathBuf>,
}

/// One grid point. Lattice-sum failures propagate; everything after them
/// becomes a status flag.
pub fn sweep_point(
    params: &ValidatedParams,
    intra: &LatticeSum,
    eps_tilde: f64,
    l: f64,
    rel_tol: f64,
) -> Result<SweepRecord> {
    let params = params.at_separation(l)?;
    let sums = DipoleSums::with_intra(intra, l, params.lattice, rel_tol)?;
    let residual = boundary_residual(&params, &sums);
    let phase = if residual >= 0.0 {
        Phase::OopFm
    } else {
        Phase::IpAfm
    };
    let mut rec = SweepRecord::empty(l, phase, eps_tilde, Status::Ok);
    let block = bdg_block(&params, phase, &sums)?;
    match eigenenergies(&block) {
        Ok((a, b)) => {
            rec.eps_alpha = a;
            rec.eps_beta = b;
        }
        Err(_) => {
            rec.status = Status::Unstable;
            return Ok(rec);
        }
    }
    if residual.abs() < BOUNDARY_TOL {
        rec.status = Status::Gapless;
        return Ok(rec);
    }
    let decomp = match analytic_bogoliubov(&block) {
        Ok(d) => d,
        Err(Error::Gapless(_)) => {
            rec.status = Status::Gapless;
            return Ok(rec);
        }
        Err(_) => {
            rec.status = Status::Unstable;
            return Ok(rec);
        }
    };
    rec.u = decomp.u_elements();
    rec.v = decomp.v_elements();
    let Ok(theta) = extract(&decomp) else {
        rec.status = Status::Failed;
        return Ok(rec);
    };
    rec.theta = theta.as_array();
    rec.theta_sq = theta.theta_sq;
    rec.eta_minus = eta_minus_analytic(&theta);
    rec.e_n = log_negativity(rec.eta_minus)?;
    match eta_minus_numeric(&covariance_from_bogoliubov(&decomp)) {
        Ok(eta) => rec.eta_minus_numeric = eta,
        Err(_) => rec.status = Status::Failed,
    }
    Ok(rec)
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    let (params, grid) = config.validate()?;
    let intra = plane_sum(0.0, params.lattice, config.rel_tol)?;
    let flat = DipoleSums::decoupled(&intra);
    let eps0 = eps_tilde(&params, &flat)?;
    let records = grid
        .par_iter()
        .map(|&l| sweep_point(&params, &intra, eps0, l, config.rel_tol))
        .collect::<Result<Vec<_>>>()?;

    let mut files = Vec::new();
    if let Some(dir) = &config.out_dir {
        fs::create_dir_all(dir).map_err(io_error)?;
        for &out in &config.outputs {
            if out == Output::PhaseDiagram {
                continue;
            }
            let path = dir.join(format!("{}.csv", out.name()));
            write_file(&path, &sweep_csv(out, &records))?;
            files.push(path);
        }
    }
    Ok(SweepOutput {
        records,
        eps_tilde: eps0,
        files,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDiagramRow {
    pub d_over_kz: f64,
    pub l_star: Option<f64>,
    /// Row of the configured D (the fixed-D trajectory of the sweep).
    pub trajectory: bool,
}

pub fn run_phase_diagram(config: &SweepConfig) -> Result<Vec<PhaseDiagramRow>> {
    let (params, _) = config.validate()?;
    let d_grid = config
        .d_grid
        .as_ref()
        .ok_or_else(|| Error::Domain("phase diagram needs a d grid".into()))?;
    let reference = params.d / params.kz;
    let mut ratios = d_grid.clone();
    if !ratios.contains(&reference) {
        ratios.push(reference);
        ratios.sort_by(f64::total_cmp);
    }
    let intra = plane_sum(0.0, params.lattice, config.rel_tol)?;
    let (lo, hi) = BOUNDARY_BRACKET;
    let rows = ratios
        .par_iter()
        .map(|&ratio| {
            let p = params.into_inner().with_d(ratio * params.kz).validate()?;
            let l_star = match phase_boundary_in(&p, &intra, lo, hi, config.rel_tol) {
                Ok(l) => Some(l),
                Err(Error::NoBoundary { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(PhaseDiagramRow {
                d_over_kz: ratio,
                l_star,
                trajectory: ratio == reference,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    if let Some(dir) = &config.out_dir {
        fs::create_dir_all(dir).map_err(io_error)?;
        let mut s = String::from("d_over_kz,d,l_star,trajectory\n");
        for r in &rows {
            let l = r.l_star.map_or_else(|| "none".to_string(), num);
            let _ = writeln!(
                s,
                "{},{},{},{}",
                num(r.d_over_kz),
                num(r.d_over_kz * params.kz),
                l,
                u8::from(r.trajectory)
            );
        }
        write_file(&dir.join("phase_diagram.csv"), &s)?;
    }
    Ok(rows)
}

/// 17 significant digits, `nan` for missing values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn sweep_csv(out: Output, records: &[SweepRecord]) -> String {
    let header = match out {
        Output::Energies => {
            "l,phase,eps_alpha,eps_beta,eps_tilde,eps_alpha_norm,eps_beta_norm,status"
        }
        Output::BogoliubovElements => "l,phase,u1,u2,u3,u4,v1,v2,v3,v4,status",
        Output::SqueezingParams => "l,phase,theta1,theta2,theta3,theta4,theta_sq,status",
        Output::Entanglement => "l,phase,eta_minus,eta_minus_numeric,e_n,status",
        Output::PhaseDiagram => unreachable!("phase diagram has its own writer"),
    };
    let mut s = String::with_capacity(records.len() * 200);
    s.push_str(header);
    s.push('\n');
    for r in records {
        let fields: Vec<f64> = match out {
            Output::Energies => vec![
                r.eps_alpha,
                r.eps_beta,
                r.eps_tilde,
                r.eps_alpha / r.eps_tilde,
                r.eps_beta / r.eps_tilde,
            ],
            Output::BogoliubovElements => r.u.iter().chain(&r.v).copied().collect(),
            Output::SqueezingParams => {
                let mut v = r.theta.to_vec();
                v.push(r.theta_sq);
                v
            }
            Output::Entanglement => vec![r.eta_minus, r.eta_minus_numeric, r.e_n],
            Output::PhaseDiagram => unreachable!(),
        };
        s.push_str(&num(r.l));
        s.push(',');
        s.push_str(r.phase.as_str());
        for f in fields {
            s.push(',');
            s.push_str(&num(f));
        }
        s.push(',');
        s.push_str(r.status.as_str());
        s.push('\n');
    }
    s
}

fn io_error(e: std::io::Error) -> Error {
    Error::Domain(format!("output directory: {e}"))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))
}
