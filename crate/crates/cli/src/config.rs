//! TOML run description.
//!
//! ```toml
//! outputs = ["energies", "entanglement", "phase_diagram"]
//! out_dir = "out"
//! rel_tol = 1e-10
//! d_grid = [0.0, 0.25, 0.5, 1.0]
//!
//! [params]
//! j1 = 1.0
//! kz = 1e-4
//! kx = 1e-6
//! d = 0.5e-4
//! spin = 1.0
//! lattice = "infinite"
//!
//! [l_grid]
//! min = 0.05
//! max = 5.0
//! count = 201
//! spacing = "log"
//! ```
//!
//! `[l_grid]` may instead hold `points = [...]`. Every key is optional.

use std::path::PathBuf;

use serde::Deserialize;

use dipmag::sweep::{LGrid, Output, Spacing, SweepConfig};
use dipmag::{Error, LatticeSpec, ModelParams, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub params: ParamsSection,
    pub l_grid: Option<GridSection>,
    pub d_grid: Option<Vec<f64>>,
    pub outputs: Option<Vec<String>>,
    pub out_dir: Option<PathBuf>,
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub j1: Option<f64>,
    pub kz: Option<f64>,
    pub kx: Option<f64>,
    pub d: Option<f64>,
    pub spin: Option<f64>,
    pub lattice: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub points: Option<Vec<f64>>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<String>,
}

/// Flag values that take precedence over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub lattice: Option<String>,
    pub l_min: Option<f64>,
    pub l_max: Option<f64>,
    pub l_count: Option<usize>,
    pub spacing: Option<String>,
    pub tol: Option<f64>,
    pub outputs: Option<Vec<String>>,
}

pub fn parse(text: &str) -> Result<FileConfig> {
    toml::from_str(text).map_err(|e| Error::Domain(format!("config: {}", e.message())))
}

fn spacing(s: &str) -> Result<Spacing> {
    match s.to_ascii_lowercase().as_str() {
        "log" => Ok(Spacing::Log),
        "linear" | "lin" => Ok(Spacing::Linear),
        _ => Err(Error::Domain(format!("unknown spacing `{s}`"))),
    }
}

impl FileConfig {
    pub fn resolve(self, flags: &Overrides) -> Result<SweepConfig> {
        let mut params = ModelParams::reference();
        let p = &self.params;
        params.j1 = p.j1.unwrap_or(params.j1);
        params.kz = p.kz.unwrap_or(params.kz);
        params.kx = p.kx.unwrap_or(params.kx);
        params.d = p.d.unwrap_or(params.d);
        params.spin = p.spin.unwrap_or(params.spin);
        if let Some(l) = flags.lattice.as_ref().or(p.lattice.as_ref()) {
            params.lattice = l.parse::<LatticeSpec>()?;
        }

        let mut grid = self.l_grid.unwrap_or_default();
        let ranged = flags.l_min.is_some()
            || flags.l_max.is_some()
            || flags.l_count.is_some()
            || flags.spacing.is_some();
        if ranged {
            grid.points = None;
        }
        let l_grid = match grid.points {
            Some(points) => {
                if grid.min.is_some() || grid.max.is_some() || grid.count.is_some() {
                    return Err(Error::Domain(
                        "l_grid takes either points or min/max/count".into(),
                    ));
                }
                LGrid::Points(points)
            }
            None => {
                let LGrid::Range {
                    min,
                    max,
                    count,
                    spacing: default_spacing,
                } = LGrid::default_for(params.lattice)
                else {
                    unreachable!("default grids are ranges")
                };
                LGrid::Range {
                    min: flags.l_min.or(grid.min).unwrap_or(min),
                    max: flags.l_max.or(grid.max).unwrap_or(max),
                    count: flags.l_count.or(grid.count).unwrap_or(count),
                    spacing: match flags.spacing.as_ref().or(grid.spacing.as_ref()) {
                        Some(s) => spacing(s)?,
                        None => default_spacing,
                    },
                }
            }
        };

        let outputs = match flags.outputs.clone().or(self.outputs) {
            Some(names) => {
                let mut v = names
                    .iter()
                    .map(|n| Output::from_name(n.trim()))
                    .collect::<Result<Vec<_>>>()?;
                v.sort();
                v.dedup();
                v
            }
            None => Output::SWEEP.to_vec(),
        };

        let config = SweepConfig {
            params,
            l_grid,
            d_grid: self.d_grid,
            outputs,
            out_dir: Some(
                flags
                    .out_dir
                    .clone()
                    .or(self.out_dir)
                    .unwrap_or_else(|| PathBuf::from("out")),
            ),
            rel_tol: flags.tol.or(self.rel_tol).unwrap_or(dipmag::dipole::DEFAULT_REL_TOL),
        };
        config.validate()?;
        Ok(config)
    }
}
