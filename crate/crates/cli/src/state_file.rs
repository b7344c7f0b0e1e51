//! JSON state files.

use std::fs;
use std::path::Path;

use linkloop::qstate::{DensityMatrix, PureState, C64, MAX_SITES};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pure,
    Mixed,
}

/// On-disk form. Complex numbers are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n_sites: usize,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn n_sites(&self) -> usize {
        match self {
            State::Pure(p) => p.n_sites(),
            State::Mixed(m) => m.n_sites(),
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            State::Pure(_) => Kind::Pure,
            State::Mixed(_) => Kind::Mixed,
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.density(),
            State::Mixed(m) => m.clone(),
        }
    }
}

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: &[f64; 2]) -> C64 {
    Complex::new(p[0], p[1])
}

impl StateFile {
    pub fn from_state(state: &State) -> Self {
        match state {
            State::Pure(p) => StateFile {
                n_sites: p.n_sites(),
                kind: Kind::Pure,
                amplitudes: Some(p.amplitudes().iter().map(pair).collect()),
                density: None,
            },
            State::Mixed(m) => {
                let mat = m.matrix();
                StateFile {
                    n_sites: m.n_sites(),
                    kind: Kind::Mixed,
                    amplitudes: None,
                    density: Some((0..mat.nrows()).map(|r| mat.row(r).iter().map(pair).collect()).collect()),
                }
            }
        }
    }

    /// Structural checks give file errors; numerical ones (norm, trace,
    /// Hermiticity, positivity) give validation errors.
    pub fn into_state(self) -> Result<State, CliError> {
        if self.n_sites == 0 || self.n_sites > MAX_SITES {
            return Err(CliError::File(format!("n_sites must be in 1..={MAX_SITES}, got {}", self.n_sites)));
        }
        let dim = 1usize << self.n_sites;
        match (self.kind, self.amplitudes, self.density) {
            (Kind::Pure, Some(amps), None) => {
                if amps.len() != dim {
                    return Err(CliError::File(format!(
                        "expected {dim} amplitudes for {} sites, found {}",
                        self.n_sites,
                        amps.len()
                    )));
                }
                let v = DVector::from_iterator(dim, amps.iter().map(complex));
                Ok(State::Pure(PureState::new(v).map_err(CliError::from_core)?))
            }
            (Kind::Mixed, None, Some(rows)) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(CliError::File(format!("density must be a {dim}x{dim} array")));
                }
                let m = DMatrix::from_fn(dim, dim, |r, c| complex(&rows[r][c]));
                Ok(State::Mixed(DensityMatrix::new(m).map_err(CliError::from_core)?))
            }
            (Kind::Pure, _, _) => Err(CliError::File("a pure state needs `amplitudes` and no `density`".into())),
            (Kind::Mixed, _, _) => Err(CliError::File("a mixed state needs `density` and no `amplitudes`".into())),
        }
    }
}

pub fn load(path: &Path) -> Result<State, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::File(format!("{}: {e}", path.display())))?;
    let file: StateFile =
        serde_json::from_str(&text).map_err(|e| CliError::File(format!("{}: {e}", path.display())))?;
    file.into_state()
}
