//! Manufactured training data: random periodic boxes of atoms, their pair
//! distances inside an interaction window, and Lennard-Jones box energies.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

/// Placement proposals allowed per atom before the spec is declared
/// infeasible.
pub const MAX_PROPOSALS_PER_ATOM: usize = 100_000;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid box spec: {0}")]
    InvalidSpec(String),
    #[error("could not place atom {atom} after {proposals} proposals")]
    Infeasible { atom: usize, proposals: usize },
    #[error("a dataset needs at least one box")]
    NoBoxes,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed dataset file: {0}")]
    Format(#[from] serde_json::Error),
    #[error("dataset failed validation: {0}")]
    Invalid(String),
}

/// Geometry and potential parameters of one training box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub n_atoms: usize,
    #[serde(with = "crate::float17")]
    pub box_length: f64,
    #[serde(with = "crate::float17")]
    pub d_min: f64,
    #[serde(with = "crate::float17")]
    pub r_lo: f64,
    #[serde(with = "crate::float17")]
    pub r_hi: f64,
    #[serde(with = "crate::float17")]
    pub epsilon: f64,
    #[serde(with = "crate::float17")]
    pub sigma: f64,
}

impl Default for BoxSpec {
    fn default() -> Self {
        BoxSpec {
            n_atoms: 10,
            box_length: 3.0,
            d_min: 0.5,
            r_lo: 0.7,
            r_hi: 2.0,
            epsilon: 1.0,
            sigma: 1.0,
        }
    }
}

impl BoxSpec {
    /// Checks `0 < d_min <= r_lo < r_hi < L` and positive potential
    /// parameters. `r_hi < L` is what makes a single shell of periodic
    /// images exhaustive.
    pub fn validate(&self) -> Result<(), DatasetError> {
        let fail = |msg: &str| Err(DatasetError::InvalidSpec(msg.to_string()));
        let all_finite = [
            self.box_length,
            self.d_min,
            self.r_lo,
            self.r_hi,
            self.epsilon,
            self.sigma,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !all_finite {
            return fail("all lengths and energies must be finite");
        }
        if self.n_atoms < 1 {
            return fail("n_atoms must be at least 1");
        }
        if !(self.d_min > 0.0) {
            return fail("d_min must be positive");
        }
        if self.d_min > self.r_lo {
            return fail("d_min must not exceed r_lo");
        }
        if self.r_lo >= self.r_hi {
            return fail("r_lo must be below r_hi");
        }
        if self.r_hi >= self.box_length {
            return fail("r_hi must be below the box length");
        }
        if !(self.epsilon > 0.0 && self.sigma > 0.0) {
            return fail("epsilon and sigma must be positive");
        }
        Ok(())
    }
}

/// Atom coordinates inside `[0, L)^3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AtomBox {
    #[serde(with = "crate::float17::triples")]
    pub coordinates: Vec<[f64; 3]>,
}

/// Pair distances of one box and its target energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingCase {
    #[serde(with = "crate::float17::list")]
    pub distances: Vec<f64>,
    #[serde(with = "crate::float17")]
    pub target_energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub spec: BoxSpec,
    pub seed: u64,
    pub boxes: Vec<AtomBox>,
    pub cases: Vec<TrainingCase>,
}

/// Minimum-image distance between two points in a cubic periodic box.
pub fn minimum_image_distance(a: [f64; 3], b: [f64; 3], length: f64) -> f64 {
    let mut sq = 0.0;
    for k in 0..3 {
        let mut d = a[k] - b[k];
        d -= length * (d / length).round();
        sq += d * d;
    }
    sq.sqrt()
}

/// Places atoms by rejection sampling.
///
/// Atoms are placed in order; each proposal draws x, y, z uniformly from
/// `[0, L)` and is rejected if it sits closer than `d_min` (minimum image) to
/// any atom already placed.
pub fn place_atoms<G: Rng + ?Sized>(spec: &BoxSpec, rng: &mut G) -> Result<AtomBox, DatasetError> {
    spec.validate()?;
    let mut coordinates: Vec<[f64; 3]> = Vec::with_capacity(spec.n_atoms);
    for atom in 0..spec.n_atoms {
        let mut placed = false;
        for _ in 0..MAX_PROPOSALS_PER_ATOM {
            let p = [
                rng.random::<f64>() * spec.box_length,
                rng.random::<f64>() * spec.box_length,
                rng.random::<f64>() * spec.box_length,
            ];
            let clear = coordinates
                .iter()
                .all(|&q| minimum_image_distance(p, q, spec.box_length) >= spec.d_min);
            if clear {
                coordinates.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(DatasetError::Infeasible { atom, proposals: MAX_PROPOSALS_PER_ATOM });
        }
    }
    Ok(AtomBox { coordinates })
}

/// All `(pair, image)` distances strictly inside `(r_lo, r_hi)`, for image
/// offsets in `{-1, 0, 1}^3`.
///
/// Pairs are visited as `i < j`, offsets in lexicographic order from
/// `(-1, -1, -1)`.
pub fn pair_distances(atoms: &AtomBox, spec: &BoxSpec) -> Result<Vec<f64>, DatasetError> {
    if !(spec.r_hi < spec.box_length) {
        return Err(DatasetError::InvalidSpec(
            "r_hi must be below the box length for single-shell images".into(),
        ));
    }
    Ok(shell_distances(atoms, spec, 1))
}

pub(crate) fn shell_distances(atoms: &AtomBox, spec: &BoxSpec, shell: i32) -> Vec<f64> {
    let l = spec.box_length;
    let mut out = Vec::new();
    let coords = &atoms.coordinates;
    for i in 0..coords.len() {
        for j in (i + 1)..coords.len() {
            let d = [
                coords[i][0] - coords[j][0],
                coords[i][1] - coords[j][1],
                coords[i][2] - coords[j][2],
            ];
            for nx in -shell..=shell {
                for ny in -shell..=shell {
                    for nz in -shell..=shell {
                        let x = d[0] + f64::from(nx) * l;
                        let y = d[1] + f64::from(ny) * l;
                        let z = d[2] + f64::from(nz) * l;
                        let r = (x * x + y * y + z * z).sqrt();
                        if spec.r_lo < r && r < spec.r_hi {
                            out.push(r);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Lennard-Jones pair energy `4 eps [(sigma/r)^12 - (sigma/r)^6]`.
pub fn lj_pair(r: f64, spec: &BoxSpec) -> f64 {
    let s6 = (spec.sigma / r).powi(6);
    4.0 * spec.epsilon * (s6 * s6 - s6)
}

/// Sum of pair energies in list order.
pub fn box_energy(distances: &[f64], spec: &BoxSpec) -> f64 {
    distances.iter().fold(0.0, |acc, &r| acc + lj_pair(r, spec))
}

impl Dataset {
    /// Builds `k_box` boxes from a single seeded stream.
    pub fn build(spec: BoxSpec, k_box: usize, seed: u64) -> Result<Dataset, DatasetError> {
        spec.validate()?;
        if k_box == 0 {
            return Err(DatasetError::NoBoxes);
        }
        let mut stream = rng::stream(seed, 0);
        let mut boxes = Vec::with_capacity(k_box);
        let mut cases = Vec::with_capacity(k_box);
        for _ in 0..k_box {
            let atoms = place_atoms(&spec, &mut stream)?;
            let distances = pair_distances(&atoms, &spec)?;
            let target_energy = box_energy(&distances, &spec);
            boxes.push(atoms);
            cases.push(TrainingCase { distances, target_energy });
        }
        Ok(Dataset { spec, seed, boxes, cases })
    }

    pub fn k_box(&self) -> usize {
        self.cases.len()
    }

    pub fn mean_distances_per_box(&self) -> f64 {
        let total: usize = self.cases.iter().map(|c| c.distances.len()).sum();
        total as f64 / self.cases.len().max(1) as f64
    }

    /// Structural checks applied to loaded files.
    pub fn validate(&self) -> Result<(), DatasetError> {
        self.spec.validate()?;
        if self.cases.is_empty() {
            return Err(DatasetError::NoBoxes);
        }
        if self.boxes.len() != self.cases.len() {
            return Err(DatasetError::Invalid(format!(
                "{} boxes but {} cases",
                self.boxes.len(),
                self.cases.len()
            )));
        }
        for (k, case) in self.cases.iter().enumerate() {
            if let Some(d) =
                case.distances.iter().find(|&&d| !(self.spec.r_lo < d && d < self.spec.r_hi))
            {
                return Err(DatasetError::Invalid(format!(
                    "case {k}: distance {d} outside the interaction window"
                )));
            }
            if !case.target_energy.is_finite() {
                return Err(DatasetError::Invalid(format!("case {k}: non-finite energy")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, DatasetError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Dataset, DatasetError> {
        let dataset: Dataset = serde_json::from_str(text)?;
        dataset.validate()?;
        Ok(dataset)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
