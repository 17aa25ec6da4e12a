//! Uncertain-input distributions and the Latin Hypercube sample generator.
//!
//! Every draw is reproducible from a single 64-bit campaign seed. Each matrix
//! column gets its own ChaCha stream derived from (seed, column index), so
//! columns can be materialized in any order, or in parallel, without changing
//! a single bit of the output.

mod dist;

pub use dist::{normal_cdf, normal_inv_cdf, poisson_inv_cdf};
pub(crate) use dist::ln_gamma;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::textfmt::fmt_sig9;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("Poisson rate {0} must be positive and finite")]
    RateOutOfRange(f64),
    #[error("sample count {0} is below the minimum of 2")]
    SampleCountTooSmall(usize),
    #[error("no uncertain inputs declared")]
    NoInputs,
    #[error("uncertain input '{name}': {reason}")]
    InvalidInput { name: String, reason: String },
}

/// Distribution family of one uncertain input.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Normal { sigma: f64 },
    /// Poisson counts rescaled to a continuous quantity: with rate
    /// `lambda = 1/cv^2` and quantum `q = mean * cv^2` the sampled value
    /// `q * k` keeps the declared mean and coefficient of variation.
    PoissonScaled { cv: f64 },
}

/// One of the k uncertain design variables.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UncertainInput {
    pub id: u32,
    pub name: String,
    /// Name of the project field this input perturbs.
    pub target: String,
    pub mean: f64,
    pub distribution: Distribution,
}

impl UncertainInput {
    pub fn check(&self) -> Result<(), SamplingError> {
        match self.distribution {
            Distribution::Normal { sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(SamplingError::InvalidInput {
                        name: self.name.clone(),
                        reason: format!("normal sigma must be > 0, got {sigma}"),
                    });
                }
            }
            Distribution::PoissonScaled { cv } => {
                if !(cv > 0.0 && cv < 1.0) {
                    return Err(SamplingError::InvalidInput {
                        name: self.name.clone(),
                        reason: format!("poisson_scaled cv must be in (0, 1), got {cv}"),
                    });
                }
                if !(self.mean > 0.0 && self.mean.is_finite()) {
                    return Err(SamplingError::InvalidInput {
                        name: self.name.clone(),
                        reason: format!("poisson_scaled mean must be > 0, got {}", self.mean),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Map one stratified uniform draw to the input's units.
pub fn sample_value(input: &UncertainInput, p: f64) -> Result<f64, SamplingError> {
    match input.distribution {
        Distribution::Normal { sigma } => Ok(input.mean + sigma * normal_inv_cdf(p)?),
        Distribution::PoissonScaled { cv } => {
            let lambda = 1.0 / (cv * cv);
            let quantum = input.mean * cv * cv;
            Ok(quantum * poisson_inv_cdf(p, lambda)? as f64)
        }
    }
}

/// Vector of the declared means, in declaration order.
pub fn deterministic_point(inputs: &[UncertainInput]) -> Vec<f64> {
    inputs.iter().map(|i| i.mean).collect()
}

/// One column of a [`SampleMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampleColumn {
    pub name: String,
    pub values: Vec<f64>,
    /// Stratum index (0-based) each row's probability was drawn from; a
    /// permutation of 0..n.
    pub strata: Vec<u32>,
}

/// N x k Latin-Hypercube draw, one column per uncertain input.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub n_samples: usize,
    pub seed: u64,
    pub columns: Vec<SampleColumn>,
}

const COLUMN_TAG: u64 = 0x4c48_535f_434f_4c53; // column streams
const RETRY_TAG: u64 = 0x4c48_535f_5254_5259; // cell retry streams
const MAX_REDRAW_ATTEMPTS: usize = 64;

/// SplitMix64-style finalizer mixing the campaign seed with purpose tags.
fn derive_seed(seed: u64, tag: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ a.wrapping_mul(0xbf58_476d_1ce4_e5b9)
        ^ b.wrapping_mul(0x94d0_49bb_1331_11eb);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn column_rng(seed: u64, column: usize) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(seed, COLUMN_TAG, column as u64, 0))
}

fn retry_rng(seed: u64, column: usize, row: usize) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(seed, RETRY_TAG, column as u64, row as u64))
}

/// Uniform draw on the open interval (0, 1).
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Stratified probabilities for one column: each stratum ((j-1)/n, j/n] is
/// hit exactly once, in an order given by a Fisher-Yates permutation.
fn stratified_probabilities<R: Rng>(rng: &mut R, n: usize) -> (Vec<f64>, Vec<u32>) {
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);
    let ps = order
        .iter()
        .map(|&s| (f64::from(s) + open_unit(rng)) / n as f64)
        .collect();
    (ps, order)
}

/// Generate the Latin Hypercube sample matrix.
pub fn lhs(inputs: &[UncertainInput], n: usize, seed: u64) -> Result<SampleMatrix, SamplingError> {
    if inputs.is_empty() {
        return Err(SamplingError::NoInputs);
    }
    if n < 2 {
        return Err(SamplingError::SampleCountTooSmall(n));
    }
    for input in inputs {
        input.check()?;
    }
    let columns = inputs
        .iter()
        .enumerate()
        .map(|(c, input)| {
            let mut rng = column_rng(seed, c);
            let (ps, strata) = stratified_probabilities(&mut rng, n);
            let values = ps
                .iter()
                .map(|&p| sample_value(input, p))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SampleColumn {
                name: input.name.clone(),
                values,
                strata,
            })
        })
        .collect::<Result<Vec<_>, SamplingError>>()?;
    Ok(SampleMatrix {
        n_samples: n,
        seed,
        columns,
    })
}

impl SampleMatrix {
    pub fn n_inputs(&self) -> usize {
        self.columns.len()
    }

    /// Sample row `j` across all columns, in declaration order.
    pub fn row(&self, j: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c.values[j]).collect()
    }

    /// Redraw one cell inside its original stratum from a deterministic
    /// retry substream keyed by (seed, column, row), keeping the first value
    /// `accept` passes. Returns false when every attempt is rejected.
    pub fn redraw_cell(
        &mut self,
        column: usize,
        row: usize,
        input: &UncertainInput,
        accept: impl Fn(f64) -> bool,
    ) -> Result<bool, SamplingError> {
        let stratum = self.columns[column].strata[row];
        let n = self.n_samples;
        let mut rng = retry_rng(self.seed, column, row);
        for _ in 0..MAX_REDRAW_ATTEMPTS {
            let p = (f64::from(stratum) + open_unit(&mut rng)) / n as f64;
            let v = sample_value(input, p)?;
            if accept(v) {
                self.columns[column].values[row] = v;
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// CSV rendering: header of variable names, one row per sample,
    /// 9-significant-digit decimal text.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for j in 0..self.n_samples {
            let row: Vec<String> = self
                .columns
                .iter()
                .map(|c| fmt_sig9(c.values[j]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}
