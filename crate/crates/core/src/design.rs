//! Systematic samples and the two-phase non-response mechanism.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{interval, Population};

/// One of the `k` systematic samples.
///
/// `start` is 1-based (`1..=k`); `indices` are 0-based positions into the
/// population, so `indices[0] == start - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystematicSample {
    pub start: usize,
    pub indices: Vec<usize>,
    pub y_values: Vec<f64>,
    pub x_values: Vec<f64>,
}

impl SystematicSample {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn draw_systematic(
    pop: &Population,
    sample_size: usize,
    start: usize,
) -> Result<SystematicSample> {
    let k = interval(pop.len(), sample_size)?;
    if start == 0 || start > k {
        return Err(Error::StartOutOfRange { start, interval: k });
    }
    let indices: Vec<usize> = (0..sample_size).map(|j| start - 1 + j * k).collect();
    Ok(SystematicSample {
        start,
        y_values: indices.iter().map(|&i| pop.y()[i]).collect(),
        x_values: indices.iter().map(|&i| pop.x()[i]).collect(),
        indices,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mechanism {
    /// Non-respondents are the sample units inside the population's
    /// designated stratum.
    #[default]
    Stratum,
    /// Each sampled unit fails to respond independently with probability `rate`.
    Bernoulli { rate: f64 },
}

impl std::fmt::Display for Mechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mechanism::Stratum => f.write_str("stratum"),
            Mechanism::Bernoulli { rate } => write!(f, "bernoulli (rate {rate})"),
        }
    }
}

/// Respondent split and the sub-sample of non-respondents that is followed up.
///
/// Index sets hold population positions.
#[derive(Debug, Clone, PartialEq)]
pub struct NonResponseOutcome {
    pub respondents: Vec<usize>,
    pub nonrespondents: Vec<usize>,
    pub subsample: Vec<usize>,
    /// Realised `n2 / h2`; 1 when everyone responded.
    pub l_factor: f64,
}

impl NonResponseOutcome {
    /// Everyone responds.
    pub fn full_response(sample: &SystematicSample) -> Self {
        Self {
            respondents: sample.indices.clone(),
            nonrespondents: Vec::new(),
            subsample: Vec::new(),
            l_factor: 1.0,
        }
    }

    pub fn n1(&self) -> usize {
        self.respondents.len()
    }

    pub fn n2(&self) -> usize {
        self.nonrespondents.len()
    }

    pub fn h2(&self) -> usize {
        self.subsample.len()
    }
}

/// Follow-up sub-sample size: `ceil(n2 / L)`.
pub fn subsample_size(n2: usize, l_factor: f64) -> usize {
    if n2 == 0 {
        0
    } else {
        ((n2 as f64 / l_factor).ceil() as usize).clamp(1, n2)
    }
}

pub fn realize_nonresponse(
    sample: &SystematicSample,
    pop: &Population,
    mechanism: Mechanism,
    l_factor: f64,
    seed: u64,
) -> Result<NonResponseOutcome> {
    if l_factor.is_nan() || l_factor < 1.0 || l_factor.is_infinite() {
        return Err(Error::InvalidSubsamplingFactor(l_factor));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (respondents, nonrespondents): (Vec<usize>, Vec<usize>) = match mechanism {
        Mechanism::Stratum => {
            let flags = pop.nr_stratum().ok_or(Error::MissingStratum)?;
            sample.indices.iter().partition(|&&i| !flags[i])
        }
        Mechanism::Bernoulli { rate } => {
            if !(0.0..1.0).contains(&rate) {
                return Err(Error::InvalidRate(rate));
            }
            sample
                .indices
                .iter()
                .partition(|_| rng.gen::<f64>() >= rate)
        }
    };
    let n2 = nonrespondents.len();
    let h2 = subsample_size(n2, l_factor);
    let mut picked = index::sample(&mut rng, n2, h2).into_vec();
    picked.sort_unstable();
    let subsample = picked.into_iter().map(|p| nonrespondents[p]).collect();
    Ok(NonResponseOutcome {
        respondents,
        nonrespondents,
        subsample,
        l_factor: if n2 == 0 { 1.0 } else { n2 as f64 / h2 as f64 },
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-replication seed:
/// `splitmix64(splitmix64(base ^ splitmix64(replication)) ^ start)`.
///
/// Independent of execution order, so replications can run in any schedule.
pub fn derive_seed(base_seed: u64, replication: u64, start: u64) -> u64 {
    splitmix64(splitmix64(base_seed ^ splitmix64(replication)) ^ start)
}
