use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::signal_model::SpectrumTable;

/// Sorted, distinct subset of the N Fourier-series indices of one PRI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SubsetDoc", into = "SubsetDoc")]
pub struct FrequencySubset {
    bins: usize,
    indices: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SubsetDoc {
    bins: usize,
    indices: Vec<usize>,
}

impl TryFrom<SubsetDoc> for FrequencySubset {
    type Error = Error;
    fn try_from(d: SubsetDoc) -> Result<Self> {
        let k = d.indices.len();
        let s = Self::explicit(d.bins, &d.indices)?;
        if s.indices != d.indices {
            return Err(invalid("indices", format!("not strictly increasing ({k} given)")));
        }
        Ok(s)
    }
}

impl From<FrequencySubset> for SubsetDoc {
    fn from(s: FrequencySubset) -> Self {
        Self {
            bins: s.bins,
            indices: s.indices,
        }
    }
}

impl FrequencySubset {
    pub fn nyquist(bins: usize) -> Self {
        Self {
            bins,
            indices: (0..bins).collect(),
        }
    }

    /// Validates and sorts an explicit index list.
    pub fn explicit(bins: usize, indices: &[usize]) -> Result<Self> {
        if bins == 0 {
            return Err(invalid("bins", "must be at least 1"));
        }
        if indices.is_empty() {
            return Err(invalid("indices", "subset is empty"));
        }
        let mut v = indices.to_vec();
        v.sort_unstable();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex(w[0]));
            }
        }
        if let Some(&m) = v.last().filter(|&&m| m >= bins) {
            return Err(Error::IndexOutOfRange { index: m, bins });
        }
        Ok(Self { bins, indices: v })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_nyquist(&self) -> bool {
        self.indices.len() == self.bins
    }
}

/// How [`select_subset`] picks the K indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetStrategy {
    Random,
    Nyquist,
    Explicit(Vec<usize>),
}

/// Selects K of the N indices. `Random` draws uniformly without
/// replacement; when a spectrum table is supplied, only indices above the
/// spectral floor are eligible.
pub fn select_subset(
    bins: usize,
    k: usize,
    strategy: &SubsetStrategy,
    seed: u64,
    spectrum: Option<&SpectrumTable>,
) -> Result<FrequencySubset> {
    if k == 0 || k > bins {
        return Err(invalid("k", format!("need 1 <= K <= N = {bins}, got {k}")));
    }
    match strategy {
        SubsetStrategy::Nyquist => {
            if k != bins {
                return Err(invalid("k", format!("nyquist subset needs K = N = {bins}, got {k}")));
            }
            Ok(FrequencySubset::nyquist(bins))
        }
        SubsetStrategy::Explicit(list) => {
            if list.len() != k {
                return Err(invalid("k", format!("explicit list has {} indices, K = {k}", list.len())));
            }
            FrequencySubset::explicit(bins, list)
        }
        SubsetStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_subset(bins, k, &mut rng, spectrum)
        }
    }
}

pub fn random_subset<R: rand::Rng + ?Sized>(
    bins: usize,
    k: usize,
    rng: &mut R,
    spectrum: Option<&SpectrumTable>,
) -> Result<FrequencySubset> {
    let pool: Vec<usize> = match spectrum {
        Some(t) => {
            if t.len() != bins {
                return Err(Error::DimensionMismatch(format!(
                    "spectrum table has {} bins, N = {bins}",
                    t.len()
                )));
            }
            (0..bins).filter(|&m| t.admissible(m)).collect()
        }
        None => (0..bins).collect(),
    };
    if k > pool.len() {
        return Err(invalid(
            "k",
            format!("only {} indices clear the spectral floor, K = {k}", pool.len()),
        ));
    }
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    picked.sort_unstable();
    Ok(FrequencySubset {
        bins,
        indices: picked,
    })
}
