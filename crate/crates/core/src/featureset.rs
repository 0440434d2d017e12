//! Binary feature matrices: the sparse text format, sufficient statistics,
//! subsampling and the Zipf synthetic generator.
//!
//! File format: lines starting with `#` are comments; every other line,
//! including an empty one, is one sample; tokens are whitespace-separated
//! decimal feature ids. Serialization writes samples in order, ids
//! ascending, single space separated, LF line endings.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Features with inclusion probability below 2^-60 are treated as absent by
/// the Zipf generator.
const ZIPF_PROB_FLOOR: f64 = 8.673617379884035e-19; // 2^-60

/// Mix a base seed with a replicate index into an independent stream seed.
/// SplitMix64 finalizer over the golden-ratio-scaled index.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The shared deterministic generator; seeded per use-site via `derive_seed`.
pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An ordered collection of samples, each a set of feature ids. Sample
/// order is significant: prefix statistics depend on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryFeatureMatrix {
    samples: Vec<Vec<u64>>,
    declared_feature_count: Option<u64>,
}

/// Result of parsing the sparse text format.
#[derive(Debug, Clone)]
pub struct ParseOutput {
    pub matrix: BinaryFeatureMatrix,
    /// Number of duplicate ids collapsed within lines.
    pub duplicates_collapsed: u64,
}

/// Sufficient statistics of the first `n` samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureCounts {
    /// Number of samples the statistics cover.
    pub n: u64,
    /// Distinct features observed, K_N.
    pub k: u64,
    /// Per-feature frequencies m_1..m_K in feature-id order, each in 1..=n.
    pub m: Vec<u64>,
    /// Frequency of frequencies: f[j] = #{i : m_i = j}, indexed 1..=n
    /// (f[0] unused).
    pub f: Vec<u64>,
    /// Accumulation curve: curve[l-1] = distinct features in the first l
    /// samples, for l = 1..=n.
    pub curve: Vec<u64>,
}

impl FeatureCounts {
    /// Check internal consistency: sum f_j = k, sum j f_j = sum m_i and all
    /// frequencies in range. Operations taking hand-built counts call this.
    pub fn validate(&self) -> Result<()> {
        if self.f.len() != self.n as usize + 1 {
            return Err(Error::domain(
                "frequency-of-frequencies must be indexed 0..=n".to_string(),
            ));
        }
        let k_from_f: u64 = self.f.iter().skip(1).sum();
        if k_from_f != self.k || self.m.len() as u64 != self.k {
            return Err(Error::domain(
                "feature count k inconsistent with m/f".to_string(),
            ));
        }
        let mass_m: u64 = self.m.iter().sum();
        let mass_f: u64 = self
            .f
            .iter()
            .enumerate()
            .map(|(j, &fj)| j as u64 * fj)
            .sum();
        if mass_m != mass_f {
            return Err(Error::domain(
                "frequency mass mismatch between m and f".to_string(),
            ));
        }
        if self.m.iter().any(|&mi| mi == 0 || mi > self.n) {
            return Err(Error::domain(format!(
                "per-feature frequencies must lie in 1..={}",
                self.n
            )));
        }
        Ok(())
    }
}

impl BinaryFeatureMatrix {
    /// Build from raw samples; ids within each sample are sorted and
    /// deduplicated.
    pub fn from_samples(samples: Vec<Vec<u64>>) -> Self {
        let samples = samples
            .into_iter()
            .map(|mut ids| {
                ids.sort_unstable();
                ids.dedup();
                ids
            })
            .collect();
        BinaryFeatureMatrix {
            samples,
            declared_feature_count: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec<u64>] {
        &self.samples
    }

    pub fn declared_feature_count(&self) -> Option<u64> {
        self.declared_feature_count
    }

    /// Parse the sparse sample-lines format.
    pub fn parse_sparse(text: &str) -> Result<ParseOutput> {
        let mut samples = Vec::new();
        let mut duplicates = 0u64;
        for (idx, line) in text.lines().enumerate() {
            if line.starts_with('#') {
                continue;
            }
            let mut ids = Vec::new();
            for tok in line.split_whitespace() {
                let id: u64 = tok.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("invalid feature id {tok:?}"),
                })?;
                ids.push(id);
            }
            ids.sort_unstable();
            let before = ids.len();
            ids.dedup();
            duplicates += (before - ids.len()) as u64;
            samples.push(ids);
        }
        Ok(ParseOutput {
            matrix: BinaryFeatureMatrix {
                samples,
                declared_feature_count: None,
            },
            duplicates_collapsed: duplicates,
        })
    }

    /// Serialize: one line per sample, ids ascending, space separated, LF.
    pub fn to_sparse_text(&self) -> String {
        let mut out = String::new();
        for sample in &self.samples {
            let mut first = true;
            for id in sample {
                if !first {
                    out.push(' ');
                }
                out.push_str(&id.to_string());
                first = false;
            }
            out.push('\n');
        }
        out
    }

    /// Sufficient statistics over the first `prefix` samples.
    pub fn counts(&self, prefix: usize) -> Result<FeatureCounts> {
        if prefix == 0 || prefix > self.samples.len() {
            return Err(Error::domain(format!(
                "prefix must lie in 1..={}, got {prefix}",
                self.samples.len()
            )));
        }
        let mut freq: HashMap<u64, u64> = HashMap::new();
        let mut curve = Vec::with_capacity(prefix);
        let mut distinct = 0u64;
        for sample in &self.samples[..prefix] {
            for &id in sample {
                let e = freq.entry(id).or_insert(0);
                if *e == 0 {
                    distinct += 1;
                }
                *e += 1;
            }
            curve.push(distinct);
        }
        let mut by_id: Vec<(u64, u64)> = freq.into_iter().collect();
        by_id.sort_unstable_by_key(|&(id, _)| id);
        let m: Vec<u64> = by_id.into_iter().map(|(_, c)| c).collect();
        let mut f = vec![0u64; prefix + 1];
        for &mi in &m {
            f[mi as usize] += 1;
        }
        Ok(FeatureCounts {
            n: prefix as u64,
            k: distinct,
            m,
            f,
            curve,
        })
    }

    /// Uniform random subset of `n` samples without replacement, order
    /// randomized; deterministic given the seed. Sample contents are
    /// preserved exactly.
    pub fn subsample(&self, n: usize, seed: u64) -> Result<BinaryFeatureMatrix> {
        if n > self.samples.len() {
            return Err(Error::domain(format!(
                "cannot draw {n} samples from {}",
                self.samples.len()
            )));
        }
        let mut rng = rng_from_seed(seed);
        let mut idx: Vec<usize> = (0..self.samples.len()).collect();
        for i in 0..n {
            let j = rng.random_range(i..idx.len());
            idx.swap(i, j);
        }
        let samples = idx[..n].iter().map(|&i| self.samples[i].clone()).collect();
        Ok(BinaryFeatureMatrix {
            samples,
            declared_feature_count: self.declared_feature_count,
        })
    }
}

/// Configuration of the Zipf synthetic generator: feature k in 1..=k_max is
/// present in each of l independent samples with probability (k+1)^-xi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfConfig {
    pub xi: f64,
    pub k_max: u64,
    pub l: u64,
    pub seed: u64,
}

/// Generate a Zipf dataset. Generation walks features column-wise: the
/// inclusion count for feature k is Binomial(l, pi_k) and the including
/// samples are a uniform subset, which is equivalent in law to the row-wise
/// Bernoulli scheme but costs O(total inclusions) instead of O(l * k_max).
pub fn zipf_generate(config: &ZipfConfig) -> Result<BinaryFeatureMatrix> {
    if config.xi <= 0.0 || !config.xi.is_finite() {
        return Err(Error::domain(format!(
            "Zipf exponent must be positive, got {}",
            config.xi
        )));
    }
    if config.k_max == 0 || config.l == 0 {
        return Err(Error::domain("Zipf k_max and l must be >= 1".to_string()));
    }
    let mut rng = rng_from_seed(config.seed);
    let l = config.l;
    let mut rows: Vec<Vec<u64>> = vec![Vec::new(); l as usize];
    for k in 1..=config.k_max {
        let pi = (-(config.xi) * ((k + 1) as f64).ln()).exp();
        if pi < ZIPF_PROB_FLOOR {
            break;
        }
        let count = Binomial::new(l, pi)
            .map_err(|e| Error::numeric(format!("binomial draw failed: {e}")))?
            .sample(&mut rng);
        if count == 0 {
            continue;
        }
        if count == l {
            for row in &mut rows {
                row.push(k);
            }
            continue;
        }
        // Floyd's algorithm for a uniform `count`-subset of 0..l.
        let mut chosen: HashSet<u64> = HashSet::with_capacity(count as usize);
        for j in (l - count)..l {
            let t = rng.random_range(0..=j);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        for idx in chosen {
            rows[idx as usize].push(k);
        }
    }
    // Column-wise pushes arrive in ascending k, so rows are already sorted.
    Ok(BinaryFeatureMatrix {
        samples: rows,
        declared_feature_count: Some(config.k_max),
    })
}
