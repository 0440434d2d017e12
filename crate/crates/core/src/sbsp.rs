//! Stable-Beta scaled-process model: feature-allocation log-likelihood,
//! posterior laws for unseen and rare unseen features, the large-horizon
//! Gamma limit, and the sequential generative sampler.

use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution};

use crate::error::{Error, Result};
use crate::featureset::{rng_from_seed, BinaryFeatureMatrix, FeatureCounts};
use crate::specfun::{
    check_sigma, gamma_quantile, ln_gamma, rho, BetaSumCursor, DiscretePosterior, RhoSpec,
};

/// New-feature draws above this are treated as a numeric failure; every
/// observation must stay finite.
const PER_STEP_FEATURE_CAP: u64 = 100_000_000;

/// Prior hyperparameters (σ, c, β): stable index, polynomial tilt and
/// exponential tilt. c = 0 with β = 1 and σ → 0 recovers the Beta process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbspParams {
    pub sigma: f64,
    pub c: f64,
    pub beta: f64,
}

impl SbspParams {
    pub fn new(sigma: f64, c: f64, beta: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if c < 0.0 || c.is_nan() || !c.is_finite() {
            return Err(Error::domain(format!("tilt c must be >= 0, got {c}")));
        }
        if beta <= 0.0 || !beta.is_finite() {
            return Err(Error::domain(format!("tilt beta must be > 0, got {beta}")));
        }
        Ok(SbspParams { sigma, c, beta })
    }
}

/// Gamma law (shape, rate) for the scaled large-horizon limits and the
/// latent-jump posterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLaw {
    pub shape: f64,
    pub rate: f64,
}

impl GammaLaw {
    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        gamma_quantile(self.shape, self.rate, q)
    }
}

/// How the sampler treats previously-seen features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpMode {
    /// Include feature i at step t with the marginalized Bernoulli
    /// probability (m_i - σ)/(t - σ); the default.
    Marginal,
    /// Draw the latent Beta(m_i - σ, t - m_i) jump explicitly, then flip.
    /// Equivalent in law for one-step prediction; kept for cross-checks.
    LatentBeta,
}

fn g0n_cursor(sigma: f64, n: u64) -> Result<(BetaSumCursor, f64)> {
    let mut cur = BetaSumCursor::new(sigma)?;
    cur.advance_to(n);
    let g0n = cur.total();
    Ok((cur, g0n))
}

/// Shared negative-binomial constructor: failures k+c+1 and success
/// probability tail/(β + γ_0^(N) + tail). Both the total and the rare laws
/// go through here so that coinciding tails give bit-identical laws.
pub(crate) fn negbin_from_tail(
    k: u64,
    c: f64,
    beta: f64,
    g0n: f64,
    tail: f64,
) -> Result<DiscretePosterior> {
    DiscretePosterior::negative_binomial(k as f64 + c + 1.0, tail / (beta + g0n + tail))
}

/// Log marginal probability of a feature allocation with k distinct
/// features and frequencies m, observed in n samples.
pub fn efpf_log(params: &SbspParams, counts: &FeatureCounts) -> Result<f64> {
    counts.validate()?;
    if counts.n == 0 {
        return Err(Error::domain("EFPF needs at least one sample".to_string()));
    }
    let (sigma, c, beta) = (params.sigma, params.c, params.beta);
    let n = counts.n as f64;
    let (_, g0n) = g0n_cursor(sigma, counts.n)?;
    let k = counts.k as f64;
    let mut val = k * sigma.ln() + (c + 1.0) * beta.ln() - (k + c + 1.0) * (beta + g0n).ln()
        + ln_gamma(k + c + 1.0)
        - ln_gamma(c + 1.0);
    // Per-feature Beta factors grouped by frequency: cost O(#distinct
    // frequencies), not O(k).
    for (j, &fj) in counts.f.iter().enumerate().skip(1) {
        if fj == 0 {
            continue;
        }
        let jf = j as f64;
        val += fj as f64 * (ln_gamma(jf - sigma) + ln_gamma(n - jf + 1.0));
    }
    val -= k * ln_gamma(n - sigma + 1.0);
    Ok(val)
}

/// Posterior law of the number of unseen features revealed by m_horizon
/// additional samples, given n samples showing k distinct features.
pub fn posterior_unseen(
    params: &SbspParams,
    n: u64,
    k: u64,
    m_horizon: u64,
) -> Result<DiscretePosterior> {
    if n == 0 || m_horizon == 0 {
        return Err(Error::domain(
            "posterior_unseen needs n >= 1 and M >= 1".to_string(),
        ));
    }
    let (mut cur, g0n) = g0n_cursor(params.sigma, n)?;
    cur.advance_to(n + m_horizon);
    let tail = cur.total() - g0n;
    negbin_from_tail(k, params.c, params.beta, g0n, tail)
}

/// Posterior law of the number of unseen features that will appear exactly
/// r times among the m_horizon additional samples.
pub fn posterior_unseen_rare(
    params: &SbspParams,
    n: u64,
    k: u64,
    m_horizon: u64,
    r: u64,
) -> Result<DiscretePosterior> {
    if n == 0 || m_horizon == 0 {
        return Err(Error::domain(
            "posterior_unseen_rare needs n >= 1 and M >= 1".to_string(),
        ));
    }
    let (_, g0n) = g0n_cursor(params.sigma, n)?;
    let tail = rho(&RhoSpec {
        n,
        m: m_horizon,
        r,
        sigma: params.sigma,
    })?;
    negbin_from_tail(k, params.c, params.beta, g0n, tail)
}

/// Prior-predictive law of the number of distinct features in n samples:
/// NegativeBinomial(c+1, γ_0^(n)/(β+γ_0^(n))).
pub fn prior_predictive_distinct(params: &SbspParams, n: u64) -> Result<DiscretePosterior> {
    if n == 0 {
        return Err(Error::domain("prior predictive needs n >= 1".to_string()));
    }
    let (_, g0n) = g0n_cursor(params.sigma, n)?;
    DiscretePosterior::negative_binomial(params.c + 1.0, g0n / (params.beta + g0n))
}

/// Gamma law of the almost-sure limit of U/M^σ as the horizon M grows
/// (the scaled number of unseen features; `rare` picks the prevalence-r
/// variant). Shape/rate resolved by moment matching against the exact
/// negative-binomial mean divided by M^σ.
pub fn asymptotic_limit(
    params: &SbspParams,
    n: u64,
    k: u64,
    rare: Option<u64>,
) -> Result<GammaLaw> {
    if n == 0 {
        return Err(Error::domain("asymptotic_limit needs n >= 1".to_string()));
    }
    let (_, g0n) = g0n_cursor(params.sigma, n)?;
    let shape = k as f64 + params.c + 1.0;
    let scale_base = params.beta + g0n;
    let rate = match rare {
        None => scale_base / ln_gamma(1.0 - params.sigma).exp(),
        Some(r) => {
            if r == 0 {
                return Err(Error::domain("prevalence r must be >= 1".to_string()));
            }
            let rf = r as f64;
            // Γ(r+1)(β+γ_0^(N)) / (σ Γ(r-σ))
            scale_base * (ln_gamma(rf + 1.0) - ln_gamma(rf - params.sigma)).exp() / params.sigma
        }
    };
    Ok(GammaLaw { shape, rate })
}

/// Draw n observations from the model by the sequential scheme: at step t a
/// NegativeBinomial(K_{t-1}+c+1, γ_{t-1}^(1)/(β+γ_0^(t))) count of fresh
/// features appears, and each old feature i rejoins with probability
/// (m_i-σ)/(t-σ). Feature ids are consecutive integers in discovery order.
pub fn sample_dataset(params: &SbspParams, n: u64, seed: u64) -> Result<BinaryFeatureMatrix> {
    sample_dataset_with(params, n, seed, JumpMode::Marginal)
}

pub fn sample_dataset_with(
    params: &SbspParams,
    n: u64,
    seed: u64,
    mode: JumpMode,
) -> Result<BinaryFeatureMatrix> {
    let (sigma, c, beta) = (params.sigma, params.c, params.beta);
    check_sigma(sigma)?;
    let mut rng = rng_from_seed(seed);
    let mut cur = BetaSumCursor::new(sigma)?;
    let mut freqs: Vec<u64> = Vec::new();
    let mut samples: Vec<Vec<u64>> = Vec::with_capacity(n as usize);
    for t in 1..=n {
        cur.advance_to(t);
        let tail = sigma * cur.last_beta(); // γ_{t-1}^(1)
        let p = tail / (beta + cur.total());
        let k_prev = freqs.len() as u64;
        let law = DiscretePosterior::negative_binomial(k_prev as f64 + c + 1.0, p)?;
        let mut u: f64 = rng.random();
        if u <= 0.0 {
            u = f64::MIN_POSITIVE;
        }
        let fresh = law.quantile(u)?;
        if fresh.value > PER_STEP_FEATURE_CAP {
            return Err(Error::numeric(format!(
                "new-feature draw {} exceeded the per-step cap",
                fresh.value
            )));
        }
        let mut row: Vec<u64> = Vec::new();
        let tf = t as f64;
        for (i, freq) in freqs.iter_mut().enumerate() {
            let mi = *freq as f64;
            let include = match mode {
                JumpMode::Marginal => rng.random::<f64>() < (mi - sigma) / (tf - sigma),
                JumpMode::LatentBeta => {
                    let jump = BetaDist::new(mi - sigma, tf - mi)
                        .map_err(|e| Error::numeric(format!("beta jump failed: {e}")))?
                        .sample(&mut rng);
                    rng.random::<f64>() < jump
                }
            };
            if include {
                row.push(i as u64);
                *freq += 1;
            }
        }
        for _ in 0..fresh.value {
            row.push(freqs.len() as u64);
            freqs.push(1);
        }
        samples.push(row);
    }
    Ok(BinaryFeatureMatrix::from_samples(samples))
}
