//! Competitor estimators: the stable-Beta–Bernoulli (3BP) Bayesian baseline,
//! Burnham–Overton jackknife richness estimators of orders 1–4, and the
//! (smoothed) Good–Toulmin extrapolator.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::featureset::FeatureCounts;
use crate::specfun::{log_beta, DiscretePosterior};

/// Stable-Beta process parameters: intensity ϑ s^{-α-1} (1-s)^{κ+α-1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbbParams {
    pub theta: f64,
    pub alpha: f64,
    pub kappa: f64,
}

impl SbbParams {
    pub fn new(theta: f64, alpha: f64, kappa: f64) -> Result<Self> {
        if theta <= 0.0 || !theta.is_finite() {
            return Err(Error::domain(format!(
                "mass theta must be > 0, got {theta}"
            )));
        }
        if alpha <= 0.0 || alpha >= 1.0 || alpha.is_nan() {
            return Err(Error::domain(format!(
                "stable index alpha must be in (0,1), got {alpha}"
            )));
        }
        if kappa + alpha <= 0.0 || kappa.is_nan() || !kappa.is_finite() {
            return Err(Error::domain(format!(
                "concentration must satisfy kappa + alpha > 0, got kappa={kappa}"
            )));
        }
        Ok(SbbParams {
            theta,
            alpha,
            kappa,
        })
    }
}

/// Frequency-of-frequencies spectrum: f[j] = number of features observed
/// exactly j times in n samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreqSpectrum {
    pub n: u64,
    pub f: BTreeMap<u64, u64>,
}

impl FreqSpectrum {
    pub fn new(n: u64, f: BTreeMap<u64, u64>) -> Result<Self> {
        if f.keys().any(|&j| j == 0 || j > n) {
            return Err(Error::domain("spectrum keys must lie in 1..=n".to_string()));
        }
        Ok(FreqSpectrum { n, f })
    }

    pub fn from_counts(counts: &FeatureCounts) -> Self {
        let mut f = BTreeMap::new();
        for (j, &fj) in counts.f.iter().enumerate().skip(1) {
            if fj > 0 {
                f.insert(j as u64, fj);
            }
        }
        FreqSpectrum { n: counts.n, f }
    }

    fn get(&self, j: u64) -> f64 {
        *self.f.get(&j).unwrap_or(&0) as f64
    }

    /// Total number of distinct observed features.
    pub fn distinct(&self) -> u64 {
        self.f.values().sum()
    }
}

/// Prefix sums T_j = Σ_{i=1..j} B(1-α, offset+i-1), Kahan-compensated, with
/// one log-Beta seed at i = 1. The same construction as the stable-index
/// sums, so horizon additivity telescopes to rounding error.
struct ShiftedBetaCursor {
    alpha: f64,
    offset: f64,
    i: u64,
    term: f64,
    sum: f64,
    comp: f64,
}

impl ShiftedBetaCursor {
    fn new(alpha: f64, offset: f64) -> Result<Self> {
        let seed = log_beta(1.0 - alpha, offset)?.exp();
        Ok(ShiftedBetaCursor {
            alpha,
            offset,
            i: 0,
            term: seed,
            sum: 0.0,
            comp: 0.0,
        })
    }

    fn step(&mut self) {
        // term currently holds B(1-α, offset+i); add it, then advance.
        let y = self.term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
        let s = self.offset + self.i as f64;
        self.term *= s / (s + 1.0 - self.alpha);
        self.i += 1;
    }

    fn advance_to(&mut self, j: u64) {
        while self.i < j {
            self.step();
        }
    }

    fn total(&self) -> f64 {
        self.sum - self.comp
    }
}

/// Log marginal probability of a feature allocation under the 3BP:
/// -ϑ Σ_{n=1..N} B(1-α, κ+α+n-1) + Σ_i [ln ϑ + ln B(m_i-α, N-m_i+κ+α)].
pub fn sbb_efpf_log(params: &SbbParams, counts: &FeatureCounts) -> Result<f64> {
    counts.validate()?;
    if counts.n == 0 {
        return Err(Error::domain("EFPF needs at least one sample".to_string()));
    }
    let (theta, alpha, kappa) = (params.theta, params.alpha, params.kappa);
    let mut cur = ShiftedBetaCursor::new(alpha, kappa + alpha)?;
    cur.advance_to(counts.n);
    let mut val = -theta * cur.total();
    let nf = counts.n as f64;
    for (j, &fj) in counts.f.iter().enumerate().skip(1) {
        if fj == 0 {
            continue;
        }
        let jf = j as f64;
        val += fj as f64 * (theta.ln() + log_beta(jf - alpha, nf - jf + kappa + alpha)?);
    }
    Ok(val)
}

/// Posterior law of the unseen-feature count under the 3BP: Poisson with
/// rate ϑ Σ_{i=1..M} B(1-α, κ+α+N+i-1). The law depends on the data only
/// through the sample size N, never through K_N.
pub fn sbb_posterior_unseen(
    params: &SbbParams,
    n: u64,
    m_horizon: u64,
) -> Result<DiscretePosterior> {
    if m_horizon == 0 {
        return DiscretePosterior::poisson(0.0);
    }
    let mut cur = ShiftedBetaCursor::new(params.alpha, params.kappa + params.alpha)?;
    cur.advance_to(n);
    let head = cur.total();
    cur.advance_to(n + m_horizon);
    DiscretePosterior::poisson(params.theta * (cur.total() - head))
}

/// Burnham–Overton jackknife estimate of the number of NEW features, orders
/// 1-4: max(S_order - K, 0) where S_order is the order-j total-richness
/// estimator. Coefficients are the classic interpolated-jackknife table
/// (Burnham & Overton 1978/1979).
pub fn jackknife(spectrum: &FreqSpectrum, order: u32) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(Error::domain(format!(
            "jackknife order must be in 1..=4, got {order}"
        )));
    }
    if spectrum.n <= order as u64 {
        return Err(Error::domain(format!(
            "jackknife order {order} needs n > {order}, got n={}",
            spectrum.n
        )));
    }
    let n = spectrum.n as f64;
    let k = spectrum.distinct() as f64;
    let (f1, f2, f3, f4) = (
        spectrum.get(1),
        spectrum.get(2),
        spectrum.get(3),
        spectrum.get(4),
    );
    let s = match order {
        1 => k + f1 * (n - 1.0) / n,
        2 => k + f1 * (2.0 * n - 3.0) / n - f2 * (n - 2.0).powi(2) / (n * (n - 1.0)),
        3 => {
            k + f1 * (3.0 * n - 6.0) / n - f2 * (3.0 * n * n - 15.0 * n + 19.0) / (n * (n - 1.0))
                + f3 * (n - 3.0).powi(3) / (n * (n - 1.0) * (n - 2.0))
        }
        4 => {
            k + f1 * (4.0 * n - 10.0) / n - f2 * (6.0 * n * n - 36.0 * n + 55.0) / (n * (n - 1.0))
                + f3 * (4.0 * n.powi(3) - 42.0 * n * n + 148.0 * n - 175.0)
                    / (n * (n - 1.0) * (n - 2.0))
                - f4 * (n - 4.0).powi(4) / (n * (n - 1.0) * (n - 2.0) * (n - 3.0))
        }
        _ => unreachable!(),
    };
    Ok((s - k).max(0.0))
}

/// Tail-smoothing law for the Good–Toulmin series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtSmoothing {
    None,
    Binomial,
    Poisson,
}

impl GtSmoothing {
    pub fn as_str(&self) -> &'static str {
        match self {
            GtSmoothing::None => "none",
            GtSmoothing::Binomial => "binomial",
            GtSmoothing::Poisson => "poisson",
        }
    }
}

/// Good–Toulmin prediction of new features in M additional samples.
///
/// Unsmoothed: Σ_j (-1)^{j+1} t^j f_j with t = M/n; used directly whenever
/// t <= 1 (the series is stable there). For t > 1 the requested smoothing
/// dampens the tail: Σ_j (-1)^{j+1} t^j P(L >= j) f_j with L binomial
/// (κ trials = ceil(½ log2(n t²/(t-1))), success 2/(2+t)) or Poisson with
/// rate ½ log2(n t²/(t-1)).
pub fn good_toulmin(
    spectrum: &FreqSpectrum,
    m_horizon: u64,
    smoothing: GtSmoothing,
) -> Result<f64> {
    if spectrum.n == 0 || m_horizon == 0 {
        return Err(Error::domain(
            "good_toulmin needs n >= 1 and M >= 1".to_string(),
        ));
    }
    let t = m_horizon as f64 / spectrum.n as f64;
    let max_j = spectrum.f.keys().next_back().copied().unwrap_or(0);
    if max_j == 0 {
        return Ok(0.0);
    }
    let survival: Option<Vec<f64>> = if t <= 1.0 {
        None
    } else {
        match smoothing {
            GtSmoothing::None => None,
            GtSmoothing::Binomial => {
                let trials = (0.5 * (spectrum.n as f64 * t * t / (t - 1.0)).log2())
                    .ceil()
                    .max(0.0) as u64;
                let q = 2.0 / (2.0 + t);
                Some(survival_binomial(trials, q, max_j))
            }
            GtSmoothing::Poisson => {
                let rate = 0.5 * (spectrum.n as f64 * t * t / (t - 1.0)).log2();
                Some(survival_poisson(rate.max(0.0), max_j))
            }
        }
    };
    let mut u = 0.0;
    for (&j, &fj) in &spectrum.f {
        let damp = match &survival {
            Some(sf) => sf[j as usize],
            None => 1.0,
        };
        if damp == 0.0 {
            continue;
        }
        let term = t.powi(j as i32) * damp * fj as f64;
        u += if j % 2 == 1 { term } else { -term };
    }
    Ok(u)
}

/// P(L >= j) for L ~ Binomial(trials, q), j = 0..=max_j.
fn survival_binomial(trials: u64, q: f64, max_j: u64) -> Vec<f64> {
    let mut sf = vec![0.0; max_j as usize + 1];
    sf[0] = 1.0;
    let mut pmf = (1.0 - q).powi(trials.min(i32::MAX as u64) as i32);
    let mut cum = 0.0;
    for j in 1..=max_j as usize {
        cum += pmf;
        sf[j] = (1.0 - cum).clamp(0.0, 1.0);
        if (j as u64) > trials {
            pmf = 0.0;
        } else {
            let i = (j - 1) as f64;
            pmf *= (trials as f64 - i) / (i + 1.0) * q / (1.0 - q);
        }
    }
    sf
}

/// P(L >= j) for L ~ Poisson(rate), j = 0..=max_j.
fn survival_poisson(rate: f64, max_j: u64) -> Vec<f64> {
    let mut sf = vec![0.0; max_j as usize + 1];
    sf[0] = 1.0;
    let mut pmf = (-rate).exp();
    let mut cum = 0.0;
    for j in 1..=max_j as usize {
        cum += pmf;
        sf[j] = (1.0 - cum).clamp(0.0, 1.0);
        pmf *= rate / j as f64;
    }
    sf
}
