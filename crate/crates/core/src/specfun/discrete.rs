//! Discrete posterior laws over counts: negative binomial with real shape
//! and Poisson, with mean / pmf / cdf / quantile / central-interval queries.

use crate::error::{Error, Result};
use crate::specfun::gamma::{gamma_quantile, ln_gamma};

/// Exact cdf accumulation stops after this many terms; negative binomial
/// queries then degrade to the matched Gamma law and are flagged approximate.
pub const QUANTILE_TERM_BUDGET: u64 = 100_000_000;

/// Exponent floor below which pmf terms are walked in log space.
const LN_PMF_FLOOR: f64 = -700.0;

/// A posterior law over a nonnegative count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiscretePosterior {
    /// Negative binomial with a real number of failures `r` and success
    /// probability `p`: pmf(k) = Γ(k+r)/(Γ(r) k!) (1-p)^r p^k.
    NegativeBinomial { r: f64, p: f64 },
    /// Poisson with the given rate.
    Poisson { rate: f64 },
}

/// A quantile result; `exact` is false when the truncation budget forced the
/// Gamma-limit approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantile {
    pub value: u64,
    pub exact: bool,
}

impl DiscretePosterior {
    pub fn negative_binomial(r: f64, p: f64) -> Result<Self> {
        if r <= 0.0 || !r.is_finite() {
            return Err(Error::domain(format!(
                "negative binomial needs r > 0, got {r}"
            )));
        }
        if !(0.0..1.0).contains(&p) {
            return Err(Error::domain(format!(
                "success probability must be in [0,1), got {p}"
            )));
        }
        Ok(DiscretePosterior::NegativeBinomial { r, p })
    }

    pub fn poisson(rate: f64) -> Result<Self> {
        if rate < 0.0 || rate.is_nan() || !rate.is_finite() {
            return Err(Error::domain(format!(
                "Poisson rate must be >= 0, got {rate}"
            )));
        }
        Ok(DiscretePosterior::Poisson { rate })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DiscretePosterior::NegativeBinomial { r, p } => r * p / (1.0 - p),
            DiscretePosterior::Poisson { rate } => rate,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            DiscretePosterior::NegativeBinomial { r, p } => r * p / ((1.0 - p) * (1.0 - p)),
            DiscretePosterior::Poisson { rate } => rate,
        }
    }

    /// pmf(0) in log space.
    fn ln_pmf0(&self) -> f64 {
        match *self {
            DiscretePosterior::NegativeBinomial { r, p } => r * (-p).ln_1p(),
            DiscretePosterior::Poisson { rate } => -rate,
        }
    }

    /// Log of the multiplicative step pmf(k+1)/pmf(k).
    fn ln_step(&self, k: u64) -> f64 {
        match *self {
            DiscretePosterior::NegativeBinomial { r, p } => {
                ((k as f64 + r) / (k as f64 + 1.0) * p).ln()
            }
            DiscretePosterior::Poisson { rate } => (rate / (k as f64 + 1.0)).ln(),
        }
    }

    /// Multiplicative step pmf(k+1)/pmf(k) in linear space.
    fn step(&self, k: u64) -> f64 {
        match *self {
            DiscretePosterior::NegativeBinomial { r, p } => (k as f64 + r) / (k as f64 + 1.0) * p,
            DiscretePosterior::Poisson { rate } => rate / (k as f64 + 1.0),
        }
    }

    /// pmf via the multiplicative recurrence from pmf(0).
    pub fn pmf(&self, k: u64) -> f64 {
        let mut lp = self.ln_pmf0();
        let mut i = 0u64;
        // Walk in log space until the term is representable.
        while i < k && lp < LN_PMF_FLOOR {
            lp += self.ln_step(i);
            i += 1;
        }
        let mut p = if lp < LN_PMF_FLOOR { 0.0 } else { lp.exp() };
        while i < k {
            p *= self.step(i);
            i += 1;
        }
        p
    }

    /// Direct log-gamma pmf, the independent route used to cross-check the
    /// recurrence.
    pub fn ln_pmf(&self, k: u64) -> f64 {
        let kf = k as f64;
        match *self {
            DiscretePosterior::NegativeBinomial { r, p } => {
                if p == 0.0 {
                    return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
                }
                ln_gamma(kf + r) - ln_gamma(r) - ln_gamma(kf + 1.0) + r * (-p).ln_1p() + kf * p.ln()
            }
            DiscretePosterior::Poisson { rate } => {
                if rate == 0.0 {
                    return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
                }
                -rate + kf * rate.ln() - ln_gamma(kf + 1.0)
            }
        }
    }

    /// cdf(k) = Σ_{j<=k} pmf(j), accumulated by the recurrence.
    pub fn cdf(&self, k: u64) -> f64 {
        let mut lp = self.ln_pmf0();
        let mut acc = 0.0f64;
        let mut i = 0u64;
        while i <= k && lp < LN_PMF_FLOOR {
            lp += self.ln_step(i);
            i += 1;
        }
        if i > k {
            return 0.0;
        }
        let mut p = lp.exp();
        loop {
            acc += p;
            if i == k {
                break;
            }
            p *= self.step(i);
            i += 1;
        }
        acc.min(1.0)
    }

    /// Smallest k with cdf(k) >= q (ties resolved downward, so quantile is
    /// nondecreasing in q). Falls back to the matched Gamma law past the
    /// truncation budget for the negative binomial.
    pub fn quantile(&self, q: f64) -> Result<Quantile> {
        if q <= 0.0 || q >= 1.0 || q.is_nan() {
            return Err(Error::domain(format!(
                "quantile level must be in (0,1), got {q}"
            )));
        }
        match *self {
            DiscretePosterior::NegativeBinomial { p, .. } if p == 0.0 => {
                return Ok(Quantile {
                    value: 0,
                    exact: true,
                });
            }
            DiscretePosterior::Poisson { rate } if rate == 0.0 => {
                return Ok(Quantile {
                    value: 0,
                    exact: true,
                });
            }
            _ => {}
        }
        let mut lp = self.ln_pmf0();
        let mut acc = 0.0f64;
        let mut k = 0u64;
        loop {
            if lp >= LN_PMF_FLOOR {
                break;
            }
            // Mass this far is below ~1e-304 per term and irrelevant to any
            // representable q.
            lp += self.ln_step(k);
            k += 1;
            if k >= QUANTILE_TERM_BUDGET {
                return self.budget_fallback(q, k, acc);
            }
        }
        let mut p = lp.exp();
        loop {
            acc += p;
            if acc >= q {
                return Ok(Quantile {
                    value: k,
                    exact: true,
                });
            }
            if p == 0.0 {
                // Right tail underflowed before reaching q; the remaining
                // true mass is below resolution.
                if 1.0 - acc < 1e-9 {
                    return Ok(Quantile {
                        value: k,
                        exact: true,
                    });
                }
                return Err(Error::numeric(format!(
                    "cdf accumulation stalled at mass {acc} before reaching q={q}"
                )));
            }
            p *= self.step(k);
            k += 1;
            if k >= QUANTILE_TERM_BUDGET {
                return self.budget_fallback(q, k, acc);
            }
        }
    }

    fn budget_fallback(&self, q: f64, terms: u64, mass: f64) -> Result<Quantile> {
        match *self {
            DiscretePosterior::NegativeBinomial { r, p } => {
                // Large-mean limit: the count concentrates on its Gamma
                // mixing variable with shape r and scale p/(1-p).
                let rate = (1.0 - p) / p;
                let x = gamma_quantile(r, rate, q)?;
                Ok(Quantile {
                    value: x.round() as u64,
                    exact: false,
                })
            }
            DiscretePosterior::Poisson { .. } => Err(Error::TruncationBudget { terms, mass }),
        }
    }

    /// Central credible interval (quantile((1-α)/2), quantile((1+α)/2)).
    pub fn central_interval(&self, alpha: f64) -> Result<(Quantile, Quantile)> {
        if alpha <= 0.0 || alpha >= 1.0 || alpha.is_nan() {
            return Err(Error::domain(format!(
                "interval level must be in (0,1), got {alpha}"
            )));
        }
        let lo = self.quantile((1.0 - alpha) / 2.0)?;
        let hi = self.quantile((1.0 + alpha) / 2.0)?;
        Ok((lo, hi))
    }
}
