//! Multivariate extension: each feature occurrence carries one of q
//! characteristics ("condiments"). Unseen-feature posteriors per condiment
//! come in a scaled (negative binomial) and a non-scaled (Poisson) flavor.

use crate::baselines::{sbb_posterior_unseen, SbbParams};
use crate::error::{Error, Result};
use crate::sbsp::{negbin_from_tail, SbspParams};
use crate::specfun::{
    beta_rule, check_sigma, log_beta, BetaSumCursor, DiscretePosterior, GammaSumSpec,
};

/// Horizon above which the alternating binomial sum is abandoned for the
/// quadrature form (the summands alternate with geometric growth in M).
const ALTERNATING_MAX_HORIZON: u64 = 30;

/// Condiment weights γ_1..γ_q; q = gammas.len().
#[derive(Debug, Clone, PartialEq)]
pub struct CondimentConfig {
    gammas: Vec<f64>,
}

impl CondimentConfig {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::domain(
                "need at least one condiment weight".to_string(),
            ));
        }
        if gammas.iter().any(|g| *g <= 0.0 || !g.is_finite()) {
            return Err(Error::domain(
                "condiment weights must be positive and finite".to_string(),
            ));
        }
        Ok(CondimentConfig { gammas })
    }

    pub fn q(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn total(&self) -> f64 {
        self.gammas.iter().sum()
    }

    fn weight(&self, ell: usize) -> Result<f64> {
        if ell == 0 || ell > self.gammas.len() {
            return Err(Error::domain(format!(
                "condiment index must lie in 1..={}, got {ell}",
                self.gammas.len()
            )));
        }
        Ok(self.gammas[ell - 1])
    }
}

/// Samples of (feature id, condiment index) pairs; at most one condiment
/// per feature per sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondimentMatrix {
    samples: Vec<Vec<(u64, u32)>>,
}

#[derive(Debug, Clone)]
pub struct CondimentParse {
    pub matrix: CondimentMatrix,
    pub duplicates_collapsed: u64,
}

/// Condiment-specific sufficient statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondimentCounts {
    pub n: u64,
    pub k: u64,
    /// Per observed feature (id-ascending), per condiment (0-based) counts.
    pub m_matrix: Vec<Vec<u64>>,
    /// Row sums m_i = |m_i|, each in 1..=n.
    pub m: Vec<u64>,
}

impl CondimentMatrix {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec<(u64, u32)>] {
        &self.samples
    }

    /// Parse the sparse condiment format: same line rules as the plain
    /// format, tokens are `id:j` with condiment index j in 1..=q.
    pub fn parse(text: &str) -> Result<CondimentParse> {
        let mut samples = Vec::new();
        let mut duplicates = 0u64;
        for (idx, line) in text.lines().enumerate() {
            if line.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let mut pairs: Vec<(u64, u32)> = Vec::new();
            for tok in line.split_whitespace() {
                let (id_str, j_str) = tok.split_once(':').ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: format!("expected id:condiment, got {tok:?}"),
                })?;
                let id: u64 = id_str.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("invalid feature id {id_str:?}"),
                })?;
                let j: u32 = j_str.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("invalid condiment index {j_str:?}"),
                })?;
                if j == 0 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "condiment indices start at 1".to_string(),
                    });
                }
                pairs.push((id, j));
            }
            pairs.sort_unstable();
            let before = pairs.len();
            pairs.dedup();
            duplicates += (before - pairs.len()) as u64;
            // One characteristic per feature occurrence.
            for w in pairs.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("feature {} appears with two condiments", w[0].0),
                    });
                }
            }
            samples.push(pairs);
        }
        Ok(CondimentParse {
            matrix: CondimentMatrix { samples },
            duplicates_collapsed: duplicates,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for sample in &self.samples {
            let mut first = true;
            for (id, j) in sample {
                if !first {
                    out.push(' ');
                }
                out.push_str(&format!("{id}:{j}"));
                first = false;
            }
            out.push('\n');
        }
        out
    }

    /// Sufficient statistics for q condiments over all samples.
    pub fn counts(&self, q: usize) -> Result<CondimentCounts> {
        use std::collections::HashMap;
        let mut per_feature: HashMap<u64, Vec<u64>> = HashMap::new();
        for sample in &self.samples {
            for &(id, j) in sample {
                if j as usize > q {
                    return Err(Error::domain(format!("condiment index {j} exceeds q={q}")));
                }
                per_feature.entry(id).or_insert_with(|| vec![0; q])[j as usize - 1] += 1;
            }
        }
        let mut by_id: Vec<(u64, Vec<u64>)> = per_feature.into_iter().collect();
        by_id.sort_unstable_by_key(|&(id, _)| id);
        let m_matrix: Vec<Vec<u64>> = by_id.into_iter().map(|(_, row)| row).collect();
        let m: Vec<u64> = m_matrix.iter().map(|row| row.iter().sum()).collect();
        Ok(CondimentCounts {
            n: self.samples.len() as u64,
            k: m_matrix.len() as u64,
            m_matrix,
            m,
        })
    }
}

fn quadrature_order(m_horizon: u64) -> usize {
    // 2n-1 >= M makes the rule exact for the degree-M integrand; cap the
    // order for very large horizons where the rule is an approximation.
    (m_horizon as usize / 2 + 1).clamp(128, 512)
}

/// ψ_{N,ℓ}^(M): the condiment-ℓ analogue of γ_N^(M).
///
/// Alternating binomial form for M <= 30; for larger M the equivalent
/// expectation form σ B(1-σ, N+1) E[(1-(1-XY)^M)/Y] with X ~ Beta(γ_ℓ,
/// |γ|-γ_ℓ), Y ~ Beta(1-σ, N+1), evaluated by a deterministic Gauss–Jacobi
/// product rule. With q = 1 the rising-factorial ratio is identically one
/// and ψ reduces to γ_N^(M) exactly.
pub fn psi(
    n: u64,
    m_horizon: u64,
    sigma: f64,
    config: &CondimentConfig,
    ell: usize,
) -> Result<f64> {
    check_sigma(sigma)?;
    if m_horizon == 0 {
        return Err(Error::domain("psi horizon must be >= 1".to_string()));
    }
    let g_ell = config.weight(ell)?;
    if config.q() == 1 {
        return crate::specfun::gamma_sum(&GammaSumSpec {
            n,
            m: m_horizon,
            sigma,
        });
    }
    let g_tot = config.total();
    if m_horizon <= ALTERNATING_MAX_HORIZON {
        psi_alternating(n, m_horizon, sigma, g_ell, g_tot)
    } else {
        psi_quadrature(n, m_horizon, sigma, g_ell, g_tot)
    }
}

fn psi_alternating(n: u64, m_horizon: u64, sigma: f64, g_ell: f64, g_tot: f64) -> Result<f64> {
    // Multiplicative recurrences for C(M,m), (γ_ℓ)_m/(|γ|)_m and B(m-σ, N+1).
    let nf = n as f64;
    let mut choose = m_horizon as f64;
    let mut ratio = g_ell / g_tot;
    let mut beta = log_beta(1.0 - sigma, nf + 1.0)?.exp();
    let mut sum = 0.0;
    for m in 1..=m_horizon {
        let term = choose * ratio * beta;
        sum += if m % 2 == 1 { term } else { -term };
        let mf = m as f64;
        choose *= (m_horizon - m) as f64 / (mf + 1.0);
        ratio *= (g_ell + mf) / (g_tot + mf);
        beta *= (mf - sigma) / (nf + 1.0 + mf - sigma);
    }
    Ok(sigma * sum)
}

fn psi_quadrature(n: u64, m_horizon: u64, sigma: f64, g_ell: f64, g_tot: f64) -> Result<f64> {
    let order = quadrature_order(m_horizon);
    let rule_y = beta_rule(order, 1.0 - sigma, n as f64 + 1.0)?;
    let rule_x = beta_rule(order, g_ell, g_tot - g_ell)?;
    let mf = m_horizon as f64;
    let expect = rule_y.expect(|y| {
        rule_x.expect(|x| {
            let xy = x * y;
            // (1 - (1-xy)^M)/y, with the power in log space for accuracy.
            (1.0 - (mf * (-xy).ln_1p()).exp()) / y
        })
    });
    Ok(sigma * log_beta(1.0 - sigma, n as f64 + 1.0)?.exp() * expect)
}

/// Scaled posterior: U_{N,ℓ}^(M) | data ~ NegBin(K_N+c+1, ψ/(ψ+γ_0^(N)+β)).
pub fn condiment_posterior_unseen(
    params: &SbspParams,
    config: &CondimentConfig,
    counts: &CondimentCounts,
    m_horizon: u64,
    ell: usize,
) -> Result<DiscretePosterior> {
    if counts.n == 0 || m_horizon == 0 {
        return Err(Error::domain(
            "condiment posterior needs n >= 1 and M >= 1".to_string(),
        ));
    }
    let tail = psi(counts.n, m_horizon, params.sigma, config, ell)?;
    let mut cur = BetaSumCursor::new(params.sigma)?;
    cur.advance_to(counts.n);
    negbin_from_tail(counts.k, params.c, params.beta, cur.total(), tail)
}

/// Non-scaled (stable-Beta-Dirichlet) posterior: Poisson whose rate depends
/// on the data only through N, never through K_N or the per-feature counts.
pub fn sbd_posterior_unseen(
    params: &SbbParams,
    config: &CondimentConfig,
    n: u64,
    m_horizon: u64,
    ell: usize,
) -> Result<DiscretePosterior> {
    let g_ell = config.weight(ell)?;
    if config.q() == 1 {
        return sbb_posterior_unseen(params, n, m_horizon);
    }
    if m_horizon == 0 {
        return DiscretePosterior::poisson(0.0);
    }
    let g_tot = config.total();
    let (theta, alpha, kappa) = (params.theta, params.alpha, params.kappa);
    let nf = n as f64;
    let rate = if m_horizon <= ALTERNATING_MAX_HORIZON {
        let mut choose = m_horizon as f64;
        let mut ratio = g_ell / g_tot;
        let mut beta = log_beta(1.0 - alpha, nf + alpha + kappa)?.exp();
        let mut sum = 0.0;
        for m in 1..=m_horizon {
            let term = choose * ratio * beta;
            sum += if m % 2 == 1 { term } else { -term };
            let mf = m as f64;
            choose *= (m_horizon - m) as f64 / (mf + 1.0);
            ratio *= (g_ell + mf) / (g_tot + mf);
            beta *= (mf - alpha) / (nf + kappa + mf);
        }
        theta * sum
    } else {
        let order = quadrature_order(m_horizon);
        let rule_y = beta_rule(order, 1.0 - alpha, nf + alpha + kappa)?;
        let rule_x = beta_rule(order, g_ell, g_tot - g_ell)?;
        let mf = m_horizon as f64;
        let expect = rule_y.expect(|y| {
            rule_x.expect(|x| {
                let xy = x * y;
                (1.0 - (mf * (-xy).ln_1p()).exp()) / y
            })
        });
        theta * log_beta(1.0 - alpha, nf + alpha + kappa)?.exp() * expect
    };
    DiscretePosterior::poisson(rate.max(0.0))
}
