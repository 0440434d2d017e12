//! Deterministic special-function kernels and discrete-distribution
//! primitives shared by every model module.

mod discrete;
mod gamma;
mod quad;

pub use discrete::{DiscretePosterior, Quantile};
pub use gamma::{gamma_quantile, ln_choose, ln_gamma, log_beta, reg_lower_gamma};
pub use quad::{beta_rule, gauss_jacobi, BetaRule};

use crate::error::{Error, Result};

/// Stable index σ must stay inside the clamped open interval; values at or
/// beyond the guard band make the Beta-function arguments degenerate.
pub const SIGMA_MIN: f64 = 1e-6;
pub const SIGMA_MAX: f64 = 1.0 - 1e-6;

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if !sigma.is_finite() || !(SIGMA_MIN..=SIGMA_MAX).contains(&sigma) {
        return Err(Error::domain(format!(
            "sigma must lie in [{SIGMA_MIN}, {SIGMA_MAX}], got {sigma}"
        )));
    }
    Ok(())
}

/// Arguments of the Beta-sum γ_n^(m) = σ Σ_{i=1..m} B(1-σ, n+i).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSumSpec {
    /// Conditioning sample size n >= 0.
    pub n: u64,
    /// Extrapolation horizon m >= 1.
    pub m: u64,
    /// Stable index in the clamped (0,1) band.
    pub sigma: f64,
}

/// Arguments of ρ_n^(m,r) = C(m,r) σ B(r-σ, n+m-r+1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSpec {
    pub n: u64,
    pub m: u64,
    /// Prevalence 1 <= r <= m.
    pub r: u64,
    pub sigma: f64,
}

/// Running prefix sums S_j = σ Σ_{i=1..j} B(1-σ, i).
///
/// The recurrence B(1-σ, i+1) = B(1-σ, i) · i/(i+1-σ) starts from the exact
/// seed B(1-σ, 1) = 1/(1-σ) and the sum is Kahan-compensated, so every
/// partial sum along one pass is the same f64 regardless of where the pass
/// is later stopped. Tail sums γ_n^(m) = S_{n+m} - S_n computed this way
/// satisfy the telescoping identity γ_0^(n+m) - γ_n^(m) = γ_0^(n) to a few
/// ulps even when the tail dwarfs the head.
#[derive(Debug, Clone)]
pub struct BetaSumCursor {
    sigma: f64,
    i: u64,
    beta: f64,
    sum: f64,
    comp: f64,
}

impl BetaSumCursor {
    pub fn new(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(BetaSumCursor {
            sigma,
            i: 0,
            beta: 0.0,
            sum: 0.0,
            comp: 0.0,
        })
    }

    /// Index of the last term added.
    pub fn index(&self) -> u64 {
        self.i
    }

    /// B(1-σ, i) for the current index; 0 before the first step.
    pub fn last_beta(&self) -> f64 {
        self.beta
    }

    /// Add the next term σ·B(1-σ, i+1).
    pub fn step(&mut self) {
        let next = self.i + 1;
        self.beta = if next == 1 {
            1.0 / (1.0 - self.sigma)
        } else {
            self.beta * ((next - 1) as f64 / (next as f64 - self.sigma))
        };
        let y = self.sigma * self.beta - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
        self.i = next;
    }

    pub fn advance_to(&mut self, j: u64) {
        while self.i < j {
            self.step();
        }
    }

    /// S_i, the compensated prefix sum up to the current index.
    pub fn total(&self) -> f64 {
        self.sum - self.comp
    }
}

/// γ_n^(m) = σ Σ_{i=1..m} B(1-σ, n+i), monotone increasing in m.
pub fn gamma_sum(spec: &GammaSumSpec) -> Result<f64> {
    if spec.m == 0 {
        return Err(Error::domain(
            "gamma_sum horizon m must be >= 1".to_string(),
        ));
    }
    let mut cur = BetaSumCursor::new(spec.sigma)?;
    cur.advance_to(spec.n);
    let head = cur.total();
    cur.advance_to(spec.n + spec.m);
    Ok(cur.total() - head)
}

/// ρ_n^(m,r) = C(m,r) σ B(r-σ, n+m-r+1), the binomial coefficient in log space.
pub fn rho(spec: &RhoSpec) -> Result<f64> {
    check_sigma(spec.sigma)?;
    if spec.r == 0 || spec.r > spec.m {
        return Err(Error::domain(format!(
            "prevalence r must satisfy 1 <= r <= m, got r={}, m={}",
            spec.r, spec.m
        )));
    }
    if spec.r == 1 && spec.m == 1 {
        // ρ_n^(1,1) ≡ γ_n^(1); evaluate through the same prefix path so the
        // two posterior laws coincide bit-for-bit at M = 1.
        return gamma_sum(&GammaSumSpec {
            n: spec.n,
            m: 1,
            sigma: spec.sigma,
        });
    }
    let a = spec.r as f64 - spec.sigma;
    let b = (spec.n + spec.m - spec.r + 1) as f64;
    let ln = ln_choose(spec.m, spec.r) + spec.sigma.ln() + log_beta(a, b)?;
    Ok(ln.exp())
}
