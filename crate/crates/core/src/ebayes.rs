//! Empirical-Bayes hyperparameter fitting: maximize the feature-allocation
//! log-likelihood with a multi-start Nelder–Mead simplex search over an
//! unconstrained reparametrization.

use rand::Rng;

use crate::baselines::{sbb_efpf_log, SbbParams};
use crate::error::{Error, Result};
use crate::featureset::{rng_from_seed, FeatureCounts};
use crate::sbsp::{efpf_log, SbspParams};
use crate::specfun::{SIGMA_MAX, SIGMA_MIN};

/// Optimizer budget and reproducibility knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Number of multi-start points, each drawn deterministically from `seed`.
    pub starts: u32,
    /// Iteration cap per start.
    pub max_iters: u32,
    /// Termination threshold on both the simplex diameter and the objective
    /// spread.
    pub tol: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            starts: 10,
            max_iters: 2000,
            tol: 1e-8,
            seed: 0,
        }
    }
}

/// Outcome of a single minimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: u64,
    pub iterations: u32,
    pub converged: bool,
}

/// Outcome of a multi-start fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<P> {
    pub params: P,
    /// Log-likelihood at `params`.
    pub loglik: f64,
    pub converged: bool,
    /// Objective evaluations summed over all starts.
    pub evaluations: u64,
    /// Index of the winning start (ties resolved to the lowest index).
    pub start_index: u32,
}

/// Nelder–Mead simplex descent with the standard coefficients
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
///
/// Non-finite objective values along the way act as a +inf barrier; a
/// non-finite value at `x0` is a domain error. Deterministic given `x0`.
pub fn minimize<F: Fn(&[f64]) -> f64>(
    objective: F,
    x0: &[f64],
    config: &FitConfig,
) -> Result<Minimum> {
    let dim = x0.len();
    if dim == 0 {
        return Err(Error::domain(
            "minimize needs at least one dimension".to_string(),
        ));
    }
    let mut evals: u64 = 0;
    let mut eval = |x: &[f64]| -> f64 {
        evals += 1;
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let f0 = eval(x0);
    if !f0.is_finite() {
        return Err(Error::domain(
            "objective is not finite at the starting point".to_string(),
        ));
    }

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut fvals: Vec<f64> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    fvals.push(f0);
    for i in 0..dim {
        let mut v = x0.to_vec();
        let step = 0.25 * v[i].abs().max(0.5);
        v[i] += step;
        let fv = eval(&v);
        simplex.push(v);
        fvals.push(fv);
    }

    let mut iterations = 0u32;
    let mut converged = false;
    while iterations < config.max_iters {
        iterations += 1;
        // Order vertices best-first; ties by index keep this deterministic.
        let mut idx: Vec<usize> = (0..=dim).collect();
        idx.sort_by(|&a, &b| fvals[a].total_cmp(&fvals[b]).then(a.cmp(&b)));
        let ordered: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let fordered: Vec<f64> = idx.iter().map(|&i| fvals[i]).collect();
        simplex = ordered;
        fvals = fordered;

        let spread = fvals[dim] - fvals[0];
        let diam = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        if diam <= config.tol && spread <= config.tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(c, w)| c + (c - w))
            .collect();
        let fr = eval(&reflect);

        if fr < fvals[0] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let fe = eval(&expand);
            if fe < fr {
                simplex[dim] = expand;
                fvals[dim] = fe;
            } else {
                simplex[dim] = reflect;
                fvals[dim] = fr;
            }
        } else if fr < fvals[dim - 1] {
            simplex[dim] = reflect;
            fvals[dim] = fr;
        } else if fr < fvals[dim] {
            // Outside contraction.
            let point: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + 0.5 * (r - c))
                .collect();
            let fc = eval(&point);
            if fc <= fr {
                simplex[dim] = point;
                fvals[dim] = fc;
            } else {
                shrink(&mut simplex, &mut fvals, &mut eval);
            }
        } else {
            // Inside contraction.
            let point: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + 0.5 * (w - c))
                .collect();
            let fc = eval(&point);
            if fc < fvals[dim] {
                simplex[dim] = point;
                fvals[dim] = fc;
            } else {
                shrink(&mut simplex, &mut fvals, &mut eval);
            }
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if fvals[i] < fvals[best] {
            best = i;
        }
    }
    Ok(Minimum {
        x: simplex[best].clone(),
        value: fvals[best],
        evaluations: evals,
        iterations,
        converged,
    })
}

fn shrink<F: FnMut(&[f64]) -> f64>(simplex: &mut [Vec<f64>], fvals: &mut [f64], eval: &mut F) {
    let best = simplex[0].clone();
    for i in 1..simplex.len() {
        for (v, b) in simplex[i].iter_mut().zip(&best) {
            *v = b + 0.5 * (*v - b);
        }
        fvals[i] = eval(&simplex[i]);
    }
}

/// One simplex run plus a restart from the solution: a fresh simplex at
/// the found point reopens directions a collapsed simplex lost, so the
/// accepted point is first-order stationary rather than merely small.
fn minimize_with_polish<F: Fn(&[f64]) -> f64 + Copy>(
    objective: F,
    x0: &[f64],
    config: &FitConfig,
) -> Result<Minimum> {
    let first = minimize(objective, x0, config)?;
    let second = minimize(objective, &first.x, config)?;
    let best = if second.value <= first.value {
        &second
    } else {
        &first
    };
    Ok(Minimum {
        x: best.x.clone(),
        value: best.value,
        evaluations: first.evaluations + second.evaluations,
        iterations: first.iterations + second.iterations,
        converged: first.converged && second.converged,
    })
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn sigma_from(x: f64) -> f64 {
    logistic(x).clamp(SIGMA_MIN, SIGMA_MAX)
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Maximize the scaled-process log-likelihood over (σ, c, β).
///
/// Reparametrization keeps every evaluated point feasible: σ through a
/// clamped logistic, c and β through exp. Start points: σ ~ U(0.1, 0.9),
/// c ~ logU(0.1, 100), β ~ logU(0.1, 10).
pub fn fit_sbsp(counts: &FeatureCounts, config: &FitConfig) -> Result<FitResult<SbspParams>> {
    counts.validate()?;
    if counts.k == 0 {
        return Err(Error::InsufficientSignal(
            "cannot fit on a dataset with zero observed features".to_string(),
        ));
    }
    let objective = |x: &[f64]| -> f64 {
        let params = match SbspParams::new(sigma_from(x[0]), x[1].exp(), x[2].exp()) {
            Ok(p) => p,
            Err(_) => return f64::INFINITY,
        };
        match efpf_log(&params, counts) {
            Ok(v) => -v,
            Err(_) => f64::INFINITY,
        }
    };
    let mut rng = rng_from_seed(config.seed);
    let starts = config.starts.max(1);
    let mut best: Option<(f64, Vec<f64>, bool, u32)> = None;
    let mut total_evals = 0u64;
    for s in 0..starts {
        let sigma0 = 0.1 + 0.8 * rng.random::<f64>();
        let c0 = log_uniform(&mut rng, 0.1, 100.0);
        let beta0 = log_uniform(&mut rng, 0.1, 10.0);
        let x0 = [logit(sigma0), c0.ln(), beta0.ln()];
        let m = minimize_with_polish(objective, &x0, config)?;
        total_evals += m.evaluations;
        let better = match &best {
            None => true,
            Some((val, _, _, _)) => m.value < *val,
        };
        if better {
            best = Some((m.value, m.x.clone(), m.converged, s));
        }
    }
    let (_, x, converged, start_index) = best.expect("at least one start");
    let params = SbspParams::new(sigma_from(x[0]), x[1].exp(), x[2].exp())?;
    let loglik = efpf_log(&params, counts)?;
    Ok(FitResult {
        params,
        loglik,
        converged,
        evaluations: total_evals,
        start_index,
    })
}

/// Maximize the stable-Beta–Bernoulli log-likelihood over (ϑ, α, κ), with
/// κ reparametrized as exp(y) - α to honor κ + α > 0.
pub fn fit_sbb(counts: &FeatureCounts, config: &FitConfig) -> Result<FitResult<SbbParams>> {
    counts.validate()?;
    if counts.k == 0 {
        return Err(Error::InsufficientSignal(
            "cannot fit on a dataset with zero observed features".to_string(),
        ));
    }
    let objective = |x: &[f64]| -> f64 {
        let alpha = sigma_from(x[1]);
        let params = match SbbParams::new(x[0].exp(), alpha, x[2].exp() - alpha) {
            Ok(p) => p,
            Err(_) => return f64::INFINITY,
        };
        match sbb_efpf_log(&params, counts) {
            Ok(v) => -v,
            Err(_) => f64::INFINITY,
        }
    };
    let mut rng = rng_from_seed(config.seed);
    let starts = config.starts.max(1);
    let mut best: Option<(f64, Vec<f64>, bool, u32)> = None;
    let mut total_evals = 0u64;
    for s in 0..starts {
        let theta0 = log_uniform(&mut rng, 0.1, 100.0);
        let alpha0 = 0.1 + 0.8 * rng.random::<f64>();
        let mass0 = log_uniform(&mut rng, 0.1, 10.0);
        let x0 = [theta0.ln(), logit(alpha0), mass0.ln()];
        let m = minimize_with_polish(objective, &x0, config)?;
        total_evals += m.evaluations;
        let better = match &best {
            None => true,
            Some((val, _, _, _)) => m.value < *val,
        };
        if better {
            best = Some((m.value, m.x.clone(), m.converged, s));
        }
    }
    let (_, x, converged, start_index) = best.expect("at least one start");
    let alpha = sigma_from(x[1]);
    let params = SbbParams::new(x[0].exp(), alpha, x[2].exp() - alpha)?;
    let loglik = sbb_efpf_log(&params, counts)?;
    Ok(FitResult {
        params,
        loglik,
        converged,
        evaluations: total_evals,
        start_index,
    })
}
