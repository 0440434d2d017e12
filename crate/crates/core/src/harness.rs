//! Replicated evaluation harness: subsample training sets, fit each method,
//! extrapolate over every horizon, score accuracy against the held-out
//! truth, and assemble deterministic plot-ready CSV tables.

use std::collections::HashMap;
use std::str::FromStr;

use rayon::prelude::*;

use crate::baselines::{good_toulmin, jackknife, sbb_posterior_unseen, FreqSpectrum, GtSmoothing};
use crate::ebayes::{fit_sbb, fit_sbsp, FitConfig};
use crate::error::{Error, Result};
use crate::featureset::{derive_seed, BinaryFeatureMatrix, FeatureCounts};
use crate::sbsp::{posterior_unseen, posterior_unseen_rare};
use crate::specfun::DiscretePosterior;

/// Environment variable capping harness parallelism.
pub const THREADS_ENV: &str = "UNSEENKIT_THREADS";

/// Inputs of the percentage-accuracy metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyInput {
    /// Distinct count observed at N.
    pub k_n: u64,
    /// Predicted number of new features.
    pub estimate: f64,
    /// True distinct count at N+M.
    pub k_nm: u64,
}

/// 1 - min(|K_N + U - K_{N+M}| / K_{N+M}, 1): equals 1 for a perfect
/// prediction and clamps to 0 once the error reaches 100%.
pub fn accuracy(input: &AccuracyInput) -> Result<f64> {
    if input.k_nm == 0 {
        return Err(Error::domain(
            "accuracy needs a positive true count".to_string(),
        ));
    }
    let err = (input.k_n as f64 + input.estimate - input.k_nm as f64).abs() / input.k_nm as f64;
    Ok(1.0 - err.min(1.0))
}

/// Inputs of the interval-coverage metric.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageInput {
    pub intervals: Vec<(f64, f64)>,
    pub truth: Vec<f64>,
    pub alpha: f64,
}

/// Fraction of replicates whose interval contains the truth.
pub fn coverage(input: &CoverageInput) -> Result<f64> {
    if input.intervals.is_empty() || input.intervals.len() != input.truth.len() {
        return Err(Error::domain(
            "coverage needs equally many intervals and truths, at least one".to_string(),
        ));
    }
    if input.intervals.iter().any(|(lo, hi)| lo > hi) {
        return Err(Error::domain(
            "interval endpoints must satisfy lo <= hi".to_string(),
        ));
    }
    let hits = input
        .intervals
        .iter()
        .zip(&input.truth)
        .filter(|((lo, hi), t)| *lo <= **t && **t <= *hi)
        .count();
    Ok(hits as f64 / input.intervals.len() as f64)
}

/// An estimation method entered in a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sbsp,
    Sbb,
    Jackknife(u32),
    GoodToulmin(GtSmoothing),
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::Sbsp => "sbsp".to_string(),
            Method::Sbb => "sbb".to_string(),
            Method::Jackknife(order) => format!("jackknife:{order}"),
            Method::GoodToulmin(s) => format!("gt:{}", s.as_str()),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sbsp" => return Ok(Method::Sbsp),
            "sbb" => return Ok(Method::Sbb),
            _ => {}
        }
        if let Some(order) = s.strip_prefix("jackknife:") {
            let order: u32 = order
                .parse()
                .map_err(|_| Error::domain(format!("bad jackknife order in {s:?}")))?;
            if !(1..=4).contains(&order) {
                return Err(Error::domain(format!(
                    "jackknife order must be 1..4 in {s:?}"
                )));
            }
            return Ok(Method::Jackknife(order));
        }
        if let Some(sm) = s.strip_prefix("gt:") {
            let smoothing = match sm {
                "none" => GtSmoothing::None,
                "binomial" => GtSmoothing::Binomial,
                "poisson" => GtSmoothing::Poisson,
                _ => return Err(Error::domain(format!("unknown smoothing in {s:?}"))),
            };
            return Ok(Method::GoodToulmin(smoothing));
        }
        Err(Error::domain(format!(
            "unknown method {s:?}; expected sbsp, sbb, jackknife:J, gt:SMOOTHING"
        )))
    }
}

/// Training-set size: an absolute count or a fraction of the dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainSize {
    Count(u64),
    Fraction(f64),
}

impl TrainSize {
    fn resolve(&self, total: usize) -> Result<usize> {
        let n = match *self {
            TrainSize::Count(n) => n as usize,
            TrainSize::Fraction(f) => {
                if f <= 0.0 || f >= 1.0 || f.is_nan() {
                    return Err(Error::domain(format!(
                        "training fraction must be in (0,1), got {f}"
                    )));
                }
                ((f * total as f64).floor() as usize).max(1)
            }
        };
        if n == 0 || n >= total {
            return Err(Error::domain(format!(
                "training size {n} must satisfy 1 <= N < {total}"
            )));
        }
        Ok(n)
    }
}

impl FromStr for TrainSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains('.') {
            let f: f64 = s
                .parse()
                .map_err(|_| Error::domain(format!("bad training fraction {s:?}")))?;
            Ok(TrainSize::Fraction(f))
        } else {
            let n: u64 = s
                .parse()
                .map_err(|_| Error::domain(format!("bad training size {s:?}")))?;
            Ok(TrainSize::Count(n))
        }
    }
}

/// Benchmark sweep configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub methods: Vec<Method>,
    pub train: TrainSize,
    pub replicates: u32,
    pub seed: u64,
    /// Score the rare-feature problem at this prevalence instead of totals.
    pub rare_r: Option<u64>,
    /// Credible levels; the first populates the lo/hi report columns.
    pub alpha_grid: Vec<f64>,
    /// Multi-start budget for the per-replicate fits.
    pub fit_starts: u32,
    /// Also refit on every (N-1)-subset of each training set; those rows tag
    /// the method as `name:looI` with n = N-1.
    pub leave_one_out: bool,
}

impl BenchmarkConfig {
    pub fn new(methods: Vec<Method>, train: TrainSize, replicates: u32, seed: u64) -> Self {
        BenchmarkConfig {
            methods,
            train,
            replicates,
            seed,
            rare_r: None,
            alpha_grid: Vec::new(),
            fit_starts: 10,
            leave_one_out: false,
        }
    }
}

/// One report line: (method, replicate, horizon) with estimate, truth,
/// accuracy, optional interval and a status code ("ok" or an error tag).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub replicate: u32,
    pub n: u64,
    pub m: u64,
    pub estimate: Option<f64>,
    pub truth: Option<u64>,
    pub accuracy: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub status: String,
}

impl ReportRow {
    fn failure(method: &str, replicate: u32, n: u64, m: u64, status: &str) -> Self {
        ReportRow {
            method: method.to_string(),
            replicate,
            n,
            m,
            estimate: None,
            truth: None,
            accuracy: None,
            lo: None,
            hi: None,
            status: status.to_string(),
        }
    }
}

pub const REPORT_HEADER: &str = "method,replicate,n,m,estimate,truth,accuracy,lo,hi,status";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

fn fmt_opt_f(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.method,
                r.replicate,
                r.n,
                r.m,
                fmt_opt_f(r.estimate),
                r.truth.map(|t| t.to_string()).unwrap_or_default(),
                fmt_opt_f(r.accuracy),
                fmt_opt_f(r.lo),
                fmt_opt_f(r.hi),
                r.status
            ));
        }
        out
    }

    /// Median accuracy over ok rows of a method at a given horizon, with the
    /// number of successes.
    pub fn median_accuracy(&self, method: &str, m: u64) -> Option<(f64, usize)> {
        let mut vals: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.method == method && r.m == m && r.status == "ok")
            .filter_map(|r| r.accuracy)
            .collect();
        if vals.is_empty() {
            return None;
        }
        vals.sort_by(f64::total_cmp);
        let mid = vals.len() / 2;
        let median = if vals.len() % 2 == 1 {
            vals[mid]
        } else {
            0.5 * (vals[mid - 1] + vals[mid])
        };
        Some((median, vals.len()))
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                builder = builder.num_threads(n);
            }
        }
    }
    builder
        .build()
        .map_err(|e| Error::numeric(format!("thread pool construction failed: {e}")))
}

/// Distinct-count curve restricted to features seen exactly `r` times:
/// out[l-1] = #{features with frequency r in the first l samples}.
fn rare_curve(matrix: &BinaryFeatureMatrix, r: u64) -> Vec<u64> {
    let mut freq: HashMap<u64, u64> = HashMap::new();
    let mut count_r = 0u64;
    let mut out = Vec::with_capacity(matrix.len());
    for sample in matrix.samples() {
        for &id in sample {
            let e = freq.entry(id).or_insert(0);
            if *e == r {
                count_r -= 1;
            }
            *e += 1;
            if *e == r {
                count_r += 1;
            }
        }
        out.push(count_r);
    }
    out
}

struct Replicate {
    perm: BinaryFeatureMatrix,
    train: FeatureCounts,
    /// truth[m-1] = target count at N+m (total or rare-r flavor).
    truth: Vec<u64>,
    /// Baseline at N the estimates are added to (K_N or K_{N,r}).
    base: u64,
}

fn prepare_replicate(
    matrix: &BinaryFeatureMatrix,
    n: usize,
    rare_r: Option<u64>,
    seed: u64,
) -> Result<Replicate> {
    let perm = matrix.subsample(matrix.len(), seed)?;
    let train = perm.counts(n)?;
    let (truth, base) = match rare_r {
        None => {
            let full = perm.counts(perm.len())?;
            (full.curve[n..].to_vec(), train.k)
        }
        Some(r) => {
            let curve = rare_curve(&perm, r);
            let base = curve[n - 1];
            (curve[n..].to_vec(), base)
        }
    };
    Ok(Replicate {
        perm,
        train,
        truth,
        base,
    })
}

/// Estimates for one method over every horizon 1..=M, plus the optional
/// central interval on the target count at the first alpha level.
fn method_estimates(
    method: Method,
    train: &FeatureCounts,
    m_max: u64,
    rare_r: Option<u64>,
    alpha: Option<f64>,
    fit_config: &FitConfig,
) -> Result<Vec<(f64, Option<(f64, f64)>)>> {
    let n = train.n;
    let base_k = train.k;
    let interval_from = |law: &DiscretePosterior, base: u64| -> Result<Option<(f64, f64)>> {
        match alpha {
            None => Ok(None),
            Some(a) => {
                let (lo, hi) = law.central_interval(a)?;
                Ok(Some((
                    base as f64 + lo.value as f64,
                    base as f64 + hi.value as f64,
                )))
            }
        }
    };
    let mut out = Vec::with_capacity(m_max as usize);
    match method {
        Method::Sbsp => {
            let fit = fit_sbsp(train, fit_config)?;
            for m in 1..=m_max {
                let law = match rare_r {
                    None => posterior_unseen(&fit.params, n, base_k, m)?,
                    Some(r) => {
                        if r > m {
                            // Horizon too short for the prevalence: nothing
                            // can appear r times yet.
                            out.push((0.0, None));
                            continue;
                        }
                        posterior_unseen_rare(&fit.params, n, base_k, m, r)?
                    }
                };
                let ivl = interval_from(&law, if rare_r.is_none() { base_k } else { 0 })?;
                out.push((law.mean(), ivl));
            }
        }
        Method::Sbb => {
            if rare_r.is_some() {
                return Err(Error::domain("rare-unsupported".to_string()));
            }
            let fit = fit_sbb(train, fit_config)?;
            for m in 1..=m_max {
                let law = sbb_posterior_unseen(&fit.params, n, m)?;
                let ivl = interval_from(&law, base_k)?;
                out.push((law.mean(), ivl));
            }
        }
        Method::Jackknife(order) => {
            if rare_r.is_some() {
                return Err(Error::domain("rare-unsupported".to_string()));
            }
            let spectrum = FreqSpectrum::from_counts(train);
            let estimate = jackknife(&spectrum, order)?;
            for _ in 1..=m_max {
                out.push((estimate, None));
            }
        }
        Method::GoodToulmin(smoothing) => {
            if rare_r.is_some() {
                return Err(Error::domain("rare-unsupported".to_string()));
            }
            let spectrum = FreqSpectrum::from_counts(train);
            for m in 1..=m_max {
                out.push((good_toulmin(&spectrum, m, smoothing)?, None));
            }
        }
    }
    Ok(out)
}

fn rows_for_method(
    method: Method,
    name: &str,
    replicate: u32,
    rep: &Replicate,
    config: &BenchmarkConfig,
    fit_seed: u64,
) -> Vec<ReportRow> {
    let n = rep.train.n;
    let m_max = rep.truth.len() as u64;
    let fit_config = FitConfig {
        starts: config.fit_starts,
        seed: fit_seed,
        ..FitConfig::default()
    };
    let alpha = config.alpha_grid.first().copied();
    let estimates =
        match method_estimates(method, &rep.train, m_max, config.rare_r, alpha, &fit_config) {
            Ok(e) => e,
            Err(err) => {
                let status = match &err {
                    Error::Domain(msg) if msg == "rare-unsupported" => "rare-unsupported",
                    other => other.status_code(),
                };
                // One marker row per replicate for unsupported-rare methods;
                // per-horizon failure rows otherwise.
                if status == "rare-unsupported" {
                    return vec![ReportRow::failure(name, replicate, n, 0, status)];
                }
                return (1..=m_max)
                    .map(|m| ReportRow::failure(name, replicate, n, m, status))
                    .collect();
            }
        };
    let base = rep.base;
    estimates
        .into_iter()
        .zip(1..=m_max)
        .map(|((estimate, interval), m)| {
            let truth = rep.truth[m as usize - 1];
            let (acc, status) = match accuracy(&AccuracyInput {
                k_n: base,
                estimate,
                k_nm: truth,
            }) {
                Ok(a) => (Some(a), "ok".to_string()),
                Err(_) => (None, "accuracy-undefined".to_string()),
            };
            ReportRow {
                method: name.to_string(),
                replicate,
                n,
                m,
                estimate: Some(estimate),
                truth: Some(truth),
                accuracy: acc,
                lo: interval.map(|(lo, _)| lo),
                hi: interval.map(|(_, hi)| hi),
                status,
            }
        })
        .collect()
}

fn replicate_rows(
    matrix: &BinaryFeatureMatrix,
    n: usize,
    config: &BenchmarkConfig,
    replicate: u32,
) -> Vec<ReportRow> {
    let seed_rep = derive_seed(config.seed, replicate as u64);
    let rep = match prepare_replicate(matrix, n, config.rare_r, seed_rep) {
        Ok(r) => r,
        Err(err) => {
            return config
                .methods
                .iter()
                .map(|m| ReportRow::failure(&m.name(), replicate, n as u64, 0, err.status_code()))
                .collect();
        }
    };
    let mut rows = Vec::new();
    for (mi, &method) in config.methods.iter().enumerate() {
        let fit_seed = derive_seed(seed_rep, 1_000 + mi as u64);
        rows.extend(rows_for_method(
            method,
            &method.name(),
            replicate,
            &rep,
            config,
            fit_seed,
        ));
        if config.leave_one_out {
            rows.extend(loo_rows(method, replicate, &rep, config, fit_seed));
        }
    }
    rows
}

/// Leave-one-out stability rows: refit on each (N-1)-subset of the training
/// prefix and predict the same targets K_{N+m} (horizon m+1 from N-1
/// samples). Rows are tagged `method:looI`.
fn loo_rows(
    method: Method,
    replicate: u32,
    rep: &Replicate,
    config: &BenchmarkConfig,
    fit_seed: u64,
) -> Vec<ReportRow> {
    let n = rep.train.n as usize;
    let m_max = rep.truth.len() as u64;
    let fit_config = FitConfig {
        starts: config.fit_starts,
        seed: fit_seed,
        ..FitConfig::default()
    };
    let mut rows = Vec::new();
    for leave in 0..n {
        let name = format!("{}:loo{leave}", method.name());
        let samples: Vec<Vec<u64>> = rep
            .perm
            .samples()
            .iter()
            .take(n)
            .enumerate()
            .filter(|(i, _)| *i != leave)
            .map(|(_, s)| s.clone())
            .collect();
        let sub = BinaryFeatureMatrix::from_samples(samples);
        let train = match sub.counts(n - 1) {
            Ok(c) => c,
            Err(e) => {
                rows.push(ReportRow::failure(
                    &name,
                    replicate,
                    n as u64 - 1,
                    0,
                    e.status_code(),
                ));
                continue;
            }
        };
        // Horizon m+1 from N-1 samples targets the same N+m totals.
        match method_estimates(method, &train, m_max + 1, config.rare_r, None, &fit_config) {
            Ok(estimates) => {
                for m in 1..=m_max {
                    let (estimate, _) = estimates[m as usize];
                    let truth = rep.truth[m as usize - 1];
                    let base = if config.rare_r.is_none() { train.k } else { 0 };
                    let acc = accuracy(&AccuracyInput {
                        k_n: base,
                        estimate,
                        k_nm: truth,
                    })
                    .ok();
                    rows.push(ReportRow {
                        method: name.clone(),
                        replicate,
                        n: train.n,
                        m,
                        estimate: Some(estimate),
                        truth: Some(truth),
                        accuracy: acc,
                        lo: None,
                        hi: None,
                        status: if acc.is_some() {
                            "ok"
                        } else {
                            "accuracy-undefined"
                        }
                        .to_string(),
                    });
                }
            }
            Err(err) => {
                let status = match &err {
                    Error::Domain(msg) if msg == "rare-unsupported" => "rare-unsupported",
                    other => other.status_code(),
                };
                rows.push(ReportRow::failure(
                    &name,
                    replicate,
                    n as u64 - 1,
                    0,
                    status,
                ));
            }
        }
    }
    rows
}

/// Run the full benchmark sweep. Rows come back sorted by
/// (method, replicate, horizon) so reports are byte-stable regardless of
/// the parallel schedule.
pub fn run_benchmark(matrix: &BinaryFeatureMatrix, config: &BenchmarkConfig) -> Result<Report> {
    if config.methods.is_empty() {
        return Err(Error::domain(
            "benchmark needs at least one method".to_string(),
        ));
    }
    if config.replicates == 0 {
        return Err(Error::domain(
            "benchmark needs at least one replicate".to_string(),
        ));
    }
    if let Some(a) = config.alpha_grid.first() {
        if *a <= 0.0 || *a >= 1.0 || a.is_nan() {
            return Err(Error::domain(format!(
                "credible level must be in (0,1), got {a}"
            )));
        }
    }
    if let Some(r) = config.rare_r {
        if r == 0 {
            return Err(Error::domain("rare prevalence must be >= 1".to_string()));
        }
    }
    let n = config.train.resolve(matrix.len())?;
    let pool = thread_pool()?;
    let mut rows: Vec<ReportRow> = pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|s| replicate_rows(matrix, n, config, s))
            .reduce(Vec::new, |mut acc, mut part| {
                acc.append(&mut part);
                acc
            })
    });
    rows.sort_by(|a, b| {
        a.method
            .cmp(&b.method)
            .then(a.replicate.cmp(&b.replicate))
            .then(a.m.cmp(&b.m))
    });
    Ok(Report { rows })
}

/// Coverage sweep configuration (the calibration protocol).
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageConfig {
    pub train: u64,
    pub replicates: u32,
    pub alpha_grid: Vec<f64>,
    pub seed: u64,
    pub fit_starts: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow {
    pub method: String,
    pub alpha: f64,
    pub coverage: f64,
    pub n_success: u32,
    pub n_total: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
}

pub const COVERAGE_HEADER: &str = "method,alpha,coverage,n_success,n_total";

impl CoverageReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(COVERAGE_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.6},{:.6},{},{}\n",
                r.method, r.alpha, r.coverage, r.n_success, r.n_total
            ));
        }
        out
    }

    pub fn coverage_of(&self, method: &str, alpha: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && (r.alpha - alpha).abs() < 1e-12)
            .map(|r| r.coverage)
    }
}

/// Central credible intervals for K_{N+M} under both Bayesian methods,
/// refit per replicate; coverage is the fraction of successful replicates
/// whose interval contains the realized total distinct count.
pub fn run_coverage(
    matrix: &BinaryFeatureMatrix,
    config: &CoverageConfig,
) -> Result<CoverageReport> {
    if config.replicates == 0 {
        return Err(Error::domain(
            "coverage needs at least one replicate".to_string(),
        ));
    }
    if config.alpha_grid.is_empty() || config.alpha_grid.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(Error::domain(
            "alpha grid must be nonempty with levels in (0,1)".to_string(),
        ));
    }
    let n = TrainSize::Count(config.train).resolve(matrix.len())?;
    let m_max = (matrix.len() - n) as u64;
    let truth = matrix.counts(matrix.len())?.k as f64;
    let pool = thread_pool()?;

    // Per replicate and method: the posterior law plus the K_N offset.
    type RepLaws = Vec<(String, Option<(DiscretePosterior, u64)>)>;
    let laws: Vec<RepLaws> = pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|s| {
                let seed_rep = derive_seed(config.seed, s as u64);
                let rep = match prepare_replicate(matrix, n, None, seed_rep) {
                    Ok(r) => r,
                    Err(_) => {
                        return vec![("sbsp".to_string(), None), ("sbb".to_string(), None)];
                    }
                };
                let mut out: RepLaws = Vec::new();
                let fit_config = FitConfig {
                    starts: config.fit_starts,
                    seed: derive_seed(seed_rep, 1_000),
                    ..FitConfig::default()
                };
                out.push((
                    "sbsp".to_string(),
                    fit_sbsp(&rep.train, &fit_config)
                        .and_then(|fit| {
                            posterior_unseen(&fit.params, rep.train.n, rep.train.k, m_max)
                        })
                        .ok()
                        .map(|law| (law, rep.train.k)),
                ));
                let fit_config = FitConfig {
                    starts: config.fit_starts,
                    seed: derive_seed(seed_rep, 1_001),
                    ..FitConfig::default()
                };
                out.push((
                    "sbb".to_string(),
                    fit_sbb(&rep.train, &fit_config)
                        .and_then(|fit| sbb_posterior_unseen(&fit.params, rep.train.n, m_max))
                        .ok()
                        .map(|law| (law, rep.train.k)),
                ));
                out
            })
            .collect()
    });

    let mut rows = Vec::new();
    for method in ["sbsp", "sbb"] {
        for &alpha in &config.alpha_grid {
            let mut intervals = Vec::new();
            for rep_laws in &laws {
                let entry = rep_laws.iter().find(|(name, _)| name == method);
                if let Some((_, Some((law, k_base)))) = entry {
                    if let Ok((lo, hi)) = law.central_interval(alpha) {
                        intervals.push((
                            *k_base as f64 + lo.value as f64,
                            *k_base as f64 + hi.value as f64,
                        ));
                    }
                }
            }
            let n_success = intervals.len() as u32;
            let cov = if intervals.is_empty() {
                f64::NAN
            } else {
                let truths = vec![truth; intervals.len()];
                coverage(&CoverageInput {
                    intervals,
                    truth: truths,
                    alpha,
                })?
            };
            rows.push(CoverageRow {
                method: method.to_string(),
                alpha,
                coverage: cov,
                n_success,
                n_total: config.replicates,
            });
        }
    }
    Ok(CoverageReport { rows })
}
