//! Estimation of the number of unseen features from presence/absence data.
//!
//! Given N observed samples, each carrying a finite set of feature ids, the
//! library answers: how many new, hitherto-unseen features will M future
//! samples reveal? The main model is a stable-Beta scaled-process prior over
//! feature frequencies whose unseen-count posterior is a negative binomial
//! depending on the sample size and the number of distinct observed
//! features. Classical competitors (stable-Beta–Bernoulli, Burnham–Overton
//! jackknife, smoothed Good–Toulmin) and a replicated evaluation harness are
//! included.

pub mod baselines;
pub mod condiment;
pub mod ebayes;
pub mod error;
pub mod featureset;
pub mod harness;
pub mod params;
pub mod sbsp;
pub mod specfun;

pub use baselines::{FreqSpectrum, GtSmoothing, SbbParams};
pub use error::{Error, Result};
pub use featureset::{derive_seed, zipf_generate, BinaryFeatureMatrix, FeatureCounts, ZipfConfig};
pub use params::ParamsDoc;
pub use sbsp::{GammaLaw, SbspParams};
pub use specfun::{DiscretePosterior, Quantile};
