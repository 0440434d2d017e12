//! The on-disk parameter document: a flat JSON object tagged by "model",
//! optionally carrying fit metadata.

use serde::{Deserialize, Serialize};

use crate::baselines::SbbParams;
use crate::error::{Error, Result};
use crate::sbsp::SbspParams;

/// Fit metadata attached to a parameter document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitMeta {
    pub loglik: f64,
    pub n: u64,
    pub k: u64,
    pub starts: u32,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ParamsDoc {
    Sbsp {
        sigma: f64,
        c: f64,
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        loglik: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        starts: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        converged: Option<bool>,
    },
    Sbb {
        theta: f64,
        alpha: f64,
        kappa: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        loglik: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        starts: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        converged: Option<bool>,
    },
}

impl ParamsDoc {
    pub fn sbsp(params: &SbspParams, meta: Option<&FitMeta>) -> Self {
        ParamsDoc::Sbsp {
            sigma: params.sigma,
            c: params.c,
            beta: params.beta,
            loglik: meta.map(|m| m.loglik),
            n: meta.map(|m| m.n),
            k: meta.map(|m| m.k),
            starts: meta.map(|m| m.starts),
            converged: meta.map(|m| m.converged),
        }
    }

    pub fn sbb(params: &SbbParams, meta: Option<&FitMeta>) -> Self {
        ParamsDoc::Sbb {
            theta: params.theta,
            alpha: params.alpha,
            kappa: params.kappa,
            loglik: meta.map(|m| m.loglik),
            n: meta.map(|m| m.n),
            k: meta.map(|m| m.k),
            starts: meta.map(|m| m.starts),
            converged: meta.map(|m| m.converged),
        }
    }

    pub fn model(&self) -> &'static str {
        match self {
            ParamsDoc::Sbsp { .. } => "sbsp",
            ParamsDoc::Sbb { .. } => "sbb",
        }
    }

    pub fn as_sbsp(&self) -> Result<SbspParams> {
        match *self {
            ParamsDoc::Sbsp { sigma, c, beta, .. } => SbspParams::new(sigma, c, beta),
            ParamsDoc::Sbb { .. } => Err(Error::domain(
                "expected an sbsp parameter document".to_string(),
            )),
        }
    }

    pub fn as_sbb(&self) -> Result<SbbParams> {
        match *self {
            ParamsDoc::Sbb {
                theta,
                alpha,
                kappa,
                ..
            } => SbbParams::new(theta, alpha, kappa),
            ParamsDoc::Sbsp { .. } => Err(Error::domain(
                "expected an sbb parameter document".to_string(),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("params serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: format!("invalid parameter document: {e}"),
        })
    }
}
