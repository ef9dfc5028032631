use rand::Rng;
use rand_distr::{Distribution, Exp, Weibull};
use serde::{Deserialize, Serialize};

use super::SimError;

/// Time-to-failure law of a single disk, in hours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LifetimeDistribution {
    Exponential {
        rate: f64,
    },
    Weibull {
        scale: f64,
        shape: f64,
    },
    /// Competing risks: the disk dies at the earlier of an exponential and a
    /// Weibull clock (hazards add).
    Mixture {
        rate: f64,
        scale: f64,
        shape: f64,
    },
}

impl LifetimeDistribution {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SimError::InvalidSpec(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        match *self {
            Self::Exponential { rate } => positive("rate", rate),
            Self::Weibull { scale, shape } => {
                positive("scale", scale)?;
                positive("shape", shape)
            }
            Self::Mixture { rate, scale, shape } => {
                positive("rate", rate)?;
                positive("scale", scale)?;
                positive("shape", shape)
            }
        }
    }

    pub(crate) fn sampler(&self) -> Result<LifetimeSampler, SimError> {
        self.validate()?;
        let bad = |e: &dyn std::fmt::Display| SimError::InvalidSpec(e.to_string());
        Ok(match *self {
            Self::Exponential { rate } => {
                LifetimeSampler::Exponential(Exp::new(rate).map_err(|e| bad(&e))?)
            }
            Self::Weibull { scale, shape } => {
                LifetimeSampler::Weibull(Weibull::new(scale, shape).map_err(|e| bad(&e))?)
            }
            Self::Mixture { rate, scale, shape } => LifetimeSampler::Mixture(
                Exp::new(rate).map_err(|e| bad(&e))?,
                Weibull::new(scale, shape).map_err(|e| bad(&e))?,
            ),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum LifetimeSampler {
    Exponential(Exp<f64>),
    Weibull(Weibull<f64>),
    Mixture(Exp<f64>, Weibull<f64>),
}

impl LifetimeSampler {
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Exponential(e) => e.sample(rng),
            Self::Weibull(w) => w.sample(rng),
            Self::Mixture(e, w) => {
                let a = e.sample(rng);
                let b = w.sample(rng);
                a.min(b)
            }
        }
    }
}
