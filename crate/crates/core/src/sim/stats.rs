use serde::{Deserialize, Serialize};

use super::SimError;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// How one trial ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialOutcome {
    Loss(f64),
    Censored,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub completed: u64,
    pub censored: u64,
    pub mean: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
}

impl Summary {
    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / (self.completed + self.censored) as f64
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci95.0 <= x && x <= self.ci95.1
    }
}

/// Mean, standard error and normal-approximation 95% interval of the
/// uncensored trial times. Censored trials are counted, not averaged.
pub fn summarize(samples: &[TrialOutcome]) -> Result<Summary, SimError> {
    if samples.is_empty() {
        return Err(SimError::NoSamples);
    }
    let times: Vec<f64> = samples
        .iter()
        .filter_map(|s| match s {
            TrialOutcome::Loss(t) => Some(*t),
            TrialOutcome::Censored => None,
        })
        .collect();
    let censored = (samples.len() - times.len()) as u64;
    if times.is_empty() {
        return Err(SimError::AllCensored {
            trials: samples.len() as u64,
        });
    }
    if times.len() < 2 {
        return Err(SimError::TooFewSamples {
            completed: times.len() as u64,
        });
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let std_error = (var / n).sqrt();
    Ok(Summary {
        completed: times.len() as u64,
        censored,
        mean,
        std_error,
        ci95: (mean - Z95 * std_error, mean + Z95 * std_error),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp};

    fn losses(xs: &[f64]) -> Vec<TrialOutcome> {
        xs.iter().map(|&x| TrialOutcome::Loss(x)).collect()
    }

    #[test]
    fn constant_samples() {
        let s = summarize(&losses(&[1.0; 4])).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.std_error, 0.0);
        assert_eq!(s.ci95, (1.0, 1.0));
    }

    #[test]
    fn two_points() {
        let s = summarize(&losses(&[0.0, 2.0])).unwrap();
        assert_eq!(s.mean, 1.0);
        assert!((s.std_error - 1.0).abs() < 1e-15);
        assert!(s.contains(1.0));
    }

    #[test]
    fn exponential_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let exp = Exp::new(1.0).unwrap();
        let xs: Vec<f64> = (0..10_000).map(|_| exp.sample(&mut rng)).collect();
        let s = summarize(&losses(&xs)).unwrap();
        assert!((0.94..=1.06).contains(&s.mean), "{}", s.mean);
    }

    #[test]
    fn error_cases_are_distinct() {
        assert_eq!(summarize(&[]), Err(SimError::NoSamples));
        assert_eq!(
            summarize(&[TrialOutcome::Censored; 3]),
            Err(SimError::AllCensored { trials: 3 })
        );
        assert_eq!(
            summarize(&[TrialOutcome::Loss(1.0), TrialOutcome::Censored]),
            Err(SimError::TooFewSamples { completed: 1 })
        );
        let s = summarize(&[
            TrialOutcome::Loss(1.0),
            TrialOutcome::Loss(3.0),
            TrialOutcome::Censored,
        ])
        .unwrap();
        assert_eq!(s.censored, 1);
        assert_eq!(s.mean, 2.0);
    }
}
