//! Laplace-domain route: `MTTDL = -d/ds [U(s) / V(s)]` at `s = 0`.
//!
//! `V(s) = beta_0(s)` where
//!
//! ```text
//! beta_i = (s + i mu + (N - i) lambda) beta_{i+1}
//!          - (i + 1)(N - i)(1 - alpha_i) mu lambda beta_{i+2},
//! beta_{K+1} = 1,  beta_j = 0 for j > K + 1,
//! ```
//!
//! and `U(s) = sum_{i=1..K} alpha_i prod_{j=0..i}((N - j) lambda)
//! prod_{j=1..i-1}(1 - alpha_j) beta_{i+1}(s)`. Each `beta` is carried as a
//! (value, derivative) pair at `s = 0`, so no numerical differentiation is
//! involved.
//!
//! The recursion subtracts nearly equal quantities whenever repair is much
//! faster than failure, and `V(0)` can lose every significant digit in
//! double precision. The double pass therefore tracks a running error
//! bound, and [`Precision::Auto`] re-evaluates the same recursion in exact
//! rational arithmetic when that bound is too loose.

use serde::{Deserialize, Serialize};

use super::arith::{Exact, Scalar, Tracked};
use super::{Diagnostics, MarkovChainSpec, MarkovError, Method, MttdlResult};

/// Relative error bound above which the double pass is not trusted.
pub const DOUBLE_PASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    /// Double precision with a running error bound; falls back to exact.
    #[default]
    Auto,
    Double,
    Exact,
}

/// Index range of the `(N - j) lambda` product in `U(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductConvention {
    /// `prod_{j=0..i}`: `U(0) = V(0)`, i.e. the loss density integrates to 1.
    #[default]
    Inclusive,
    /// `prod_{j=0..i-1}`, kept only to document that it disagrees with the
    /// closed-form K = 1 chain.
    Exclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LaplaceOptions {
    pub precision: Precision,
    pub convention: ProductConvention,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPair {
    pub value: f64,
    pub derivative: f64,
}

/// `V(0), V'(0), U(0), U'(0)` as `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceParts {
    pub v: f64,
    pub dv: f64,
    pub u: f64,
    pub du: f64,
}

struct Evaluation<T> {
    v: T,
    dv: T,
    u: T,
    du: T,
    /// `(V U' - U V') / V^2`; negative for a well-posed chain.
    quotient: T,
}

/// `beta_0..beta_{K+1}` at `s = 0`, indexed by `i`. `alpha` holds
/// `alpha_0..alpha_K`.
fn beta_pairs<T: Scalar>(n: u64, lambda: f64, mu: f64, alpha: &[f64]) -> Vec<(T, T)> {
    let k = alpha.len() - 1;
    let lam = T::lift(lambda);
    let rep = T::lift(mu);
    let mut beta = vec![(T::zero(), T::zero()); k + 3];
    beta[k + 1] = (T::one(), T::zero());
    for i in (0..=k).rev() {
        let alive = T::lift_count(n - i as u64);
        let exit = T::lift_count(i as u64) * rep.clone() + alive.clone() * lam.clone();
        let coupling = T::lift_count(i as u64 + 1)
            * alive
            * (T::one() - T::lift(alpha[i]))
            * rep.clone()
            * lam.clone();
        let (b1, d1) = beta[i + 1].clone();
        let (b2, d2) = beta[i + 2].clone();
        let value = exit.clone() * b1.clone() - coupling.clone() * b2;
        let derivative = b1 + exit * d1 - coupling * d2;
        beta[i] = (value, derivative);
    }
    beta
}

fn evaluate<T: Scalar>(
    n: u64,
    lambda: f64,
    mu: f64,
    alpha: &[f64],
    convention: ProductConvention,
) -> Evaluation<T> {
    let k = alpha.len() - 1;
    let beta = beta_pairs::<T>(n, lambda, mu, alpha);
    let lam = T::lift(lambda);
    let mut weight = match convention {
        ProductConvention::Inclusive => T::lift_count(n) * lam.clone(),
        ProductConvention::Exclusive => lam.clone(),
    };
    let (mut u, mut du) = (T::zero(), T::zero());
    for i in 1..=k {
        let factor = match convention {
            ProductConvention::Inclusive => T::lift_count(n - i as u64),
            ProductConvention::Exclusive => T::lift_count(n - i as u64 + 1),
        };
        weight = weight * factor * lam.clone();
        let coef = T::lift(alpha[i]) * weight.clone();
        let (b, d) = beta[i + 1].clone();
        u = u + coef.clone() * b;
        du = du + coef * d;
        weight = weight * (T::one() - T::lift(alpha[i]));
    }
    let (v, dv) = beta[0].clone();
    let quotient = (v.clone() * du.clone() - u.clone() * dv.clone()) / (v.clone() * v.clone());
    Evaluation {
        v,
        dv,
        u,
        du,
        quotient,
    }
}

/// `(beta_i(0), beta_i'(0))` for `i = 0..=K+1`, in double precision.
pub fn beta_at_zero(chain: &MarkovChainSpec) -> Vec<BetaPair> {
    let alpha = chain.alpha().with_zeroth();
    beta_pairs::<Tracked>(
        chain.total_disks(),
        chain.failure_rate(),
        chain.repair_rate(),
        &alpha,
    )
    .into_iter()
    .take(chain.k() + 2)
    .map(|(b, d)| BetaPair {
        value: b.value(),
        derivative: d.value(),
    })
    .collect()
}

/// `V(0), V'(0), U(0), U'(0)` evaluated exactly and rounded once.
pub fn laplace_parts(chain: &MarkovChainSpec, convention: ProductConvention) -> LaplaceParts {
    let alpha = chain.alpha().with_zeroth();
    let e = evaluate::<Exact>(
        chain.total_disks(),
        chain.failure_rate(),
        chain.repair_rate(),
        &alpha,
        convention,
    );
    LaplaceParts {
        v: e.v.value(),
        dv: e.dv.value(),
        u: e.u.value(),
        du: e.du.value(),
    }
}

/// MTTDL via the Laplace recursion with default options.
pub fn mttdl_laplace(chain: &MarkovChainSpec) -> Result<MttdlResult, MarkovError> {
    mttdl_laplace_with(chain, LaplaceOptions::default())
}

pub fn mttdl_laplace_with(
    chain: &MarkovChainSpec,
    options: LaplaceOptions,
) -> Result<MttdlResult, MarkovError> {
    let alpha = chain.alpha().with_zeroth();
    let k = chain.k();
    let mut warnings = Vec::new();

    let finish = |q: f64, bound: f64, precision: Precision, warnings: Vec<String>| {
        if q > 0.0 {
            return Err(MarkovError::SignFlip { value: q });
        }
        Ok(MttdlResult {
            mttdl_hours: -q,
            method: Method::Laplace,
            diagnostics: Diagnostics {
                k,
                alpha: chain.alpha().values().to_vec(),
                precision,
                relative_error_bound: bound,
                warnings,
            },
        })
    };

    if options.precision != Precision::Exact {
        let e = evaluate::<Tracked>(
            chain.total_disks(),
            chain.failure_rate(),
            chain.repair_rate(),
            &alpha,
            options.convention,
        );
        let q = e.quotient.value();
        let bound = e.quotient.error_bound() / q.abs();
        let trusted = q.is_finite() && bound.is_finite() && bound <= DOUBLE_PASS_TOLERANCE;
        if trusted && q < 0.0 {
            return finish(q, bound, Precision::Double, warnings);
        }
        let detail = if q.is_finite() {
            format!(
                "double pass relative error bound {bound:.3e} exceeds {DOUBLE_PASS_TOLERANCE:e}"
            )
        } else {
            "double pass produced a non-finite value".to_string()
        };
        if options.precision == Precision::Double {
            if !q.is_finite() {
                return Err(MarkovError::Conditioning {
                    stage: "double-precision recursion",
                    k,
                });
            }
            if e.v.is_zero() {
                return Err(MarkovError::Degenerate);
            }
            warnings.push(detail);
            return finish(q, bound, Precision::Double, warnings);
        }
        warnings.push(format!("{detail}; recomputed in exact arithmetic"));
    }

    let e = evaluate::<Exact>(
        chain.total_disks(),
        chain.failure_rate(),
        chain.repair_rate(),
        &alpha,
        options.convention,
    );
    if e.v.is_zero() {
        return Err(MarkovError::Degenerate);
    }
    let q = e.quotient.value();
    if !q.is_finite() {
        return Err(MarkovError::Conditioning {
            stage: "exact quotient",
            k,
        });
    }
    let bound = e.quotient.error_bound() / q.abs();
    finish(q, bound, Precision::Exact, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::AlphaVector;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn saturated_at_state_zero() {
        // K = 0: alpha_0 = 1, only the boundary pair survives.
        let beta = beta_pairs::<Tracked>(10, 0.1, 1.0, &[1.0]);
        assert_eq!(beta[1].0.value(), 1.0);
        assert_eq!(beta[1].1.value(), 0.0);
        assert!(rel(beta[0].0.value(), 1.0) < 1e-15);
    }

    #[test]
    fn one_step_by_hand() {
        let (n, lambda, mu) = (40u64, 0.01, 0.3);
        let chain =
            MarkovChainSpec::new(n, lambda, mu, AlphaVector::new(vec![1.0]).unwrap()).unwrap();
        let beta = beta_at_zero(&chain);
        assert_eq!(beta.len(), 3);
        assert!(rel(beta[1].value, mu + (n - 1) as f64 * lambda) < 1e-15);
        assert_eq!(beta[1].derivative, 1.0);
        assert_eq!(beta[2].value, 1.0);
        assert_eq!(beta[2].derivative, 0.0);
    }

    #[test]
    fn loss_density_integrates_to_one() {
        let alpha = AlphaVector::new(vec![0.0, 0.01, 0.3, 1.0]).unwrap();
        let chain = MarkovChainSpec::new(200, 1e-3, 0.05, alpha).unwrap();
        let p = laplace_parts(&chain, ProductConvention::Inclusive);
        assert!(rel(p.u, p.v) < 1e-14);
        // quotient-rule numerator is negative: MTTDL is its negation
        assert!(p.v * p.du - p.u * p.dv < 0.0);
    }

    #[test]
    fn beta_zero_vanishes_with_lambda() {
        let alpha = AlphaVector::new(vec![0.0, 1.0]).unwrap();
        let v0: Vec<f64> = (1..7)
            .map(|e| {
                let chain = MarkovChainSpec::new(20, 10f64.powi(-e), 1.0, alpha.clone()).unwrap();
                laplace_parts(&chain, ProductConvention::Inclusive).v
            })
            .collect();
        // V(0) ~ N(N-1)(N-2) lambda^3 for this K = 2 chain
        assert!(v0.iter().all(|&v| v > 0.0));
        assert!(v0.windows(2).skip(1).all(|w| w[1] < 2e-3 * w[0]));
        assert!(v0[5] < 1e-14);
    }

    #[test]
    fn precision_modes_agree_on_benign_chain() {
        let alpha = AlphaVector::new(vec![0.1, 0.4, 1.0]).unwrap();
        let chain = MarkovChainSpec::new(30, 0.01, 0.02, alpha).unwrap();
        let run = |precision| {
            mttdl_laplace_with(
                &chain,
                LaplaceOptions {
                    precision,
                    ..Default::default()
                },
            )
            .unwrap()
        };
        let d = run(Precision::Double);
        let x = run(Precision::Exact);
        let a = run(Precision::Auto);
        assert_eq!(a.diagnostics.precision, Precision::Double);
        assert!(a.diagnostics.warnings.is_empty());
        assert!(rel(d.mttdl_hours, x.mttdl_hours) < 1e-13);
        assert!(rel(d.mttdl_hours, x.mttdl_hours) <= d.diagnostics.relative_error_bound);
    }
}
