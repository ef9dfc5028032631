//! Expected hitting time of the loss state by direct elimination.
//!
//! With `t_i` the expected time to absorption from state `i` and
//! `r_i = up_i + loss_i + down_i`,
//!
//! ```text
//! r_i t_i = 1 + up_i t_{i+1} + down_i t_{i-1}.
//! ```
//!
//! Forward elimination writes `t_i = c_i + a_i t_{i+1}`. The pivot
//! `r_i - down_i a_{i-1}` is formed as `up_i + loss_i + down_i e_{i-1}`, where
//! `e_{i-1} = 1 - a_{i-1}` is itself propagated as a sum of non-negative
//! terms. No step subtracts, so every quantity keeps full relative accuracy
//! no matter how stiff the chain is.

use super::{Diagnostics, MarkovChainSpec, MarkovError, Method, MttdlResult, Precision};

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

pub fn mttdl_hitting_time(chain: &MarkovChainSpec) -> Result<MttdlResult, MarkovError> {
    let k = chain.k();
    let mut offset = Vec::with_capacity(k + 1);
    let mut carry = Vec::with_capacity(k + 1);
    let mut leak_prev = 0.0;
    let mut offset_prev = 0.0;
    for i in 0..=k {
        let (up, loss, down) = chain.rates(i);
        let pivot = up + loss + down * leak_prev;
        if pivot == 0.0 {
            return Err(MarkovError::NoAbsorbingPath);
        }
        let c = (1.0 + down * offset_prev) / pivot;
        let a = up / pivot;
        leak_prev = (loss + down * leak_prev) / pivot;
        offset_prev = c;
        offset.push(c);
        carry.push(a);
    }
    if leak_prev == 0.0 {
        return Err(MarkovError::NoAbsorbingPath);
    }
    let mut t = offset[k];
    for i in (0..k).rev() {
        t = offset[i] + carry[i] * t;
    }
    if !t.is_finite() {
        return Err(MarkovError::Conditioning {
            stage: "hitting-time elimination",
            k,
        });
    }
    Ok(MttdlResult {
        mttdl_hours: t,
        method: Method::HittingTime,
        diagnostics: Diagnostics {
            k,
            alpha: chain.alpha().values().to_vec(),
            precision: Precision::Double,
            // about eight roundings per eliminated state, all on positive terms
            relative_error_bound: 8.0 * (k as f64 + 1.0) * UNIT_ROUNDOFF,
            warnings: Vec::new(),
        },
    })
}
