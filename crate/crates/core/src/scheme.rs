//! Protection schemes and the data-loss coefficient vector.
//!
//! A disk farm is `l` identical arrays of `n` data disks plus `m` redundancy
//! disks. With `i` disks failed somewhere in the farm, `alpha_i` is the
//! probability that the next failure lands in an array that already holds `m`
//! failures and therefore loses data. Only same-array concentrations count as
//! loss; failures spread over different arrays are always recoverable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("binomial coefficient C({a}, {b}) is undefined: b > a")]
    BinomialDomain { a: u64, b: u64 },
    #[error("invalid scheme geometry: {0}")]
    Geometry(String),
    #[error("base value {0} must lie in (0, 1]")]
    DegenerateBase(f64),
    #[error("invalid alpha vector: {0}")]
    InvalidAlpha(String),
}

/// Array geometry of a homogeneous disk farm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProtectionScheme {
    data_disks_per_array: u64,
    redundancy_disks_per_array: u64,
    array_count: u64,
}

impl ProtectionScheme {
    pub fn new(data: u64, redundancy: u64, arrays: u64) -> Result<Self, SchemeError> {
        if data == 0 || redundancy == 0 || arrays == 0 {
            return Err(SchemeError::Geometry(format!(
                "n={data}, m={redundancy}, l={arrays}: all must be at least 1"
            )));
        }
        (data + redundancy)
            .checked_mul(arrays)
            .filter(|&total| total < (1 << 53))
            .ok_or_else(|| SchemeError::Geometry("total disk count overflows".into()))?;
        Ok(Self {
            data_disks_per_array: data,
            redundancy_disks_per_array: redundancy,
            array_count: arrays,
        })
    }

    /// `l` arrays of `n+2` disks.
    pub fn raid6(data: u64, arrays: u64) -> Result<Self, SchemeError> {
        Self::new(data, 2, arrays)
    }

    /// `l` arrays of `n+3` disks.
    pub fn raid_tp(data: u64, arrays: u64) -> Result<Self, SchemeError> {
        Self::new(data, 3, arrays)
    }

    /// `l` arrays of an `(n+m, n)` Reed-Solomon code.
    pub fn reed_solomon(data: u64, code: u64, arrays: u64) -> Result<Self, SchemeError> {
        Self::new(data, code, arrays)
    }

    pub fn data_disks_per_array(&self) -> u64 {
        self.data_disks_per_array
    }

    pub fn redundancy_disks_per_array(&self) -> u64 {
        self.redundancy_disks_per_array
    }

    pub fn array_count(&self) -> u64 {
        self.array_count
    }

    pub fn disks_per_array(&self) -> u64 {
        self.data_disks_per_array + self.redundancy_disks_per_array
    }

    /// `N = (n + m) * l`.
    pub fn total_disks(&self) -> u64 {
        self.disks_per_array() * self.array_count
    }

    pub fn total_data_disks(&self) -> u64 {
        self.data_disks_per_array * self.array_count
    }

    /// Concurrent failures one array survives.
    pub fn fault_tolerance(&self) -> u64 {
        self.redundancy_disks_per_array
    }

    pub fn alpha(&self) -> AlphaVector {
        alpha_for(self)
    }
}

/// Data-loss probabilities `alpha_1..alpha_K`, with an implicit `alpha_0 = 0`.
///
/// `K` is the first index whose value is exactly 1: from state `K` every
/// further failure loses data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaVector {
    values: Vec<f64>,
}

impl AlphaVector {
    /// Validates a user-supplied vector `[alpha_1, ..., alpha_K]`.
    pub fn new(values: Vec<f64>) -> Result<Self, SchemeError> {
        let Some(&last) = values.last() else {
            return Err(SchemeError::InvalidAlpha("vector is empty".into()));
        };
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(SchemeError::InvalidAlpha(format!(
                "alpha_{} = {v} is not a probability",
                i + 1
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(SchemeError::InvalidAlpha(format!(
                "alpha_{} > alpha_{}: values must be non-decreasing",
                i + 1,
                i + 2
            )));
        }
        if last != 1.0 {
            return Err(SchemeError::InvalidAlpha(format!(
                "last value is {last}, expected exactly 1"
            )));
        }
        if values[..values.len() - 1].contains(&1.0) {
            return Err(SchemeError::InvalidAlpha(
                "only the terminal value may equal 1".into(),
            ));
        }
        Ok(Self { values })
    }

    /// Index of the terminal (saturated) value.
    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// `alpha_i` for `0 <= i <= K`; `alpha_0` is always zero.
    pub fn get(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.values[i - 1]
        }
    }

    /// `[alpha_1, ..., alpha_K]`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `[alpha_0, alpha_1, ..., alpha_K]`.
    pub fn with_zeroth(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.values.iter().copied())
            .collect()
    }

    /// First index with a non-zero value.
    pub fn base_index(&self) -> usize {
        self.values
            .iter()
            .position(|&v| v > 0.0)
            .map_or(0, |i| i + 1)
    }
}

impl<'de> Deserialize<'de> for AlphaVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            values: Vec<f64>,
        }
        let raw = Raw::deserialize(de)?;
        AlphaVector::new(raw.values).map_err(serde::de::Error::custom)
    }
}

/// Natural log of the binomial coefficient `C(a, b)`.
///
/// Evaluated as a compensated sum of `ln(1 + (a - b)/k)` terms, so the
/// result stays accurate to a few ulps even when `C(a, b)` overflows `f64`.
pub fn log_binomial(a: u64, b: u64) -> Result<f64, SchemeError> {
    if b > a {
        return Err(SchemeError::BinomialDomain { a, b });
    }
    let b = b.min(a - b);
    if b == 0 {
        return Ok(0.0);
    }
    let rest = (a - b) as f64;
    // Neumaier summation
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for k in 1..=b {
        let term = (rest / k as f64).ln_1p();
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}

/// Applies `alpha_{i+1} = min(1, (i + 2) alpha_i)` from `alpha_base` until
/// the vector saturates at 1. Indices below `base_index` are zero.
pub fn extend_to_k(base_index: usize, base_value: f64) -> Result<AlphaVector, SchemeError> {
    if base_index == 0 {
        return Err(SchemeError::Geometry(
            "base index must be at least 1 (alpha_0 is fixed at 0)".into(),
        ));
    }
    if !(base_value > 0.0 && base_value <= 1.0) {
        return Err(SchemeError::DegenerateBase(base_value));
    }
    let mut values = vec![0.0; base_index - 1];
    values.push(base_value);
    let mut i = base_index;
    let mut current = base_value;
    while current < 1.0 {
        current = ((i + 2) as f64 * current).min(1.0);
        values.push(current);
        i += 1;
    }
    Ok(AlphaVector { values })
}

fn alpha_for(scheme: &ProtectionScheme) -> AlphaVector {
    let n = scheme.data_disks_per_array();
    let m = scheme.redundancy_disks_per_array();
    let l = scheme.array_count();
    let total = scheme.total_disks();
    // loss-causing (m+1)-subsets: all m+1 failures inside one array
    let log_ratio = (l as f64).ln() + log_binomial(n + m, m + 1).expect("m+1 <= n+m")
        - log_binomial(total, m + 1).expect("m+1 <= N");
    let base = log_ratio.exp().min(1.0);
    // base > 0 for any geometry representable in f64 (N < 2^53)
    extend_to_k(m as usize, base).expect("positive base value")
}

pub fn alpha_raid6(data: u64, arrays: u64) -> Result<AlphaVector, SchemeError> {
    Ok(ProtectionScheme::raid6(data, arrays)?.alpha())
}

pub fn alpha_raid_tp(data: u64, arrays: u64) -> Result<AlphaVector, SchemeError> {
    Ok(ProtectionScheme::raid_tp(data, arrays)?.alpha())
}

pub fn alpha_rs(data: u64, code: u64, arrays: u64) -> Result<AlphaVector, SchemeError> {
    Ok(ProtectionScheme::reed_solomon(data, code, arrays)?.alpha())
}
