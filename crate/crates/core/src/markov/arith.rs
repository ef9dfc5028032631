//! Scalar backends for the Laplace-domain recursion.

use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Arithmetic the recursion needs, with exact lifting of its inputs.
pub(crate) trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn lift(x: f64) -> Self;
    fn lift_count(n: u64) -> Self;
    fn zero() -> Self {
        Self::lift(0.0)
    }
    fn one() -> Self {
        Self::lift(1.0)
    }
    fn value(&self) -> f64;
    /// First-order bound on the absolute rounding error carried by `value`.
    fn error_bound(&self) -> f64;
    fn is_zero(&self) -> bool;
}

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// An `f64` carrying a running bound on its accumulated rounding error.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tracked {
    v: f64,
    e: f64,
}

impl Tracked {
    fn rounded(v: f64, e: f64) -> Self {
        Self {
            v,
            e: e + UNIT_ROUNDOFF * v.abs(),
        }
    }
}

impl Add for Tracked {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::rounded(self.v + o.v, self.e + o.e)
    }
}

impl Sub for Tracked {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::rounded(self.v - o.v, self.e + o.e)
    }
}

impl Mul for Tracked {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let e = self.v.abs() * o.e + o.v.abs() * self.e + self.e * o.e;
        Self::rounded(self.v * o.v, e)
    }
}

impl Div for Tracked {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let v = self.v / o.v;
        let slack = o.v.abs() - o.e;
        let e = if slack > 0.0 {
            (self.e + v.abs() * o.e) / slack
        } else {
            f64::INFINITY
        };
        Self::rounded(v, e)
    }
}

impl Scalar for Tracked {
    fn lift(x: f64) -> Self {
        Self { v: x, e: 0.0 }
    }
    fn lift_count(n: u64) -> Self {
        let v = n as f64;
        let e = if n < (1 << 53) {
            0.0
        } else {
            UNIT_ROUNDOFF * v
        };
        Self { v, e }
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn error_bound(&self) -> f64 {
        self.e
    }
    fn is_zero(&self) -> bool {
        self.v == 0.0
    }
}

/// Exact rational arithmetic. Every finite `f64` is a dyadic rational, so the
/// recursion evaluated here carries no rounding at all until the final
/// conversion back to `f64`.
#[derive(Debug, Clone)]
pub(crate) struct Exact(BigRational);

impl Add for Exact {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Exact(self.0 + o.0)
    }
}

impl Sub for Exact {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Exact(self.0 - o.0)
    }
}

impl Mul for Exact {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Exact(self.0 * o.0)
    }
}

impl Div for Exact {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Exact(self.0 / o.0)
    }
}

impl Scalar for Exact {
    fn lift(x: f64) -> Self {
        Exact(BigRational::from_float(x).expect("finite input"))
    }
    fn lift_count(n: u64) -> Self {
        Exact(BigRational::from_integer(BigInt::from(n)))
    }
    fn value(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    fn error_bound(&self) -> f64 {
        // a single rounding on conversion
        UNIT_ROUNDOFF * self.value().abs()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracked_bound_covers_cancellation() {
        let a = Tracked::lift(1.0) + Tracked::lift(1e-17);
        let b = a - Tracked::lift(1.0);
        // exact answer 1e-17 lies within value +- bound
        assert!((b.value() - 1e-17).abs() <= b.error_bound());
        assert!(b.error_bound() > 0.0);
    }

    #[test]
    fn exact_is_exact() {
        let third = Exact::lift_count(1) / Exact::lift_count(3);
        let back = third.clone() * Exact::lift_count(3);
        assert_eq!(back.value(), 1.0);
        let tiny = (Exact::lift(1.0) + Exact::lift(1e-30)) - Exact::lift(1.0);
        assert_eq!(tiny.value(), 1e-30);
    }
}
