//! Scalar abstraction shared by the exact and floating-point backends.
//!
//! Every algorithm in the crate is written once against [`Scalar`]. The
//! rank-revealing kernels are the only place where the two backends differ:
//! rationals use fraction-free elimination, floats use an SVD with an
//! explicit tolerance.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::matrix::Mat;
use crate::{exact, float};

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is closed and free of rounding.
    const EXACT: bool;
    /// Short tag used in serialized artifacts ("exact", "f64", ...).
    const MODE: &'static str;

    /// Rank of a non-void matrix.
    fn rank_of(m: &Mat<Self>) -> usize;

    /// Basis of `{x : xᵀ M = 0}` for a non-void matrix.
    fn left_kernel_of(m: &Mat<Self>) -> Vec<Vec<Self>>;

    /// Solves `A X = B`. Exact backends return `None` for inconsistent
    /// systems; float backends return the minimum-norm least-squares solution.
    fn solve_of(a: &Mat<Self>, b: &Mat<Self>) -> Option<Mat<Self>>;

    fn from_rational(r: &BigRational) -> Self;

    fn parse_text(s: &str) -> Option<Self>;

    fn to_text(&self) -> String {
        self.to_string()
    }

    /// Equality up to the backend tolerance, scaled by `scale` (at least 1).
    fn approx_eq(&self, other: &Self, scale: f64) -> bool;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("every backend represents small integers")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Parses "a/b", integers and plain decimals ("-0.25") into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if s.contains('/') {
        let r = BigRational::from_str(s).ok()?;
        return Some(r);
    }
    if let Ok(i) = BigInt::from_str(s) {
        return Some(BigRational::from_integer(i));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.chars().chain(frac_part.chars()).any(|c| !c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let denom = num_traits::pow(BigInt::from(10u8), frac_part.len());
    let r = BigRational::new(numer, denom);
    Some(if neg { -r } else { r })
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn rank_of(m: &Mat<Self>) -> usize {
        exact::rank(m)
    }

    fn left_kernel_of(m: &Mat<Self>) -> Vec<Vec<Self>> {
        exact::left_kernel(m)
    }

    fn solve_of(a: &Mat<Self>, b: &Mat<Self>) -> Option<Mat<Self>> {
        exact::solve(a, b)
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn parse_text(s: &str) -> Option<Self> {
        parse_rational(s)
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn approx_eq(&self, other: &Self, _scale: f64) -> bool {
        self == other
    }
}

macro_rules! impl_float_scalar {
    ($f:ty, $mode:literal, $tol:expr) => {
        impl Scalar for $f {
            const EXACT: bool = false;
            const MODE: &'static str = $mode;

            fn rank_of(m: &Mat<Self>) -> usize {
                float::rank(m)
            }

            fn left_kernel_of(m: &Mat<Self>) -> Vec<Vec<Self>> {
                float::left_kernel(m)
            }

            fn solve_of(a: &Mat<Self>, b: &Mat<Self>) -> Option<Mat<Self>> {
                float::solve(a, b)
            }

            fn from_rational(r: &BigRational) -> Self {
                r.to_f64().unwrap_or(f64::NAN) as $f
            }

            fn parse_text(s: &str) -> Option<Self> {
                match s.trim().parse::<$f>() {
                    Ok(v) => Some(v),
                    Err(_) => parse_rational(s).map(|r| Self::from_rational(&r)),
                }
            }

            fn approx_eq(&self, other: &Self, scale: f64) -> bool {
                let diff = (*self - *other).abs() as f64;
                diff <= $tol * scale.max(1.0)
            }
        }
    };
}

impl_float_scalar!(f64, "f64", 1e-8);
impl_float_scalar!(f32, "f32", 1e-4);

/// Largest absolute value in a slice, as `f64`; zero for an empty slice.
pub fn max_abs<T: Scalar>(values: &[T]) -> f64 {
    values
        .iter()
        .map(|v| v.abs().to_f64_lossy())
        .fold(0.0, f64::max)
}

pub(crate) fn is_zero_vec<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(Zero::is_zero)
}
