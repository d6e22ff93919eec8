//! A small scalar abstraction so expressions and chart formulas can be
//! evaluated over plain floats or any of the jet types with one code path.

use crate::jet::{Elementary, Jet1, Jet2, Jet3};

/// Ring operations plus the elementary functions the engine needs.
///
/// Jet implementations mirror IEEE semantics for out-of-domain inputs by
/// propagating NaN coefficients; callers validate domains up front.
pub trait Scalar:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn recip(self) -> Self;
    fn powf(self, p: f64) -> Self;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
}

macro_rules! impl_scalar_for_jet {
    ($jet:ty, $nan:expr, $constant:expr) => {
        impl Scalar for $jet {
            fn from_f64(x: f64) -> Self {
                $constant(x)
            }
            fn value(&self) -> f64 {
                <$jet>::value(self)
            }
            fn sin(self) -> Self {
                <$jet>::lift(Elementary::Sin, &self).unwrap_or_else(|_| $nan)
            }
            fn cos(self) -> Self {
                <$jet>::lift(Elementary::Cos, &self).unwrap_or_else(|_| $nan)
            }
            fn sinh(self) -> Self {
                <$jet>::lift(Elementary::Sinh, &self).unwrap_or_else(|_| $nan)
            }
            fn cosh(self) -> Self {
                <$jet>::lift(Elementary::Cosh, &self).unwrap_or_else(|_| $nan)
            }
            fn exp(self) -> Self {
                <$jet>::lift(Elementary::Exp, &self).unwrap_or_else(|_| $nan)
            }
            fn ln(self) -> Self {
                <$jet>::lift(Elementary::Log, &self).unwrap_or_else(|_| $nan)
            }
            fn sqrt(self) -> Self {
                <$jet>::lift(Elementary::Sqrt, &self).unwrap_or_else(|_| $nan)
            }
            fn recip(self) -> Self {
                <$jet>::lift(Elementary::Recip, &self).unwrap_or_else(|_| $nan)
            }
            fn powf(self, p: f64) -> Self {
                <$jet>::lift(Elementary::Pow(p), &self).unwrap_or_else(|_| $nan)
            }
        }
    };
}

impl_scalar_for_jet!(Jet1, Jet1::constant(f64::NAN), Jet1::constant);
impl_scalar_for_jet!(
    Jet2,
    Jet2::constant(f64::NAN, 3),
    |x| Jet2::constant(x, 3)
);
impl_scalar_for_jet!(
    Jet3,
    Jet3::constant(f64::NAN, 3),
    |x| Jet3::constant(x, 3)
);
