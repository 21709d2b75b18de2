use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use super::Jet2;
use crate::error::{Error, Result};
use crate::group_model::GroupLaw;

/// A carrier that expressions and group laws are evaluated over: plain `f64`
/// or [`Jet2`]. Partial functions report domain errors instead of producing
/// NaN.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn constant(v: f64) -> Self;
    fn value(&self) -> f64;
    fn try_div(self, rhs: Self) -> Result<Self>;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn try_tan(self) -> Result<Self>;
    fn try_sqrt(self) -> Result<Self>;
    fn try_asin(self) -> Result<Self>;
    fn try_ln(self) -> Result<Self>;
    fn try_powi(self, n: i32) -> Result<Self>;
    fn try_powf(self, e: f64) -> Result<Self>;

    /// Dispatches to the carrier-specific composition of `law`.
    fn compose_with(law: &dyn GroupLaw, left: &[Self], right: &[Self]) -> Result<Vec<Self>>;

    /// Closed-form inverse of `law` for this carrier, if the law has one.
    fn closed_inverse(law: &dyn GroupLaw, g: &[Self]) -> Option<Result<Vec<Self>>>;
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn try_div(self, rhs: Self) -> Result<Self> {
        if rhs == 0.0 {
            Err(Error::domain("division", "divide by zero"))
        } else {
            Ok(self / rhs)
        }
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn try_tan(self) -> Result<Self> {
        if f64::cos(self) == 0.0 {
            Err(Error::domain("tan", "argument at a pole"))
        } else {
            Ok(f64::tan(self))
        }
    }
    fn try_sqrt(self) -> Result<Self> {
        // The jet version needs a strictly positive argument for its
        // derivative; plain evaluation accepts 0 so that values agree
        // wherever both are defined.
        if self < 0.0 || self.is_nan() {
            Err(Error::domain(
                "sqrt",
                format!("argument {self} outside the domain [0, inf)"),
            ))
        } else {
            Ok(f64::sqrt(self))
        }
    }
    fn try_asin(self) -> Result<Self> {
        if !(self.abs() < 1.0) {
            Err(Error::domain(
                "asin",
                format!("argument {self} outside the open domain (-1, 1)"),
            ))
        } else {
            Ok(f64::asin(self))
        }
    }
    fn try_ln(self) -> Result<Self> {
        if !(self > 0.0) {
            Err(Error::domain("ln", format!("argument {self} not positive")))
        } else {
            Ok(f64::ln(self))
        }
    }
    fn try_powi(self, n: i32) -> Result<Self> {
        if n < 0 && self == 0.0 {
            Err(Error::domain("power", "zero raised to a negative power"))
        } else {
            Ok(self.powi(n))
        }
    }
    fn try_powf(self, e: f64) -> Result<Self> {
        if !(self > 0.0) {
            Err(Error::domain(
                "power",
                format!("real power of non-positive base {self}"),
            ))
        } else {
            Ok(self.powf(e))
        }
    }
    fn compose_with(law: &dyn GroupLaw, left: &[Self], right: &[Self]) -> Result<Vec<Self>> {
        law.compose_real(left, right)
    }
    fn closed_inverse(law: &dyn GroupLaw, g: &[Self]) -> Option<Result<Vec<Self>>> {
        law.inverse_real(g)
    }
}

impl Scalar for Jet2 {
    fn constant(v: f64) -> Self {
        Jet2::constant(v)
    }
    fn value(&self) -> f64 {
        Jet2::value(self)
    }
    fn try_div(self, rhs: Self) -> Result<Self> {
        Ok(self * rhs.recip()?)
    }
    fn sin(self) -> Self {
        Jet2::sin(&self)
    }
    fn cos(self) -> Self {
        Jet2::cos(&self)
    }
    fn exp(self) -> Self {
        Jet2::exp(&self)
    }
    fn try_tan(self) -> Result<Self> {
        Jet2::tan(&self)
    }
    fn try_sqrt(self) -> Result<Self> {
        Jet2::sqrt(&self)
    }
    fn try_asin(self) -> Result<Self> {
        Jet2::asin(&self)
    }
    fn try_ln(self) -> Result<Self> {
        Jet2::ln(&self)
    }
    fn try_powi(self, n: i32) -> Result<Self> {
        Jet2::powi(&self, n)
    }
    fn try_powf(self, e: f64) -> Result<Self> {
        Jet2::powf(&self, e)
    }
    fn compose_with(law: &dyn GroupLaw, left: &[Self], right: &[Self]) -> Result<Vec<Self>> {
        law.compose_jet(left, right)
    }
    fn closed_inverse(law: &dyn GroupLaw, g: &[Self]) -> Option<Result<Vec<Self>>> {
        law.inverse_jet(g)
    }
}
