//! Scalar abstraction shared by double-precision and extended-precision code paths.
//!
//! The lift development and the accumulation diagnostics are written once
//! against [`Real`]; `f64` serves the fast path and [`BigReal`] (a thin
//! wrapper over `astro_float::BigFloat`) serves the precision ladder.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

/// Arithmetic needed by the geometric kernels.
pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Builds a value carrying `bits` of mantissa (ignored by `f64`).
    fn with_bits(x: f64, bits: u32) -> Self;
    /// A constant at the same working precision as `self`.
    fn lift(&self, x: f64) -> Self {
        Self::with_bits(x, self.bits())
    }
    fn bits(&self) -> u32;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sinh(&self) -> Self;
    fn asinh(&self) -> Self;
    fn atan(&self) -> Self;
    fn is_finite(&self) -> bool;

    /// Unit roundoff of the working precision.
    fn epsilon(&self) -> f64 {
        2f64.powi(-(self.bits() as i32))
    }

    fn is_zero(&self) -> bool {
        self.to_f64() == 0.0 && self.abs() <= self.lift(0.0)
    }
}

impl Real for f64 {
    fn with_bits(x: f64, _bits: u32) -> Self {
        x
    }
    fn bits(&self) -> u32 {
        53
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn asinh(&self) -> Self {
        f64::asinh(*self)
    }
    fn atan(&self) -> Self {
        f64::atan(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Arbitrary-precision real with a fixed mantissa width.
#[derive(Clone)]
pub struct BigReal {
    value: BigFloat,
    bits: u32,
}

impl BigReal {
    pub fn new(x: f64, bits: u32) -> Self {
        BigReal {
            value: BigFloat::from_f64(x, bits as usize),
            bits,
        }
    }

    fn wrap(value: BigFloat, bits: u32) -> Self {
        BigReal { value, bits }
    }

    fn p(&self) -> usize {
        self.bits as usize
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.value
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({:e}, {} bits)", self.to_f64(), self.bits)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

macro_rules! big_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                let bits = self.bits.max(rhs.bits);
                BigReal::wrap(self.value.$m(&rhs.value, bits as usize, RM), bits)
            }
        }
    };
}

big_binop!(Add, add);
big_binop!(Sub, sub);
big_binop!(Mul, mul);
big_binop!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.value.neg(), self.bits)
    }
}

/// `m * 2^e` without intermediate overflow.
fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}

impl Real for BigReal {
    fn with_bits(x: f64, bits: u32) -> Self {
        BigReal::new(x, bits.max(53))
    }
    fn bits(&self) -> u32 {
        self.bits
    }
    fn to_f64(&self) -> f64 {
        if self.value.is_nan() {
            return f64::NAN;
        }
        if self.value.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.value.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        match self.value.as_raw_parts() {
            Some((words, _, _, _, _)) if words.iter().all(|&w| w == 0) => 0.0,
            Some((words, _, sign, exp, _)) => {
                let n = words.len();
                let hi = words[n - 1] as f64;
                let lo = if n > 1 { words[n - 2] as f64 } else { 0.0 };
                let mant = (hi + lo / 18446744073709551616.0) / 18446744073709551616.0;
                let v = ldexp(mant, exp as i64);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
            None => f64::NAN,
        }
    }
    fn abs(&self) -> Self {
        BigReal::wrap(self.value.abs(), self.bits)
    }
    fn sqrt(&self) -> Self {
        BigReal::wrap(self.value.sqrt(self.p(), RM), self.bits)
    }
    fn exp(&self) -> Self {
        let v = with_consts(|cc| self.value.exp(self.p(), RM, cc));
        BigReal::wrap(v, self.bits)
    }
    fn ln(&self) -> Self {
        let v = with_consts(|cc| self.value.ln(self.p(), RM, cc));
        BigReal::wrap(v, self.bits)
    }
    fn sinh(&self) -> Self {
        let v = with_consts(|cc| self.value.sinh(self.p(), RM, cc));
        BigReal::wrap(v, self.bits)
    }
    fn asinh(&self) -> Self {
        let v = with_consts(|cc| self.value.asinh(self.p(), RM, cc));
        BigReal::wrap(v, self.bits)
    }
    fn atan(&self) -> Self {
        let v = with_consts(|cc| self.value.atan(self.p(), RM, cc));
        BigReal::wrap(v, self.bits)
    }
    fn is_finite(&self) -> bool {
        !(self.value.is_nan() || self.value.is_inf())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln cosh(x)`, exact to rounding for every finite `x`.
pub fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Positive quantity stored by its natural logarithm, so sums of
/// astronomically large or small terms stay representable.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, serde::Serialize)]
pub struct LogValue {
    pub ln: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        ln: f64::NEG_INFINITY,
    };

    pub fn from_ln(ln: f64) -> Self {
        LogValue { ln }
    }

    pub fn from_value(x: f64) -> Self {
        debug_assert!(x >= 0.0);
        LogValue { ln: x.ln() }
    }

    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn add(self, other: LogValue) -> LogValue {
        LogValue {
            ln: log_add_exp(self.ln, other.ln),
        }
    }

    pub fn ratio(self, other: LogValue) -> f64 {
        (self.ln - other.ln).exp()
    }
}
