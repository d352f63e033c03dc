//! Exact scalars: arbitrary-precision rationals and the imaginary quadratic
//! fields `Q(sqrt(-d))`.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Common interface of the scalar kinds used by the generic algebra code.
///
/// `Ctx` carries whatever a value needs to build other values of the same
/// kind: nothing for rationals, the parameter `d` for `Q(sqrt(-d))`.
pub trait Scalar: Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    type Ctx: Copy + PartialEq + Eq + fmt::Debug + Send + Sync + 'static;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: Self::Ctx) -> Self;
    fn one(ctx: Self::Ctx) -> Self;
    fn from_rat(ctx: Self::Ctx, r: Rat) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;
    /// Galois conjugation (identity on rationals).
    fn conjugate(&self) -> Self;
    /// The value as a rational number when it lies in `Q`.
    fn to_rat(&self) -> Option<Rat>;

    fn from_i64(ctx: Self::Ctx, k: i64) -> Self {
        Self::from_rat(ctx, Rat::from_int(k))
    }
    fn scale_rat(&self, r: &Rat) -> Self {
        self.times(&Self::from_rat(self.ctx(), r.clone()))
    }
    fn scale_int(&self, k: i64) -> Self {
        match k {
            1 => self.clone(),
            -1 => self.negated(),
            0 => Self::zero(self.ctx()),
            _ => self.scale_rat(&Rat::from_int(k)),
        }
    }
    fn is_one(&self) -> bool {
        *self == Self::one(self.ctx())
    }
}

/// An exact rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rat {
        Rat(BigRational::new(num.into(), den.into()))
    }
    pub fn from_int(k: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(k)))
    }
    pub fn from_bigint(k: BigInt) -> Rat {
        Rat(BigRational::from_integer(k))
    }
    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }
    pub fn one() -> Rat {
        Rat(BigRational::one())
    }
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
    pub fn signum(&self) -> i32 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }
    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }
    pub fn recip(&self) -> Result<Rat> {
        if self.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Rat(self.0.recip()))
        }
    }
    pub fn pow(&self, e: u32) -> Rat {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }
    /// Square root when the value is the square of a rational.
    pub fn sqrt_exact(&self) -> Option<Rat> {
        if self.signum() < 0 {
            return None;
        }
        let n = self.numer().to_biguint()?;
        let d = self.denom().to_biguint()?;
        let (sn, sd) = (n.sqrt(), d.sqrt());
        if &sn * &sn == n && &sd * &sd == d {
            Some(Rat::new(BigInt::from(sn), BigInt::from(sd)))
        } else {
            None
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Rat> {
        let s = s.trim();
        let bad = || Error::Invalid(format!("not a rational number: {s:?}"));
        match s.split_once('/') {
            Some((a, b)) => {
                let num = BigInt::from_str(a.trim()).map_err(|_| bad())?;
                let den = BigInt::from_str(b.trim()).map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(Rat::new(num, den))
            }
            None => Ok(Rat::from_bigint(BigInt::from_str(s).map_err(|_| bad())?)),
        }
    }
}

impl From<i64> for Rat {
    fn from(k: i64) -> Rat {
        Rat::from_int(k)
    }
}

#[derive(Serialize, Deserialize)]
struct RatRepr {
    num: String,
    den: String,
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RatRepr { num: self.numer().to_string(), den: self.denom().to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let r = RatRepr::deserialize(d)?;
        let num = BigInt::from_str(&r.num).map_err(D::Error::custom)?;
        let den = BigInt::from_str(&r.den).map_err(D::Error::custom)?;
        if den.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Rat::new(num, den))
    }
}

macro_rules! rat_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                Rat(&self.0 $op &o.0)
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat(self.0 $op o.0)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                Rat(self.0 $op &o.0)
            }
        }
    };
}
rat_binop!(Add, add, +);
rat_binop!(Sub, sub, -);
rat_binop!(Mul, mul, *);
rat_binop!(Div, div, /);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}
impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}
impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, o: &Rat) {
        self.0 += &o.0;
    }
}
impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, o: &Rat) {
        self.0 -= &o.0;
    }
}
impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, o: &Rat) {
        self.0 *= &o.0;
    }
}

impl Scalar for Rat {
    type Ctx = ();
    fn ctx(&self) {}
    fn zero(_: ()) -> Rat {
        Rat::zero()
    }
    fn one(_: ()) -> Rat {
        Rat::one()
    }
    fn from_rat(_: (), r: Rat) -> Rat {
        r
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn plus(&self, o: &Rat) -> Rat {
        self + o
    }
    fn minus(&self, o: &Rat) -> Rat {
        self - o
    }
    fn times(&self, o: &Rat) -> Rat {
        self * o
    }
    fn negated(&self) -> Rat {
        -self
    }
    fn inverse(&self) -> Option<Rat> {
        self.recip().ok()
    }
    fn conjugate(&self) -> Rat {
        self.clone()
    }
    fn to_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
}

/// An element `re + im*w` of `Q(sqrt(-d))`, where `w^2 = -d`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadExt {
    pub d: u64,
    pub re: Rat,
    pub im: Rat,
}

impl QuadExt {
    pub fn new(d: u64, re: Rat, im: Rat) -> QuadExt {
        QuadExt { d, re, im }
    }
    pub fn rational(d: u64, re: Rat) -> QuadExt {
        QuadExt { d, re, im: Rat::zero() }
    }
    /// The generator `sqrt(-d)`.
    pub fn omega(d: u64) -> QuadExt {
        QuadExt { d, re: Rat::zero(), im: Rat::one() }
    }
    fn check(&self, o: &QuadExt) -> Result<()> {
        if self.d == o.d {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.d, o.d))
        }
    }
    pub fn try_add(&self, o: &QuadExt) -> Result<QuadExt> {
        self.check(o)?;
        Ok(QuadExt { d: self.d, re: &self.re + &o.re, im: &self.im + &o.im })
    }
    pub fn try_sub(&self, o: &QuadExt) -> Result<QuadExt> {
        self.check(o)?;
        Ok(QuadExt { d: self.d, re: &self.re - &o.re, im: &self.im - &o.im })
    }
    pub fn try_mul(&self, o: &QuadExt) -> Result<QuadExt> {
        self.check(o)?;
        let dd = Rat::from_int(self.d as i64);
        let re = &self.re * &o.re - &(&dd * &(&self.im * &o.im));
        let im = &self.re * &o.im + &self.im * &o.re;
        Ok(QuadExt { d: self.d, re, im })
    }
    pub fn try_div(&self, o: &QuadExt) -> Result<QuadExt> {
        self.check(o)?;
        let inv = o.inverse().ok_or(Error::DivisionByZero)?;
        self.try_mul(&inv)
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

/// Galois conjugation `re + im*w -> re - im*w`.
pub fn quad_conj(z: &QuadExt) -> QuadExt {
    QuadExt { d: z.d, re: z.re.clone(), im: -&z.im }
}

/// Field norm `re^2 + d*im^2`.
pub fn quad_norm(z: &QuadExt) -> Rat {
    &z.re * &z.re + &(&Rat::from_int(z.d as i64) * &(&z.im * &z.im))
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "({})*sqrt(-{})", self.im, self.d)
        } else {
            write!(f, "{} + ({})*sqrt(-{})", self.re, self.im, self.d)
        }
    }
}

macro_rules! quad_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $m(self, o: &QuadExt) -> QuadExt {
                self.$f(o).expect("QuadExt operands from different fields")
            }
        }
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, o: QuadExt) -> QuadExt {
                self.$f(&o).expect("QuadExt operands from different fields")
            }
        }
    };
}
quad_binop!(Add, add, try_add);
quad_binop!(Sub, sub, try_sub);
quad_binop!(Mul, mul, try_mul);
quad_binop!(Div, div, try_div);

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { d: self.d, re: -&self.re, im: -&self.im }
    }
}
impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

impl Scalar for QuadExt {
    type Ctx = u64;
    fn ctx(&self) -> u64 {
        self.d
    }
    fn zero(d: u64) -> QuadExt {
        QuadExt::rational(d, Rat::zero())
    }
    fn one(d: u64) -> QuadExt {
        QuadExt::rational(d, Rat::one())
    }
    fn from_rat(d: u64, r: Rat) -> QuadExt {
        QuadExt::rational(d, r)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn plus(&self, o: &QuadExt) -> QuadExt {
        self + o
    }
    fn minus(&self, o: &QuadExt) -> QuadExt {
        self - o
    }
    fn times(&self, o: &QuadExt) -> QuadExt {
        self * o
    }
    fn negated(&self) -> QuadExt {
        -self
    }
    fn inverse(&self) -> Option<QuadExt> {
        let nm = quad_norm(self);
        if nm.is_zero() {
            return None;
        }
        let inv = nm.recip().ok()?;
        Some(QuadExt { d: self.d, re: &self.re * &inv, im: -(&self.im * &inv) })
    }
    fn conjugate(&self) -> QuadExt {
        quad_conj(self)
    }
    fn to_rat(&self) -> Option<Rat> {
        if self.im.is_zero() {
            Some(self.re.clone())
        } else {
            None
        }
    }
    fn scale_rat(&self, r: &Rat) -> QuadExt {
        QuadExt { d: self.d, re: &self.re * r, im: &self.im * r }
    }
}

/// Square-free representative of a positive integer: `m = s^2 * r` with `r`
/// square-free. Returns `(r, s)`.
pub fn square_free_part(m: u64) -> (u64, u64) {
    assert!(m > 0, "square-free part of zero");
    let mut r = 1u64;
    let mut s = 1u64;
    let mut rest = m;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            r *= p;
        }
        p += 1;
    }
    r *= rest;
    (r, s)
}
