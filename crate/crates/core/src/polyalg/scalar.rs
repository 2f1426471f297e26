use std::fmt::Debug;
use std::ops::Neg;

use num::bigint::BigInt;
use num::complex::{Complex, Complex32, Complex64};
use num::rational::BigRational;
use num::traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Field element used throughout the crate.
///
/// Exact scalars (rationals, Gaussian rationals) compare against zero
/// exactly; floating scalars always go through an explicit tolerance.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// True for exact arithmetic.
    const EXACT: bool;

    fn from_rat(r: &BigRational) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rat(&BigRational::from_integer(BigInt::from(v)))
    }

    fn to_c64(&self) -> Complex64;

    /// Absolute value (modulus for complex scalars) as a double.
    fn magnitude(&self) -> f64;

    fn conj(&self) -> Self;

    fn is_negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol
        }
    }
}

/// Ordered scalars: `f32`, `f64` and rationals.
pub trait RealScalar: Scalar + PartialOrd {
    type Complex: ComplexScalar<Real = Self>;

    fn to_f64(&self) -> f64;

    /// Exact rational value; `None` for non-finite floats.
    fn to_rat(&self) -> Option<BigRational>;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn complexify(&self) -> Self::Complex {
        Self::Complex::from_parts(self.clone(), Self::zero())
    }
}

pub trait ComplexScalar: Scalar {
    type Real: RealScalar<Complex = Self>;

    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re_part(&self) -> Self::Real;
    fn im_part(&self) -> Self::Real;

    fn imag_unit() -> Self {
        Self::from_parts(Self::Real::zero(), Self::Real::one())
    }
}

macro_rules! impl_float_scalar {
    ($t:ty, $c:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            fn from_rat(r: &BigRational) -> Self {
                ToPrimitive::to_f64(r).unwrap_or(f64::NAN) as $t
            }
            fn to_c64(&self) -> Complex64 {
                Complex64::new(*self as f64, 0.0)
            }
            fn magnitude(&self) -> f64 {
                (*self as f64).abs()
            }
            fn conj(&self) -> Self {
                *self
            }
        }

        impl RealScalar for $t {
            type Complex = $c;
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn to_rat(&self) -> Option<BigRational> {
                BigRational::from_f64(*self as f64)
            }
        }

        impl Scalar for $c {
            const EXACT: bool = false;
            fn from_rat(r: &BigRational) -> Self {
                <$c>::new(<$t>::from_rat(r), 0.0)
            }
            fn to_c64(&self) -> Complex64 {
                Complex64::new(self.re as f64, self.im as f64)
            }
            fn magnitude(&self) -> f64 {
                self.to_c64().norm()
            }
            fn conj(&self) -> Self {
                Complex::conj(self)
            }
        }

        impl ComplexScalar for $c {
            type Real = $t;
            fn from_parts(re: $t, im: $t) -> Self {
                <$c>::new(re, im)
            }
            fn re_part(&self) -> $t {
                self.re
            }
            fn im_part(&self) -> $t {
                self.im
            }
        }
    };
}

impl_float_scalar!(f32, Complex32);
impl_float_scalar!(f64, Complex64);

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn from_rat(r: &BigRational) -> Self {
        r.clone()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(self), 0.0)
    }
    fn magnitude(&self) -> f64 {
        rat_to_f64(self).abs()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
}

impl RealScalar for BigRational {
    type Complex = Complex<BigRational>;
    fn to_f64(&self) -> f64 {
        rat_to_f64(self)
    }
    fn to_rat(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

impl Scalar for Complex<BigRational> {
    const EXACT: bool = true;
    fn from_rat(r: &BigRational) -> Self {
        Complex::new(r.clone(), BigRational::zero())
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
}

impl ComplexScalar for Complex<BigRational> {
    type Real = BigRational;
    fn from_parts(re: BigRational, im: BigRational) -> Self {
        Complex::new(re, im)
    }
    fn re_part(&self) -> BigRational {
        self.re.clone()
    }
    fn im_part(&self) -> BigRational {
        self.im.clone()
    }
}

/// Rational to double without overflowing on huge numerators/denominators.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    // Rescale so that the quotient is near 1 before converting.
    let (nn, dd) = if shift > 0 {
        (n.clone(), d.clone() << (shift as usize))
    } else {
        (n.clone() << ((-shift) as usize), d.clone())
    };
    let q = ToPrimitive::to_f64(&BigRational::new(nn, dd)).unwrap_or(f64::NAN);
    q * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

/// Exact rational value of a finite double.
pub fn rat_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_f64(v)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn gauss(re: BigRational, im: BigRational) -> Complex<BigRational> {
    Complex::new(re, im)
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions).
pub fn rationalize(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let r = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if neg { -r } else { r })
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rat_sqrt_exact(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Exact square root of a Gaussian rational, if one exists in ℚ(i).
pub fn gauss_sqrt_exact(z: &Complex<BigRational>) -> Option<Complex<BigRational>> {
    // sqrt(a+bi) = p+qi with p² = (|z|+a)/2, q² = (|z|-a)/2, sign(pq) = sign(b).
    let norm2 = &z.re * &z.re + &z.im * &z.im;
    let modulus = rat_sqrt_exact(&norm2)?;
    let two = rat_int(2);
    let p = rat_sqrt_exact(&((&modulus + &z.re) / &two))?;
    let mut q = rat_sqrt_exact(&((&modulus - &z.re) / &two))?;
    if z.im.is_negative() {
        q = -q;
    }
    let root = Complex::new(p, q);
    if &(&root * &root) == z {
        Some(root)
    } else {
        None
    }
}

pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

pub fn rat_abs(r: &BigRational) -> BigRational {
    r.abs()
}
