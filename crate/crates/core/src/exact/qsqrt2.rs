//! Exact numbers of the form `p + q·√2` with rational `p`, `q`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element `p + q·√2` of the field Q(√2).
///
/// Both components are arbitrary-precision rationals kept in lowest terms, so
/// structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    p: BigRational,
    q: BigRational,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl QSqrt2 {
    pub fn new(p: BigRational, q: BigRational) -> Self {
        QSqrt2 { p, q }
    }

    /// `pn/pd + (qn/qd)·√2` from machine integers.
    pub fn from_parts(pn: i64, pd: i64, qn: i64, qd: i64) -> Self {
        QSqrt2 {
            p: ratio(pn, pd),
            q: ratio(qn, qd),
        }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        QSqrt2 {
            p: ratio(n, d),
            q: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn sqrt2() -> Self {
        QSqrt2 {
            p: BigRational::zero(),
            q: BigRational::one(),
        }
    }

    /// `1/√2 = √2/2`.
    pub fn frac_1_sqrt2() -> Self {
        Self::from_parts(0, 1, 1, 2)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.p
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    /// Galois conjugate `p − q·√2`.
    pub fn conjugate(&self) -> Self {
        QSqrt2 {
            p: self.p.clone(),
            q: -self.q.clone(),
        }
    }

    /// Field norm `p² − 2q²`, which vanishes only at zero.
    pub fn norm(&self) -> BigRational {
        &self.p * &self.p - BigRational::from_integer(BigInt::from(2)) * &self.q * &self.q
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(QSqrt2 {
            p: &self.p / &n,
            q: -(&self.q / &n),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Exact sign: −1, 0 or +1.
    pub fn signum(&self) -> i8 {
        let sp = sign_of(&self.p);
        let sq = sign_of(&self.q);
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        // Opposite signs: the larger of p² and 2q² wins.
        let p2 = &self.p * &self.p;
        let q2 = BigRational::from_integer(BigInt::from(2)) * &self.q * &self.q;
        match p2.cmp(&q2) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => unreachable!("p² = 2q² has no nonzero rational solution"),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Nearest double, within one unit in the last place.
    pub fn to_f64(&self) -> f64 {
        if self.q.is_zero() {
            return self.p.to_f64().unwrap_or(f64::NAN);
        }
        let approx = self.rough_f64();
        let pn = self.p.numer();
        let pd = self.p.denom();
        let qn = self.q.numer();
        let qd = self.q.denom();
        // value = (big_p + big_q·√2) / den
        let big_p = pn * qd;
        let big_q = qn * pd;
        let den = pd * qd;
        let mag = approx.abs().log2().floor();
        let shift = (112.0 - mag - (den.bits() as f64 - 1.0)).max(0.0) as usize;
        let scaled_p = &big_p << shift;
        let root = (BigInt::from(2) * &big_q * &big_q << (2 * shift)).sqrt();
        let numer = if big_q.is_negative() {
            scaled_p - root
        } else {
            scaled_p + root
        };
        BigRational::new(numer, den << shift)
            .to_f64()
            .unwrap_or(approx)
    }

    /// Cancellation-free double approximation, used to size the exact rounding.
    fn rough_f64(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        if sign_of(&self.p) * sign_of(&self.q) >= 0 {
            p + q * std::f64::consts::SQRT_2
        } else {
            self.norm().to_f64().unwrap_or(f64::NAN) / (p - q * std::f64::consts::SQRT_2)
        }
    }

    /// Exact `cos` and `sin` of `k·π/4`.
    pub fn cos_sin_quarter_pi(k: i64) -> (Self, Self) {
        let h = Self::frac_1_sqrt2();
        let z = Self::zero();
        let o = Self::one();
        match k.rem_euclid(8) {
            0 => (o, z),
            1 => (h.clone(), h),
            2 => (z, o),
            3 => (-h.clone(), h),
            4 => (-o, z),
            5 => (-h.clone(), -h),
            6 => (z, -o),
            _ => (h.clone(), -h),
        }
    }
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p.numer(), self.p.denom())?;
        if !self.q.is_zero() {
            let sign = if self.q.is_negative() { '-' } else { '+' };
            write!(f, "{}{}/{}*s2", sign, self.q.numer().abs(), self.q.denom())?;
        }
        Ok(())
    }
}

impl fmt::Debug for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for QSqrt2 {
    type Err = Error;

    /// Accepts `p/q`, `p/q+r/t*s2`, `p/q-r/t*s2` and the surd-only form `r/t*s2`.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(Error::Parse(format!("invalid exact scalar `{s}`")));
        }
        let split = s
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i);
        let (rat, surd) = match split {
            Some(i) => (&s[..i], Some(&s[i..])),
            None if s.ends_with("*s2") => ("0", Some(s)),
            None => (s, None),
        };
        let p = parse_rational(rat)?;
        let q = match surd {
            None => BigRational::zero(),
            Some(t) => {
                let body = t
                    .strip_suffix("*s2")
                    .ok_or_else(|| Error::Parse(format!("expected `*s2` suffix in `{s}`")))?;
                let body = body.strip_prefix('+').unwrap_or(body);
                parse_rational(body)?
            }
        };
        Ok(QSqrt2 { p, q })
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a QSqrt2> for &'a QSqrt2 {
            type Output = QSqrt2;
            fn $method(self, rhs: &'a QSqrt2) -> QSqrt2 {
                let f: fn(&QSqrt2, &QSqrt2) -> QSqrt2 = $body;
                f(self, rhs)
            }
        }
        impl $tr<QSqrt2> for QSqrt2 {
            type Output = QSqrt2;
            fn $method(self, rhs: QSqrt2) -> QSqrt2 {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QSqrt2> for QSqrt2 {
            type Output = QSqrt2;
            fn $method(self, rhs: &'a QSqrt2) -> QSqrt2 {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| QSqrt2 {
    p: &a.p + &b.p,
    q: &a.q + &b.q,
});
forward_binop!(Sub, sub, |a, b| QSqrt2 {
    p: &a.p - &b.p,
    q: &a.q - &b.q,
});
forward_binop!(Mul, mul, |a, b| {
    let two = BigRational::from_integer(BigInt::from(2));
    QSqrt2 {
        p: &a.p * &b.p + two * &a.q * &b.q,
        q: &a.p * &b.q + &a.q * &b.p,
    }
});

impl Div for QSqrt2 {
    type Output = QSqrt2;

    /// Panics on division by zero; use [`QSqrt2::checked_div`] otherwise.
    fn div(self, rhs: QSqrt2) -> QSqrt2 {
        self.checked_div(&rhs).expect("division by zero in Q(√2)")
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 {
            p: -self.p,
            q: -self.q,
        }
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        -self.clone()
    }
}

impl AddAssign<&QSqrt2> for QSqrt2 {
    fn add_assign(&mut self, rhs: &QSqrt2) {
        self.p += &rhs.p;
        self.q += &rhs.q;
    }
}

impl SubAssign<&QSqrt2> for QSqrt2 {
    fn sub_assign(&mut self, rhs: &QSqrt2) {
        self.p -= &rhs.p;
        self.q -= &rhs.q;
    }
}

impl MulAssign<&QSqrt2> for QSqrt2 {
    fn mul_assign(&mut self, rhs: &QSqrt2) {
        *self = &*self * rhs;
    }
}

impl Sum for QSqrt2 {
    fn sum<I: Iterator<Item = QSqrt2>>(iter: I) -> Self {
        iter.fold(QSqrt2::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for QSqrt2 {
    fn from(n: i64) -> Self {
        QSqrt2::from_int(n)
    }
}

impl serde::Serialize for QSqrt2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for QSqrt2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QSqrt2 {
        s.parse().unwrap()
    }

    #[test]
    fn conjugate_product() {
        let a = QSqrt2::from_parts(1, 1, 1, 1);
        let b = QSqrt2::from_parts(1, 1, -1, 1);
        assert_eq!(a * b, QSqrt2::from_int(-1));
    }

    #[test]
    fn inverse_of_sqrt2() {
        assert_eq!(QSqrt2::sqrt2().inv().unwrap(), QSqrt2::from_parts(0, 1, 1, 2));
        assert!(matches!(QSqrt2::zero().inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn sign_with_cancellation() {
        // 10² = 100 > 98 = (7√2)²
        assert_eq!(QSqrt2::from_parts(10, 1, -7, 1).signum(), 1);
        assert_eq!(QSqrt2::from_parts(-10, 1, 7, 1).signum(), -1);
        assert_eq!(QSqrt2::from_parts(7, 5, -1, 1).signum(), -1);
        assert_eq!(QSqrt2::zero().signum(), 0);
    }

    #[test]
    fn text_format() {
        let x = QSqrt2::from_parts(1, 1, -1, 2);
        assert_eq!(x.to_string(), "1/1-1/2*s2");
        assert_eq!(q("1/1-1/2*s2"), x);
        assert_eq!(QSqrt2::zero().to_string(), "0/1");
        assert_eq!(QSqrt2::frac_1_sqrt2().to_string(), "0/1+1/2*s2");
        assert_eq!(q("1/2*s2"), QSqrt2::frac_1_sqrt2());
        assert_eq!(q("-3/6"), QSqrt2::from_ratio(-1, 2));
        assert!("1/0".parse::<QSqrt2>().is_err());
        assert!("1/1 + 1/2*s2".parse::<QSqrt2>().is_err());
        assert!("1/1+1/2".parse::<QSqrt2>().is_err());
    }

    #[test]
    fn float_conversion_of_cancelling_values() {
        let x = QSqrt2::from_parts(10, 1, -7, 1);
        let expected = 10.0 - 7.0 * std::f64::consts::SQRT_2;
        assert!((x.to_f64() - expected).abs() < 1e-14);
        // 99/70 is a convergent of √2: √2 − 99/70 = −1 / (70·(70√2 + 99)).
        let y = QSqrt2::from_parts(0, 1, 1, 1) - QSqrt2::from_ratio(99, 70);
        let expected = -1.0 / (70.0 * (70.0 * std::f64::consts::SQRT_2 + 99.0));
        assert!((y.to_f64() - expected).abs() <= 4.0 * f64::EPSILON * expected.abs());
    }

    #[test]
    fn trig_table() {
        let (c, s) = QSqrt2::cos_sin_quarter_pi(3);
        assert_eq!(c, -QSqrt2::frac_1_sqrt2());
        assert_eq!(s, QSqrt2::frac_1_sqrt2());
        let (c, s) = QSqrt2::cos_sin_quarter_pi(-2);
        assert_eq!((c, s), (QSqrt2::zero(), -QSqrt2::one()));
    }
}
