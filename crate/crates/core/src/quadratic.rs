//! Numbers `a + b*sqrt(c)` with rational `a`, `b` and a positive integer `c`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, square_free_part, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticExt {
    pub a: Rational,
    pub b: Rational,
    /// Radicand; 1 when `b` is zero.
    pub c: BigInt,
}

fn sgn(x: &Rational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `a + b*sqrt(c)` for any non-negative integer `c`.
fn sign_single(a: &Rational, b: &Rational, c: &BigInt) -> i32 {
    let sa = sgn(a);
    let sb = if c.is_zero() { 0 } else { sgn(b) };
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    // opposite signs: compare a^2 with b^2 c
    let lhs = a * a;
    let rhs = b * b * Rational::from_integer(c.clone());
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

/// Sign of `p + q1*sqrt(c1) + q2*sqrt(c2)`, by isolating and squaring.
pub fn sign_two_radicals(p: &Rational, q1: &Rational, c1: &BigInt, q2: &Rational, c2: &BigInt) -> i32 {
    if c1 == c2 {
        return sign_single(p, &(q1 + q2), c1);
    }
    let c1r = Rational::from_integer(c1.clone());
    let c2r = Rational::from_integer(c2.clone());
    // sign of X = q1 sqrt(c1) + q2 sqrt(c2)
    let s1 = if c1.is_zero() { 0 } else { sgn(q1) };
    let s2 = if c2.is_zero() { 0 } else { sgn(q2) };
    let sx = if s1 == 0 {
        s2
    } else if s2 == 0 || s1 == s2 {
        s1
    } else {
        s1 * sgn(&(q1 * q1 * &c1r - q2 * q2 * &c2r))
    };
    let sp = sgn(p);
    if sx == 0 {
        return sp;
    }
    if sp == 0 || sp == sx {
        return sx;
    }
    // |p| against |X|: p^2 - X^2 = (p^2 - q1^2 c1 - q2^2 c2) - 2 q1 q2 sqrt(c1 c2)
    let rest = p * p - q1 * q1 * &c1r - q2 * q2 * &c2r;
    let coeff = -(Rational::from_integer(BigInt::from(2)) * q1 * q2);
    match sign_single(&rest, &coeff, &(c1 * c2)) {
        1 => sp,
        -1 => sx,
        _ => 0,
    }
}

impl QuadraticExt {
    pub fn rational(a: Rational) -> Self {
        QuadraticExt { a, b: Rational::zero(), c: BigInt::one() }
    }

    /// `a + b*sqrt(radicand)` for a non-negative rational radicand.
    pub fn new(a: Rational, b: Rational, radicand: &Rational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::NoRealIntersection(fmt_rational(radicand)));
        }
        if radicand.is_zero() || b.is_zero() {
            return Ok(Self::rational(a));
        }
        // sqrt(p/q) = sqrt(p q) / q
        let pq = radicand.numer() * radicand.denom();
        let (k, c) = square_free_part(&pq);
        let b = b * Rational::new(k, radicand.denom().clone());
        if c.is_one() {
            return Ok(Self::rational(a + b));
        }
        Ok(QuadraticExt { a, b, c })
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn signum(&self) -> i32 {
        sign_single(&self.a, &self.b, &self.c)
    }

    /// Exact comparison, also across different radicands.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        let p = &self.a - &other.a;
        let s = sign_two_radicals(&p, &self.b, &self.c, &(-&other.b), &other.c);
        s.cmp(&0)
    }

    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        sign_single(&(&self.a - x), &self.b, &self.c).cmp(&0)
    }

    pub fn add_rational(&self, x: &Rational) -> Self {
        QuadraticExt { a: &self.a + x, b: self.b.clone(), c: self.c.clone() }
    }

    pub fn neg(&self) -> Self {
        QuadraticExt { a: -&self.a, b: -&self.b, c: self.c.clone() }
    }

    pub fn to_f64(&self) -> f64 {
        let c = to_f64(&Rational::from_integer(self.c.clone()));
        to_f64(&self.a) + to_f64(&self.b) * c.sqrt()
    }

    pub fn floor(&self) -> BigInt {
        let mut k = BigInt::from(self.to_f64().floor() as i64);
        while self.cmp_rational(&Rational::from_integer(k.clone())) == Ordering::Less {
            k -= 1;
        }
        while self.cmp_rational(&Rational::from_integer(&k + 1)) != Ordering::Less {
            k += 1;
        }
        k
    }
}

impl fmt::Display for QuadraticExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let sb = if self.b.abs().is_one() { String::new() } else { format!("{}*", fmt_rational(&self.b.abs())) };
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.a.is_zero() {
            let lead = if self.b.is_negative() { "-" } else { "" };
            return write!(f, "{lead}{sb}sqrt({})", self.c);
        }
        write!(f, "{} {sign} {sb}sqrt({})", fmt_rational(&self.a), self.c)
    }
}

impl Serialize for QuadraticExt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn normalizes_radicand() {
        let q = QuadraticExt::new(int(0), int(1), &rat(101, 4)).unwrap();
        assert_eq!((q.b.clone(), q.c.clone()), (rat(1, 2), BigInt::from(101)));
        let q = QuadraticExt::new(int(1), int(1), &int(9)).unwrap();
        assert!(q.is_rational());
        assert_eq!(q.a, int(4));
        assert!(QuadraticExt::new(int(0), int(1), &int(-1)).is_err());
    }

    #[test]
    fn signs_match_floating_point_away_from_zero() {
        for a in -6..=6 {
            for b in -4..=4 {
                for c in [2, 3, 5, 6, 7, 101] {
                    let q = QuadraticExt::new(rat(a, 3), rat(b, 2), &int(c)).unwrap();
                    let f = q.to_f64();
                    if f.abs() > 1e-9 {
                        assert_eq!(q.signum(), if f > 0.0 { 1 } else { -1 }, "{q}");
                    }
                }
            }
        }
    }

    #[test]
    fn cross_radical_comparison() {
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        // sqrt(2) + sqrt(3) - 3.15 > 0, sqrt(2) + sqrt(3) - 3.15 + 0.01 > 0, - 3.147 < 0
        assert_eq!(sign_two_radicals(&rat(-315, 100), &int(1), &two, &int(1), &three), -1);
        assert_eq!(sign_two_radicals(&rat(-314, 100), &int(1), &two, &int(1), &three), 1);
        // sqrt(10) - sqrt(2) - sqrt(3) = 0.0157 > 0
        let x = QuadraticExt::new(int(0), int(1), &int(10)).unwrap();
        let y = QuadraticExt::new(int(0), int(1), &int(2)).unwrap();
        let d = sign_two_radicals(&int(0), &x.b, &x.c, &(-&y.b), &y.c);
        assert_eq!(d, 1);
        // exact tie: 2 sqrt(2) = sqrt(8) normalizes to the same radicand
        let z = QuadraticExt::new(int(0), int(1), &int(8)).unwrap();
        let w = QuadraticExt::new(int(0), int(2), &int(2)).unwrap();
        assert_eq!(z.cmp_exact(&w), Ordering::Equal);
        let u = QuadraticExt::new(rat(1, 3), int(1), &int(3)).unwrap();
        assert_eq!(u.cmp_exact(&y), Ordering::Greater);
    }

    #[test]
    fn floor_is_exact() {
        let q = QuadraticExt::new(rat(-3, 2), rat(1, 2), &int(101)).unwrap();
        assert_eq!(q.floor(), BigInt::from(3));
        let q = QuadraticExt::new(int(2), int(-1), &int(4)).unwrap();
        assert_eq!(q.floor(), BigInt::from(0));
    }

    #[test]
    fn display() {
        let q = QuadraticExt::new(rat(-3, 2), rat(1, 2), &int(101)).unwrap();
        assert_eq!(q.to_string(), "-3/2 + 1/2*sqrt(101)");
    }
}
