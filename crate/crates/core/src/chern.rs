//! Chern characters on the projective plane.
//!
//! Characters are stored as `(r, ch1, ch2)`; the log form `(r, mu, delta)`
//! with `mu = ch1 / r` and `delta = mu^2/2 - ch2/r` is a view.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadratic::QuadraticExt;
use crate::rational::{fmt_rational, half, int, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChernCharacter {
    #[serde(with = "crate::rational::serde_str")]
    pub r: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub c1: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub ch2: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogChern {
    #[serde(with = "crate::rational::serde_str")]
    pub r: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub mu: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub delta: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Larger,
    Smaller,
}

impl ChernCharacter {
    pub fn new(r: Rational, c1: Rational, ch2: Rational) -> Self {
        ChernCharacter { r, c1, ch2 }
    }

    pub fn zero() -> Self {
        ChernCharacter::new(Rational::zero(), Rational::zero(), Rational::zero())
    }

    /// `O(d)`.
    pub fn line_bundle(d: i64) -> Self {
        ChernCharacter::new(int(1), int(d), rat(d * d, 2))
    }

    /// Ideal sheaf of `n` points, `(1, 0, -n)`.
    pub fn ideal_points(n: i64) -> Self {
        ChernCharacter::new(int(1), int(0), int(-n))
    }

    /// `I_n(d)`.
    pub fn twisted_ideal(n: i64, d: i64) -> Self {
        Self::ideal_points(n).twist(d)
    }

    /// Tangent bundle `T(d)`: `T = (2, 3, 3/2)`.
    pub fn tangent(d: i64) -> Self {
        ChernCharacter::new(int(2), int(3), rat(3, 2)).twist(d)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        ChernCharacter::new(&self.r * k, &self.c1 * k, &self.ch2 * k)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&int(k))
    }

    /// Character of the tensor product.
    pub fn tensor(&self, o: &Self) -> Self {
        ChernCharacter::new(
            &self.r * &o.r,
            &self.r * &o.c1 + &o.r * &self.c1,
            &self.r * &o.ch2 + &o.r * &self.ch2 + &self.c1 * &o.c1,
        )
    }

    pub fn dual(&self) -> Self {
        ChernCharacter::new(self.r.clone(), -&self.c1, self.ch2.clone())
    }

    pub fn twist(&self, d: i64) -> Self {
        self.tensor(&Self::line_bundle(d))
    }

    /// `U^D = U^*(-3)`.
    pub fn serre_dual(&self) -> Self {
        self.dual().twist(-3)
    }

    /// Riemann-Roch: `chi = r + 3 ch1 / 2 + ch2`.
    pub fn euler(&self) -> Rational {
        &self.r + rat(3, 2) * &self.c1 + &self.ch2
    }

    /// `chi(self, other) = chi(self^* (x) other)`.
    pub fn rel_euler(&self, other: &Self) -> Rational {
        self.dual().tensor(other).euler()
    }

    pub fn slope(&self) -> Option<Rational> {
        if self.r.is_zero() {
            None
        } else {
            Some(&self.c1 / &self.r)
        }
    }

    pub fn to_log(&self) -> Result<LogChern> {
        to_log(self)
    }
}

impl Add for &ChernCharacter {
    type Output = ChernCharacter;
    fn add(self, o: &ChernCharacter) -> ChernCharacter {
        ChernCharacter::new(&self.r + &o.r, &self.c1 + &o.c1, &self.ch2 + &o.ch2)
    }
}

impl Sub for &ChernCharacter {
    type Output = ChernCharacter;
    fn sub(self, o: &ChernCharacter) -> ChernCharacter {
        ChernCharacter::new(&self.r - &o.r, &self.c1 - &o.c1, &self.ch2 - &o.ch2)
    }
}

impl Neg for &ChernCharacter {
    type Output = ChernCharacter;
    fn neg(self) -> ChernCharacter {
        ChernCharacter::new(-&self.r, -&self.c1, -&self.ch2)
    }
}

impl Mul<&ChernCharacter> for &ChernCharacter {
    type Output = ChernCharacter;
    fn mul(self, o: &ChernCharacter) -> ChernCharacter {
        self.tensor(o)
    }
}

impl fmt::Display for ChernCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", fmt_rational(&self.r), fmt_rational(&self.c1), fmt_rational(&self.ch2))
    }
}

impl LogChern {
    pub fn new(r: Rational, mu: Rational, delta: Rational) -> Self {
        LogChern { r, mu, delta }
    }

    pub fn from_ints(r: i64, mu: Rational, delta: Rational) -> Self {
        LogChern::new(int(r), mu, delta)
    }

    pub fn ch(&self) -> ChernCharacter {
        from_log(self)
    }

    pub fn euler(&self) -> Rational {
        euler(self)
    }
}

impl fmt::Display for LogChern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", fmt_rational(&self.r), fmt_rational(&self.mu), fmt_rational(&self.delta))
    }
}

pub fn to_log(c: &ChernCharacter) -> Result<LogChern> {
    if !c.r.is_positive() {
        return Err(Error::NonPositiveRank(fmt_rational(&c.r)));
    }
    let mu = &c.c1 / &c.r;
    let delta = &mu * &mu * half() - &c.ch2 / &c.r;
    Ok(LogChern::new(c.r.clone(), mu, delta))
}

pub fn from_log(l: &LogChern) -> ChernCharacter {
    let ch2 = &l.r * (&l.mu * &l.mu * half() - &l.delta);
    ChernCharacter::new(l.r.clone(), &l.r * &l.mu, ch2)
}

pub fn twist(x: &LogChern, d: i64) -> LogChern {
    LogChern::new(x.r.clone(), &x.mu + int(d), x.delta.clone())
}

pub fn dual(x: &LogChern) -> LogChern {
    LogChern::new(x.r.clone(), -&x.mu, x.delta.clone())
}

pub fn serre_dual(x: &LogChern) -> LogChern {
    twist(&dual(x), -3)
}

/// `r((mu+1)(mu+2)/2 - delta)`.
pub fn euler(x: &LogChern) -> Rational {
    let one = Rational::one();
    let two = int(2);
    &x.r * ((&x.mu + &one) * (&x.mu + &two) * half() - &x.delta)
}

/// `r_u r_v ((mu_v - mu_u + 1)(mu_v - mu_u + 2)/2 - delta_u - delta_v)`.
pub fn rel_euler(u: &LogChern, v: &LogChern) -> Rational {
    let m = &v.mu - &u.mu;
    &u.r * &v.r * ((&m + int(1)) * (&m + int(2)) * half() - &u.delta - &v.delta)
}

/// `(xi, zeta) = chi(xi (x) zeta)`.
pub fn pairing(xi: &ChernCharacter, zeta: &ChernCharacter) -> Rational {
    xi.tensor(zeta).euler()
}

/// `-mu - 3/2 +- sqrt(2 delta + 5/4)`: the slopes where `xi`'s orthogonal
/// line meets `Delta = 1/2`.
pub fn orthogonal_slope_at_half(xi: &LogChern, branch: Branch) -> Result<QuadraticExt> {
    let radicand = int(2) * &xi.delta + rat(5, 4);
    let sign = match branch {
        Branch::Larger => int(1),
        Branch::Smaller => int(-1),
    };
    QuadraticExt::new(-&xi.mu - rat(3, 2), sign, &radicand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn lc(r: i64, mu: Rational, d: Rational) -> LogChern {
        LogChern::from_ints(r, mu, d)
    }

    #[test]
    fn log_examples() {
        let x = to_log(&ChernCharacter::ideal_points(5)).unwrap();
        assert_eq!(x, lc(1, int(0), int(5)));
        let x = to_log(&ChernCharacter::line_bundle(4)).unwrap();
        assert_eq!(x, lc(1, int(4), int(0)));
        let u = lc(3, rat(2, 3), rat(17, 9));
        assert_eq!(from_log(&u), ChernCharacter::new(int(3), int(2), int(-5)));
        assert!(matches!(to_log(&ChernCharacter::zero()), Err(Error::NonPositiveRank(_))));
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler(&lc(1, int(0), int(5))), int(-4));
        assert_eq!(euler(&lc(3, rat(2, 3), rat(17, 9))), int(1));
        for d in -5..6i64 {
            assert_eq!(euler(&lc(1, int(d), int(0))), rat((d + 1) * (d + 2), 2));
        }
    }

    #[test]
    fn rel_euler_examples() {
        let u = lc(3, rat(2, 3), rat(17, 9));
        let t1 = lc(2, rat(1, 2), rat(3, 8));
        assert_eq!(rel_euler(&t1, &u), int(-6));
        assert_eq!(rel_euler(&lc(1, int(1), int(0)), &u), int(-4));
        for r in [1i64, 2, 5, 13, 29] {
            let e = lc(r, rat(1, 3), (int(1) - rat(1, r * r)) * half());
            assert_eq!(rel_euler(&e, &e), int(1));
        }
    }

    #[test]
    fn serre_dual_example() {
        let u = lc(3, rat(2, 3), rat(17, 9));
        assert_eq!(serre_dual(&u), lc(3, rat(-11, 3), rat(17, 9)));
        assert_eq!(dual(&dual(&u)), u);
        assert_eq!(twist(&twist(&u, 2), -2), u);
    }

    #[test]
    fn pairing_examples() {
        let i12 = ChernCharacter::ideal_points(12);
        assert_eq!(pairing(&i12, &ChernCharacter::tangent(2)), int(0));
        assert_eq!(pairing(&i12, &ChernCharacter::zero()), int(0));
        assert_eq!(pairing(&ChernCharacter::ideal_points(6), &ChernCharacter::line_bundle(2)), int(0));
    }

    #[test]
    fn orthogonal_slope_examples() {
        let q = orthogonal_slope_at_half(&lc(1, int(0), int(12)), Branch::Larger).unwrap();
        assert_eq!((q.a.clone(), q.b.clone(), q.c.clone()), (rat(-3, 2), rat(1, 2), BigInt::from(101)));
        let q = orthogonal_slope_at_half(&lc(1, int(0), int(6)), Branch::Larger).unwrap();
        assert_eq!((q.a.clone(), q.b.clone(), q.c.clone()), (rat(-3, 2), rat(1, 2), BigInt::from(53)));
        let q = orthogonal_slope_at_half(&lc(1, int(0), rat(1, 2)), Branch::Larger).unwrap();
        assert!(q.is_rational() && q.a.is_zero());
        assert!(orthogonal_slope_at_half(&lc(1, int(0), int(-1)), Branch::Larger).is_err());
    }
}
