//! Exceptional bundles: the dyadic slope recursion, endpoint intervals,
//! the Drezet-Le Potier threshold and the controlling exceptional bundle.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::chern::{orthogonal_slope_at_half, Branch, ChernCharacter, LogChern};
use crate::error::{Error, Result};
use crate::quadratic::{sign_two_radicals, QuadraticExt};
use crate::rational::{ceil_i64, floor_i64, fmt_rational, half, int, rat, Rational};

pub const DEFAULT_DEPTH_CAP: u32 = 64;

/// `p / 2^q` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    pub p: i128,
    pub q: u32,
}

impl Dyadic {
    pub fn new(mut p: i128, mut q: u32) -> Self {
        while q > 0 && p % 2 == 0 {
            p /= 2;
            q -= 1;
        }
        Dyadic { p, q }
    }

    pub fn integer(n: i64) -> Self {
        Dyadic { p: n as i128, q: 0 }
    }

    pub fn value(&self) -> Rational {
        Rational::new(BigInt::from(self.p), BigInt::one() << self.q)
    }

    /// Numerator at denominator `2^q` (requires `q >= self.q`).
    fn scaled(&self, q: u32) -> i128 {
        self.p << (q - self.q)
    }

    /// The midpoint of two adjacent addresses, if they are adjacent.
    pub fn child_of(a: Dyadic, b: Dyadic) -> Option<Dyadic> {
        let q = a.q.max(b.q);
        let (pa, pb) = (a.scaled(q), b.scaled(q));
        if (pa - pb).abs() != 1 {
            return None;
        }
        Some(Dyadic::new(pa + pb, q + 1))
    }

    /// The two parents `p-1 / 2^q` and `p+1 / 2^q` of a non-integer address.
    pub fn parents(&self) -> Option<(Dyadic, Dyadic)> {
        if self.q == 0 {
            return None;
        }
        Some((Dyadic::new(self.p - 1, self.q), Dyadic::new(self.p + 1, self.q)))
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { p: -self.p, q: self.q }
    }

    pub fn shift(&self, n: i64) -> Dyadic {
        Dyadic { p: self.p + ((n as i128) << self.q), q: self.q }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let q = self.q.max(other.q);
        self.scaled(q).cmp(&other.scaled(q))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 0 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/2^{}", self.p, self.q)
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExceptionalSlope {
    #[serde(with = "crate::rational::serde_str")]
    pub slope: Rational,
    #[serde(serialize_with = "ser_bigint")]
    pub rank: BigInt,
    #[serde(with = "crate::rational::serde_str")]
    pub discriminant: Rational,
    pub dyadic_address: Dyadic,
}

fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

/// `(1 - 1/r^2) / 2`.
pub fn exceptional_discriminant(rank: &BigInt) -> Rational {
    (Rational::one() - Rational::new(BigInt::one(), rank * rank)) * half()
}

impl ExceptionalSlope {
    pub fn log(&self) -> LogChern {
        LogChern::new(Rational::from_integer(self.rank.clone()), self.slope.clone(), self.discriminant.clone())
    }

    pub fn ch(&self) -> ChernCharacter {
        self.log().ch()
    }

    pub fn is_line_bundle(&self) -> bool {
        self.rank.is_one()
    }

    /// `E(n)`.
    pub fn twist(&self, n: i64) -> ExceptionalSlope {
        ExceptionalSlope {
            slope: &self.slope + int(n),
            rank: self.rank.clone(),
            discriminant: self.discriminant.clone(),
            dyadic_address: self.dyadic_address.shift(n),
        }
    }

    /// `E^*`, the exceptional bundle of slope `-slope`.
    pub fn dual(&self) -> ExceptionalSlope {
        ExceptionalSlope {
            slope: -&self.slope,
            rank: self.rank.clone(),
            discriminant: self.discriminant.clone(),
            dyadic_address: self.dyadic_address.neg(),
        }
    }

    /// `sqrt(2 Delta + 5/4)` as a surd.
    pub fn endpoint_root(&self) -> QuadraticExt {
        QuadraticExt::new(Rational::zero(), Rational::one(), &(int(2) * &self.discriminant + rat(5, 4)))
            .expect("radicand of an exceptional bundle is positive")
    }

    /// Half-width `3/2 - sqrt(2 Delta + 5/4)` of the endpoint interval.
    pub fn half_width(&self) -> QuadraticExt {
        self.endpoint_root().neg().add_rational(&rat(3, 2))
    }

    /// Sign of `x - (slope - w)` and of `(slope + w) - x` where `w` is the half-width.
    fn interval_signs(&self, x: &QuadraticExt) -> (i32, i32) {
        let root = self.endpoint_root();
        // x - slope + 3/2 - root
        let left = sign_two_radicals(&(&x.a - &self.slope + rat(3, 2)), &x.b, &x.c, &(-&root.b), &root.c);
        // slope + 3/2 - root - x
        let right = sign_two_radicals(&(&self.slope + rat(3, 2) - &x.a), &(-&x.b), &x.c, &(-&root.b), &root.c);
        (left, right)
    }
}

impl fmt::Display for ExceptionalSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E_{{{}}} (rank {})", fmt_rational(&self.slope), self.rank)
    }
}

fn memo() -> &'static RwLock<HashMap<Dyadic, ExceptionalSlope>> {
    static MEMO: OnceLock<RwLock<HashMap<Dyadic, ExceptionalSlope>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn line(n: i128) -> ExceptionalSlope {
    ExceptionalSlope {
        slope: Rational::from_integer(BigInt::from(n)),
        rank: BigInt::one(),
        discriminant: Rational::zero(),
        dyadic_address: Dyadic { p: n, q: 0 },
    }
}

/// `alpha . beta = (alpha + beta)/2 + (Delta_beta - Delta_alpha)/(3 + alpha - beta)`.
fn dot_slope(a: &ExceptionalSlope, b: &ExceptionalSlope) -> Rational {
    (&a.slope + &b.slope) * half() + (&b.discriminant - &a.discriminant) / (int(3) + &a.slope - &b.slope)
}

/// The exceptional slope `epsilon(a)`; ranks come from
/// `r_{alpha.beta} = r_alpha r_beta (3 + alpha - beta)`.
pub fn epsilon(a: Dyadic) -> ExceptionalSlope {
    let a = Dyadic::new(a.p, a.q);
    if a.q == 0 {
        return line(a.p);
    }
    if let Some(e) = memo().read().expect("memo poisoned").get(&a) {
        return e.clone();
    }
    let (pa, pb) = a.parents().expect("non-integer address");
    let alpha = epsilon(pa);
    let beta = epsilon(pb);
    let slope = dot_slope(&alpha, &beta);
    let factor = int(3) + &alpha.slope - &beta.slope;
    let rank_r = Rational::from_integer(&alpha.rank * &beta.rank) * factor;
    debug_assert!(rank_r.is_integer());
    let rank = rank_r.to_integer();
    let e = ExceptionalSlope { slope, discriminant: exceptional_discriminant(&rank), rank, dyadic_address: a };
    memo().write().expect("memo poisoned").insert(a, e.clone());
    e
}

/// `alpha . beta` for an adjacent pair; also accepts two line bundles
/// `n-1, n+1`, which give `O(n)`.
pub fn dot(alpha: &ExceptionalSlope, beta: &ExceptionalSlope) -> Result<ExceptionalSlope> {
    let not_pair = || Error::NotAnExceptionalPair(fmt_rational(&alpha.slope), fmt_rational(&beta.slope));
    let (a, b) = (alpha.dyadic_address, beta.dyadic_address);
    let child = match Dyadic::child_of(a, b) {
        Some(c) if a < b => c,
        _ if a.q == 0 && b.q == 0 && b.p - a.p == 2 => Dyadic::integer((a.p + 1) as i64),
        _ => return Err(not_pair()),
    };
    let e = epsilon(child);
    if e.slope != dot_slope(alpha, beta) {
        return Err(Error::InternalInconsistency(format!("dot formula disagrees with epsilon at {child}")));
    }
    Ok(e)
}

/// The exceptional bundle of a given slope, if there is one within `depth_cap`.
pub fn exceptional_with_slope(slope: &Rational, depth_cap: u32) -> Option<ExceptionalSlope> {
    let n = floor_i64(slope);
    if slope.is_integer() {
        return Some(epsilon(Dyadic::integer(n)));
    }
    let (mut lo, mut hi) = (Dyadic::integer(n), Dyadic::integer(n + 1));
    for _ in 0..depth_cap {
        let mid = Dyadic::child_of(lo, hi)?;
        let e = epsilon(mid);
        match slope.cmp(&e.slope) {
            Ordering::Equal => return Some(e),
            Ordering::Less => hi = mid,
            Ordering::Greater => lo = mid,
        }
        if e.rank > *slope.denom() {
            // ranks only grow and r * slope is an integer
            return None;
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlBranch {
    Primary,
    Secondary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ControllingData {
    /// `E` with slope in `[0, 1)` and `E_gamma = E^*(d)`.
    pub base: ExceptionalSlope,
    pub d: i64,
    #[serde(with = "crate::rational::serde_str")]
    pub gamma: Rational,
    /// `E_gamma` itself.
    pub exceptional: ExceptionalSlope,
    pub alpha: ExceptionalSlope,
    pub beta: ExceptionalSlope,
    pub branch: ControlBranch,
    /// The orthogonal slope sits exactly on an endpoint of the interval.
    pub boundary: bool,
}

impl ControllingData {
    fn from_gamma(e: ExceptionalSlope, branch: ControlBranch, boundary: bool) -> Self {
        let d = ceil_i64(&e.slope);
        let base = e.dual().twist(d);
        let (alpha, beta) = match e.dyadic_address.parents() {
            Some((a, b)) => (epsilon(a), epsilon(b)),
            None => {
                let n = e.dyadic_address.p as i64;
                (epsilon(Dyadic::integer(n - 1)), epsilon(Dyadic::integer(n + 1)))
            }
        };
        ControllingData { base, d, gamma: e.slope.clone(), exceptional: e, alpha, beta, branch, boundary }
    }

    pub fn mu_e(&self) -> &Rational {
        &self.base.slope
    }
}

/// `(mu_G, mu_F) = (gamma - w, gamma + w)` with `w = 3/2 - sqrt(2 Delta + 5/4)`.
pub fn endpoints(c: &ControllingData) -> (QuadraticExt, QuadraticExt) {
    let w = c.exceptional.half_width();
    (w.neg().add_rational(&c.gamma), w.add_rational(&c.gamma))
}

/// Finds the exceptional slope whose closed endpoint interval contains `x`.
pub fn locate(x: &QuadraticExt, depth_cap: u32) -> Result<(ExceptionalSlope, bool)> {
    let n = x.floor().to_i64().ok_or(Error::ControllingNotFound(0))?;
    let check = |e: &ExceptionalSlope| {
        let (l, r) = e.interval_signs(x);
        if l >= 0 && r >= 0 {
            Some(l == 0 || r == 0)
        } else {
            None
        }
    };
    for m in [n, n + 1] {
        let e = epsilon(Dyadic::integer(m));
        if let Some(b) = check(&e) {
            return Ok((e, b));
        }
    }
    let (mut lo, mut hi) = (Dyadic::integer(n), Dyadic::integer(n + 1));
    for _ in 0..depth_cap {
        let mid = Dyadic::child_of(lo, hi).ok_or(Error::ControllingNotFound(depth_cap))?;
        let e = epsilon(mid);
        if let Some(b) = check(&e) {
            return Ok((e, b));
        }
        if x.cmp_rational(&e.slope) == Ordering::Less {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::ControllingNotFound(depth_cap))
}

pub fn controlling(xi: &LogChern, branch: ControlBranch) -> Result<ControllingData> {
    controlling_with_cap(xi, branch, DEFAULT_DEPTH_CAP)
}

pub fn controlling_with_cap(xi: &LogChern, branch: ControlBranch, depth_cap: u32) -> Result<ControllingData> {
    let x = match branch {
        ControlBranch::Primary => orthogonal_slope_at_half(xi, Branch::Larger)?,
        ControlBranch::Secondary => {
            if xi.r < int(3) {
                return Err(Error::UnsupportedRank(format!(
                    "the secondary controlling bundle needs rank at least 3, got {}",
                    fmt_rational(&xi.r)
                )));
            }
            orthogonal_slope_at_half(xi, Branch::Smaller)?
        }
    };
    let (e, boundary) = locate(&x, depth_cap)?;
    Ok(ControllingData::from_gamma(e, branch, boundary))
}

/// `P(x) = (x^2 + 3x + 2) / 2`.
fn p_poly(x: &Rational) -> Rational {
    (x * x + int(3) * x + int(2)) * half()
}

/// The DLP threshold `delta(mu)`.
pub fn dlp_threshold(mu: &Rational) -> Rational {
    let x = QuadraticExt::rational(mu.clone());
    let open = |e: &ExceptionalSlope| {
        let (l, r) = e.interval_signs(&x);
        (l, r)
    };
    let value = |e: &ExceptionalSlope| {
        let dist = (mu - &e.slope).abs();
        p_poly(&(-dist)) - &e.discriminant
    };
    let n = floor_i64(mu);
    for m in [n, n + 1] {
        let e = epsilon(Dyadic::integer(m));
        let (l, r) = open(&e);
        if l > 0 && r > 0 {
            return value(&e);
        }
        if (l == 0 && r >= 0) || (r == 0 && l >= 0) {
            return half();
        }
    }
    let (mut lo, mut hi) = (Dyadic::integer(n), Dyadic::integer(n + 1));
    for _ in 0..DEFAULT_DEPTH_CAP {
        let mid = match Dyadic::child_of(lo, hi) {
            Some(m) => m,
            None => break,
        };
        let e = epsilon(mid);
        let (l, r) = open(&e);
        if l > 0 && r > 0 {
            return value(&e);
        }
        if (l == 0 && r >= 0) || (r == 0 && l >= 0) {
            return half();
        }
        if *mu < e.slope {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    half()
}

/// `Delta > delta(mu)`.
pub fn is_above_dlp(xi: &LogChern) -> bool {
    xi.r.is_positive() && xi.delta > dlp_threshold(&xi.mu)
}

/// All exceptional slopes in `[lo, hi]` of rank `< max_rank`, plus every
/// integer slope in the window, sorted by slope.
pub fn enumerate_exceptionals(max_rank: u64, lo: &Rational, hi: &Rational) -> Vec<ExceptionalSlope> {
    let cap = BigInt::from(max_rank);
    let mut out = Vec::new();
    let (a, b) = (floor_i64(lo), ceil_i64(hi));
    for n in a..=b {
        let e = epsilon(Dyadic::integer(n));
        if &e.slope >= lo && &e.slope <= hi {
            out.push(e);
        }
        if n < b {
            walk(Dyadic::integer(n), Dyadic::integer(n + 1), &cap, lo, hi, &mut out);
        }
    }
    out.sort_by(|x, y| x.slope.cmp(&y.slope));
    out
}

fn walk(a: Dyadic, b: Dyadic, cap: &BigInt, lo: &Rational, hi: &Rational, out: &mut Vec<ExceptionalSlope>) {
    if epsilon(b).slope < *lo || epsilon(a).slope > *hi {
        return;
    }
    let m = Dyadic::child_of(a, b).expect("adjacent");
    let e = epsilon(m);
    if &e.rank >= cap {
        return;
    }
    if &e.slope >= lo && &e.slope <= hi {
        out.push(e);
    }
    walk(a, m, cap, lo, hi, out);
    walk(m, b, cap, lo, hi, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chern::{rel_euler, serre_dual};

    fn lc(r: i64, mu: Rational, d: Rational) -> LogChern {
        LogChern::from_ints(r, mu, d)
    }

    #[test]
    fn epsilon_examples() {
        let e = epsilon(Dyadic::integer(0));
        assert_eq!((e.slope, e.rank, e.discriminant), (int(0), BigInt::one(), int(0)));
        let e = epsilon(Dyadic::new(1, 1));
        assert_eq!((e.slope, e.rank, e.discriminant), (rat(1, 2), BigInt::from(2), rat(3, 8)));
        let e = epsilon(Dyadic::new(1, 2));
        assert_eq!((e.slope, e.rank, e.discriminant), (rat(2, 5), BigInt::from(5), rat(12, 25)));
        assert_eq!(epsilon(Dyadic::new(5, 3)).rank, BigInt::from(29));
    }

    #[test]
    fn dot_examples() {
        let half_e = epsilon(Dyadic::new(1, 1));
        let one = epsilon(Dyadic::integer(1));
        assert_eq!(dot(&half_e, &one).unwrap().slope, rat(3, 5));
        assert_eq!(dot(&epsilon(Dyadic::integer(0)), &one).unwrap().slope, rat(1, 2));
        let three = epsilon(Dyadic::integer(3));
        assert_eq!(dot(&one, &three).unwrap().slope, int(2));
        let q1 = epsilon(Dyadic::new(1, 2));
        let q3 = epsilon(Dyadic::new(3, 2));
        assert!(matches!(dot(&q1, &q3), Err(Error::NotAnExceptionalPair(..))));
    }

    #[test]
    fn endpoints_examples() {
        let e = epsilon(Dyadic::new(1, 1)).dual().twist(0);
        let c = ControllingData::from_gamma(e, ControlBranch::Primary, false);
        let (g, f) = endpoints(&c);
        assert_eq!(g.to_string(), "-2 + sqrt(2)");
        assert_eq!(f.to_string(), "1 - sqrt(2)");
        let c = ControllingData::from_gamma(epsilon(Dyadic::integer(2)), ControlBranch::Primary, false);
        let (g, f) = endpoints(&c);
        assert_eq!(g.to_string(), "1/2 + 1/2*sqrt(5)");
        assert_eq!(f.to_string(), "7/2 - 1/2*sqrt(5)");
    }

    #[test]
    fn controlling_examples() {
        let c = controlling(&lc(1, int(0), int(6)), ControlBranch::Primary).unwrap();
        assert_eq!((c.gamma.clone(), c.d, c.base.slope.clone()), (int(2), 2, int(0)));
        assert_eq!((c.alpha.slope.clone(), c.beta.slope.clone()), (int(1), int(3)));
        let c = controlling(&lc(1, int(0), int(12)), ControlBranch::Primary).unwrap();
        assert_eq!((c.gamma.clone(), c.d, c.base.slope.clone()), (rat(7, 2), 4, rat(1, 2)));
        let u = serre_dual(&lc(3, rat(2, 3), rat(17, 9)));
        let c = controlling(&u, ControlBranch::Primary).unwrap();
        assert_eq!((c.gamma.clone(), c.d, c.base.slope.clone()), (rat(22, 5), 5, rat(3, 5)));
        assert_eq!((c.alpha.slope.clone(), c.beta.slope.clone()), (int(4), rat(9, 2)));
        assert!(!c.boundary);
        assert!(controlling(&lc(1, int(0), int(6)), ControlBranch::Secondary).is_err());
    }

    #[test]
    fn dlp_examples() {
        assert!(!is_above_dlp(&lc(1, int(0), int(1))));
        assert!(is_above_dlp(&lc(1, int(0), int(2))));
        assert!(!is_above_dlp(&lc(2, rat(1, 2), rat(3, 8))));
    }

    #[test]
    fn enumerate_examples() {
        let slopes = |m: u64| -> Vec<Rational> {
            enumerate_exceptionals(m, &int(0), &int(1)).into_iter().map(|e| e.slope).collect()
        };
        assert_eq!(slopes(3), vec![int(0), rat(1, 2), int(1)]);
        assert_eq!(slopes(6), vec![int(0), rat(2, 5), rat(1, 2), rat(3, 5), int(1)]);
        assert_eq!(slopes(1), vec![int(0), int(1)]);
        assert_eq!(
            enumerate_exceptionals(1, &int(-2), &rat(3, 2)).into_iter().map(|e| e.slope).collect::<Vec<_>>(),
            vec![int(-2), int(-1), int(0), int(1)]
        );
    }

    #[test]
    fn enumerated_are_exceptional() {
        for e in enumerate_exceptionals(1000, &int(0), &int(1)) {
            let l = e.log();
            assert_eq!(rel_euler(&l, &l), int(1));
            assert!((Rational::from_integer(e.rank.clone()) * &e.slope).is_integer());
        }
    }

    #[test]
    fn exceptional_pairs_are_orthogonal_backwards() {
        // chi(E_gamma, E_alpha) = chi(E_beta, E_gamma) = 0 for the triple (alpha, gamma, beta)
        for e in enumerate_exceptionals(500, &int(0), &int(1)) {
            if let Some((a, b)) = e.dyadic_address.parents() {
                let (a, b) = (epsilon(a).log(), epsilon(b).log());
                assert_eq!(rel_euler(&e.log(), &a), int(0));
                assert_eq!(rel_euler(&b, &e.log()), int(0));
                assert_eq!(rel_euler(&b, &a), int(0));
            }
        }
    }

    #[test]
    fn slope_lookup() {
        assert_eq!(exceptional_with_slope(&rat(12, 29), 64).unwrap().rank, BigInt::from(29));
        assert!(exceptional_with_slope(&rat(1, 3), 64).is_none());
    }
}
