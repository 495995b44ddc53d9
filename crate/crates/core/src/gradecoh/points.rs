//! Seeded samples of reduced point sets in prescribed incidence strata.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::field::Fp;
use super::linalg::Mat;
use super::poly::{monomial_count, monomials, HPoly};
use crate::error::{Error, Result};

pub type Point = [u64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stratum {
    General,
    /// `k` points on a line, the rest general.
    Line(usize),
    /// `k` points on a smooth conic.
    Conic(usize),
    /// `k` points on a cubic.
    Cubic(usize),
    /// Two lines through a common point, two more points on each.
    L33,
    /// All points on one curve of degree `e`.
    OnCurve(u32),
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stratum::General => write!(f, "general"),
            Stratum::Line(k) => write!(f, "L_{k}"),
            Stratum::Conic(k) => write!(f, "Q_{k}"),
            Stratum::Cubic(k) => write!(f, "C_{k}"),
            Stratum::L33 => write!(f, "L_{{3,3}}"),
            Stratum::OnCurve(e) => write!(f, "on_curve({e})"),
        }
    }
}

impl FromStr for Stratum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown stratum '{s}'"));
        let num = |t: &str| t.trim_matches(|c| c == '{' || c == '}').parse::<usize>().map_err(|_| bad());
        let hilb = s.strip_prefix("P^2[").and_then(|r| r.strip_suffix(']'));
        if s == "general" || hilb.is_some_and(|r| r == "n" || r.parse::<usize>().is_ok()) {
            return Ok(Stratum::General);
        }
        if s == "L_{3,3}" || s == "L33" || s == "L_33" {
            return Ok(Stratum::L33);
        }
        if let Some(e) = s.strip_prefix("on_curve(").and_then(|r| r.strip_suffix(')')) {
            return Ok(Stratum::OnCurve(num(e)? as u32));
        }
        if let Some(k) = s.strip_prefix("L_") {
            return Ok(Stratum::Line(num(k)?));
        }
        if let Some(k) = s.strip_prefix("Q_") {
            return Ok(Stratum::Conic(num(k)?));
        }
        if let Some(k) = s.strip_prefix("C_") {
            return Ok(Stratum::Cubic(num(k)?));
        }
        Err(bad())
    }
}

impl Serialize for Stratum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointConfig {
    pub points: Vec<Point>,
    pub stratum: Stratum,
    pub seed: u64,
}

/// Scales so that the last nonzero coordinate is 1.
pub fn normalize(p: Point, f: Fp) -> Point {
    let k = if p[2] != 0 {
        p[2]
    } else if p[1] != 0 {
        p[1]
    } else {
        p[0]
    };
    let inv = f.inv(k);
    [f.mul(p[0], inv), f.mul(p[1], inv), f.mul(p[2], inv)]
}

fn random_point<R: Rng>(f: Fp, rng: &mut R) -> Point {
    loop {
        let p = [f.random(rng), f.random(rng), f.random(rng)];
        if p != [0, 0, 0] {
            return normalize(p, f);
        }
    }
}

pub fn det3(a: &Point, b: &Point, c: &Point, f: Fp) -> u64 {
    let m = |x: u64, y: u64| f.mul(x, y);
    let t1 = m(a[0], f.sub(m(b[1], c[2]), m(b[2], c[1])));
    let t2 = m(a[1], f.sub(m(b[0], c[2]), m(b[2], c[0])));
    let t3 = m(a[2], f.sub(m(b[0], c[1]), m(b[1], c[0])));
    f.add(f.sub(t1, t2), t3)
}

/// Evaluation of the degree-`t` monomials at the points, one row per point.
pub fn evaluation_matrix(points: &[Point], t: i64, f: Fp) -> Mat {
    let ms = monomials(t);
    let mut m = Mat::zeros(points.len(), ms.len());
    for (i, p) in points.iter().enumerate() {
        for (j, e) in ms.iter().enumerate() {
            let v = f.mul(f.mul(f.pow(p[0], e[0] as u64), f.pow(p[1], e[1] as u64)), f.pow(p[2], e[2] as u64));
            m.set(i, j, v);
        }
    }
    m
}

/// Triples of indices whose points are collinear.
pub fn collinear_triples(points: &[Point], f: Fp) -> Vec<[usize; 3]> {
    let n = points.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if det3(&points[i], &points[j], &points[k], f) == 0 {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

/// Hilbert function of the points is `min(n, dim S_t)` in every degree.
fn generic_hilbert_function(points: &[Point], f: Fp) -> bool {
    let n = points.len();
    let mut t = 0;
    loop {
        let d = monomial_count(t);
        if evaluation_matrix(points, t, f).rank(f) != d.min(n) {
            return false;
        }
        if d >= n {
            return true;
        }
        t += 1;
    }
}

fn distinct(points: &[Point]) -> bool {
    let mut v = points.to_vec();
    v.sort();
    v.dedup();
    v.len() == points.len()
}

fn on_line<R: Rng>(k: usize, f: Fp, rng: &mut R) -> Vec<Point> {
    let u = random_point(f, rng);
    let v = random_point(f, rng);
    (0..k)
        .map(|_| {
            let l = f.random(rng);
            normalize([f.add(u[0], f.mul(l, v[0])), f.add(u[1], f.mul(l, v[1])), f.add(u[2], f.mul(l, v[2]))], f)
        })
        .collect()
}

fn on_conic<R: Rng>(k: usize, f: Fp, rng: &mut R) -> Vec<Point> {
    // image of t -> (1, t, t^2) under a random linear change of coordinates
    let g: Vec<u64> = (0..9).map(|_| f.random(rng)).collect();
    (0..k)
        .map(|_| {
            let t = f.random(rng);
            let v = [1, t, f.mul(t, t)];
            let w: Vec<u64> = (0..3).map(|i| (0..3).fold(0, |acc, j| f.add(acc, f.mul(g[3 * i + j], v[j])))).collect();
            normalize([w[0], w[1], w[2]], f)
        })
        .collect()
}

/// Coefficients, lowest first, of `c(at(l))` as a polynomial in `l`.
fn restrict_to_line(c: &HPoly, at: &dyn Fn(u64) -> Point, f: Fp) -> Vec<u64> {
    let e = c.deg.max(0) as usize;
    let mut v = Mat::zeros(e + 1, e + 2);
    for l in 0..=e {
        let mut pw = 1;
        for j in 0..=e {
            v.set(l, j, pw);
            pw = f.mul(pw, l as u64);
        }
        v.set(l, e + 1, c.eval(&at(l as u64), f));
    }
    v.rref(f);
    (0..=e).map(|j| v.get(j, e + 1)).collect()
}

/// Rational points of the curve `c = 0`, found on random lines.
pub fn points_on_curve<R: Rng>(c: &HPoly, k: usize, avoid: &[Point], f: Fp, rng: &mut R) -> Result<Vec<Point>> {
    let mut out: Vec<Point> = Vec::new();
    for _ in 0..64 {
        if out.len() == k {
            break;
        }
        let u = random_point(f, rng);
        let v = random_point(f, rng);
        let at = |l: u64| [f.add(u[0], f.mul(l, v[0])), f.add(u[1], f.mul(l, v[1])), f.add(u[2], f.mul(l, v[2]))];
        let g = restrict_to_line(c, &at, f);
        let shift = f.random(rng);
        for i in 0..f.p {
            let l = (i + shift) % f.p;
            if g.iter().rev().fold(0, |acc, &a| f.add(f.mul(acc, l), a)) != 0 {
                continue;
            }
            let p = at(l);
            if p == [0, 0, 0] {
                continue;
            }
            let p = normalize(p, f);
            if !out.contains(&p) && !avoid.contains(&p) {
                out.push(p);
                // one point per line keeps the sample spread out
                break;
            }
        }
    }
    if out.len() < k {
        return Err(Error::RetryWithNewSeed(format!("found only {} of {k} points on the curve", out.len())));
    }
    Ok(out)
}

/// A curve of degree `e` through the points; unique when there are `dim S_e - 1` of them.
pub fn curve_through<R: Rng>(points: &[Point], e: i64, f: Fp, rng: &mut R) -> Result<HPoly> {
    let ker = evaluation_matrix(points, e, f).kernel(f);
    if ker.is_empty() {
        return Err(Error::Infeasible(format!("no curve of degree {e} through {} points", points.len())));
    }
    let mut coeffs = vec![0; monomial_count(e)];
    for v in &ker {
        let a = f.random_nonzero(rng);
        for (c, x) in coeffs.iter_mut().zip(v) {
            *c = f.add(*c, f.mul(a, *x));
        }
    }
    Ok(HPoly { deg: e, coeffs })
}

fn random_general<R: Rng>(k: usize, f: Fp, rng: &mut R) -> Vec<Point> {
    (0..k).map(|_| random_point(f, rng)).collect()
}

/// Only the collinear triples inside `block` (indices) are allowed.
fn collinear_only_within(points: &[Point], block: &[usize], f: Fp) -> bool {
    collinear_triples(points, f).iter().all(|t| t.iter().all(|i| block.contains(i)))
}

fn attempt<R: Rng>(stratum: Stratum, n: usize, f: Fp, rng: &mut R) -> Result<Option<Vec<Point>>> {
    let pts = match stratum {
        Stratum::General => {
            let p = random_general(n, f, rng);
            let ok = collinear_triples(&p, f).is_empty() && generic_hilbert_function(&p, f);
            ok.then_some(p)
        }
        Stratum::Line(k) => {
            let mut p = on_line(k, f, rng);
            p.extend(random_general(n - k, f, rng));
            let block: Vec<usize> = (0..k).collect();
            let ok = evaluation_matrix(&p[..k], 1, f).rank(f) == 2.min(k) && collinear_only_within(&p, &block, f);
            ok.then_some(p)
        }
        Stratum::Conic(k) => {
            let mut p = on_conic(k, f, rng);
            p.extend(random_general(n - k, f, rng));
            let ok = collinear_triples(&p, f).is_empty()
                && (n < 6 || k >= 6 || generic_hilbert_function(&p, f))
                && (k < 6 || evaluation_matrix(&p, 2, f).rank(f) == 5);
            ok.then_some(p)
        }
        Stratum::Cubic(k) => {
            let c = HPoly::random(3, f, rng);
            let mut p = points_on_curve(&c, k, &[], f, rng)?;
            p.extend(random_general(n - k, f, rng));
            collinear_triples(&p, f).is_empty().then_some(p)
        }
        Stratum::L33 => {
            let q = random_point(f, rng);
            let mut p = vec![q];
            for _ in 0..2 {
                let v = random_point(f, rng);
                for _ in 0..2 {
                    let l = f.random_nonzero(rng);
                    p.push(normalize([f.add(v[0], f.mul(l, q[0])), f.add(v[1], f.mul(l, q[1])), f.add(v[2], f.mul(l, q[2]))], f));
                }
            }
            let lines = collinear_triples(&p, f);
            (lines.len() == 2).then_some(p)
        }
        Stratum::OnCurve(e) => {
            let e = e as i64;
            let m = n.min(monomial_count(e) - 1);
            let mut p = random_general(m, f, rng);
            let c = curve_through(&p, e, f, rng)?;
            let extra = points_on_curve(&c, n - m, &p, f, rng)?;
            p.extend(extra);
            Some(p)
        }
    };
    Ok(pts.filter(|p| distinct(p)))
}

fn feasible(stratum: Stratum, n: usize) -> Result<()> {
    let bad = |why: &str| Err(Error::Infeasible(format!("{stratum} with n = {n}: {why}")));
    match stratum {
        Stratum::Line(k) | Stratum::Conic(k) | Stratum::Cubic(k) if k > n => bad("more special points than points"),
        Stratum::Line(k) if k < 3 => bad("need at least 3 collinear points"),
        Stratum::Conic(k) if k < 6 => bad("fewer than 6 points always lie on a conic"),
        Stratum::Cubic(k) if k < 10 => bad("fewer than 10 points always lie on a cubic"),
        Stratum::L33 if n != 5 => bad("defined for n = 5 only"),
        Stratum::OnCurve(0) => bad("degree must be positive"),
        _ if n == 0 => bad("no points"),
        _ => Ok(()),
    }
}

/// Deterministic in `seed`; retries internally on degenerate draws.
pub fn sample_points(stratum: Stratum, n: usize, seed: u64, f: Fp) -> Result<PointConfig> {
    feasible(stratum, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..32 {
        if let Some(points) = attempt(stratum, n, f, &mut rng)? {
            return Ok(PointConfig { points, stratum, seed });
        }
    }
    Err(Error::RetryWithNewSeed(format!("no valid {stratum} sample for n = {n}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strata_incidences() {
        let f = Fp::default();
        let c = sample_points(Stratum::Line(3), 5, 1, f).unwrap();
        assert_eq!(evaluation_matrix(&c.points[..3], 1, f).rank(f), 2);
        assert_eq!(collinear_triples(&c.points, f).len(), 1);

        let g = sample_points(Stratum::General, 6, 2, f).unwrap();
        assert!(collinear_triples(&g.points, f).is_empty());
        assert_eq!(evaluation_matrix(&g.points, 2, f).rank(f), 6);

        let q = sample_points(Stratum::OnCurve(2), 6, 3, f).unwrap();
        assert_eq!(evaluation_matrix(&q.points, 2, f).rank(f), 5);

        let l = sample_points(Stratum::L33, 5, 4, f).unwrap();
        assert_eq!(collinear_triples(&l.points, f).len(), 2);

        assert_eq!(sample_points(Stratum::L33, 5, 4, f).unwrap(), l);
        assert!(matches!(sample_points(Stratum::L33, 6, 0, f), Err(Error::Infeasible(_))));
    }

    #[test]
    fn stratum_names_round_trip() {
        for s in [Stratum::General, Stratum::Line(4), Stratum::Conic(6), Stratum::Cubic(10), Stratum::L33, Stratum::OnCurve(3)] {
            assert_eq!(s.to_string().parse::<Stratum>().unwrap(), s);
        }
    }
}
