//! Dense homogeneous polynomials in `x, y, z` over `F_p`.
//!
//! Monomials of degree `d` are indexed by `k(k+1)/2 + c` for `x^a y^b z^c`
//! with `k = d - a = b + c`, so the index does not depend on `d`.

use std::fmt;

use rand::Rng;

use super::field::Fp;
use crate::error::{Error, Result};

pub fn monomial_count(d: i64) -> usize {
    if d < 0 {
        0
    } else {
        let d = d as usize;
        (d + 1) * (d + 2) / 2
    }
}

#[inline]
pub fn monomial_index(b: u32, c: u32) -> usize {
    let k = (b + c) as usize;
    k * (k + 1) / 2 + c as usize
}

/// Exponent triples of degree `d` in index order.
pub fn monomials(d: i64) -> Vec<[u32; 3]> {
    let mut v = Vec::with_capacity(monomial_count(d));
    if d < 0 {
        return v;
    }
    let d = d as u32;
    for k in 0..=d {
        for c in 0..=k {
            v.push([d - k, k - c, c]);
        }
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HPoly {
    pub deg: i64,
    pub coeffs: Vec<u64>,
}

impl HPoly {
    pub fn zero(deg: i64) -> Self {
        HPoly { deg, coeffs: vec![0; monomial_count(deg)] }
    }

    pub fn constant(c: u64) -> Self {
        HPoly { deg: 0, coeffs: vec![c] }
    }

    pub fn monomial(e: [u32; 3], c: u64) -> Self {
        let mut p = HPoly::zero((e[0] + e[1] + e[2]) as i64);
        p.coeffs[monomial_index(e[1], e[2])] = c;
        p
    }

    /// The variable `x`, `y` or `z` for `i = 0, 1, 2`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        HPoly::monomial(e, 1)
    }

    /// Linear form `a x + b y + c z`.
    pub fn linear(v: [u64; 3]) -> Self {
        HPoly { deg: 1, coeffs: v.to_vec() }
    }

    pub fn random<R: Rng>(deg: i64, f: Fp, rng: &mut R) -> Self {
        HPoly { deg, coeffs: (0..monomial_count(deg)).map(|_| f.random(rng)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Nonzero terms as `(exponents, coefficient)` in index order.
    pub fn terms(&self) -> Vec<([u32; 3], u64)> {
        monomials(self.deg).into_iter().zip(self.coeffs.iter().copied()).filter(|&(_, c)| c != 0).collect()
    }

    pub fn add(&self, o: &Self, f: Fp) -> Self {
        assert_eq!(self.deg, o.deg, "adding polynomials of different degrees");
        HPoly { deg: self.deg, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| f.add(a, b)).collect() }
    }

    pub fn sub(&self, o: &Self, f: Fp) -> Self {
        assert_eq!(self.deg, o.deg, "subtracting polynomials of different degrees");
        HPoly { deg: self.deg, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| f.sub(a, b)).collect() }
    }

    pub fn scale(&self, k: u64, f: Fp) -> Self {
        HPoly { deg: self.deg, coeffs: self.coeffs.iter().map(|&a| f.mul(a, k)).collect() }
    }

    pub fn neg(&self, f: Fp) -> Self {
        HPoly { deg: self.deg, coeffs: self.coeffs.iter().map(|&a| f.neg(a)).collect() }
    }

    pub fn mul(&self, o: &Self, f: Fp) -> Self {
        let mut out = HPoly::zero(self.deg + o.deg);
        if self.deg < 0 || o.deg < 0 {
            return out;
        }
        let ta = self.terms();
        let tb = o.terms();
        for (ea, ca) in &ta {
            for (eb, cb) in &tb {
                let i = monomial_index(ea[1] + eb[1], ea[2] + eb[2]);
                out.coeffs[i] = (out.coeffs[i] + ca * cb) % f.p;
            }
        }
        out
    }

    pub fn eval(&self, pt: &[u64; 3], f: Fp) -> u64 {
        if self.deg < 0 {
            return 0;
        }
        let d = self.deg as usize;
        let pw = |v: u64| {
            let mut p = vec![1u64; d + 1];
            for i in 1..=d {
                p[i] = f.mul(p[i - 1], v);
            }
            p
        };
        let (px, py, pz) = (pw(pt[0]), pw(pt[1]), pw(pt[2]));
        let mut acc = 0;
        for (e, c) in monomials(self.deg).iter().zip(&self.coeffs) {
            if *c != 0 {
                let m = f.mul(f.mul(px[e[0] as usize], py[e[1] as usize]), pz[e[2] as usize]);
                acc = f.add(acc, f.mul(*c, m));
            }
        }
        acc
    }

    /// Drops the constant term, which is the only term when the degree is zero.
    pub fn without_constant(&self) -> Self {
        if self.deg == 0 {
            HPoly::zero(0)
        } else {
            self.clone()
        }
    }

    /// Parses `c*x^a*y^b*z^c + ...` as a form of degree `deg`; coefficients are reduced mod p.
    pub fn parse(s: &str, deg: i64, f: Fp) -> Result<Self> {
        let mut out = HPoly::zero(deg);
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() || s == "0" {
            return Ok(out);
        }
        if deg < 0 {
            return Err(Error::Parse(format!("nonzero entry '{s}' in negative degree {deg}")));
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') && !cur.ends_with('*') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, t.strip_prefix('+').unwrap_or(&t)),
            };
            let mut coef: i64 = 1;
            let mut e = [0u32; 3];
            for fac in body.split('*') {
                let (base, pow) = match fac.split_once('^') {
                    Some((b, p)) => (b, p.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in '{fac}'")))?),
                    None => (fac, 1),
                };
                match base {
                    "x" => e[0] += pow,
                    "y" => e[1] += pow,
                    "z" => e[2] += pow,
                    _ => {
                        let c: i64 = base.parse().map_err(|_| Error::Parse(format!("bad factor '{fac}'")))?;
                        coef = coef
                            .checked_mul(c.checked_pow(pow).ok_or_else(|| Error::Parse(format!("overflow in '{fac}'")))?)
                            .ok_or_else(|| Error::Parse(format!("overflow in '{t}'")))?;
                    }
                }
            }
            if (e[0] + e[1] + e[2]) as i64 != deg {
                return Err(Error::Parse(format!("term '{t}' is not of degree {deg}")));
            }
            let c = f.from_i64(if neg { -coef } else { coef });
            let i = monomial_index(e[1], e[2]);
            out.coeffs[i] = f.add(out.coeffs[i], c);
        }
        Ok(out)
    }
}

impl fmt::Display for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = terms
            .iter()
            .map(|(e, c)| {
                let mut s = c.to_string();
                for (v, &k) in ["x", "y", "z"].iter().zip(e) {
                    match k {
                        0 => {}
                        1 => s.push_str(&format!("*{v}")),
                        _ => s.push_str(&format!("*{v}^{k}")),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn indexing_matches_enumeration() {
        for d in 0..7 {
            let ms = monomials(d);
            assert_eq!(ms.len(), monomial_count(d));
            for (i, e) in ms.iter().enumerate() {
                assert_eq!(monomial_index(e[1], e[2]), i);
            }
        }
    }

    #[test]
    fn product_evaluates_multiplicatively() {
        let f = Fp::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = HPoly::random(2, f, &mut rng);
            let b = HPoly::random(3, f, &mut rng);
            let pt = [f.random(&mut rng), f.random(&mut rng), f.random(&mut rng)];
            assert_eq!(a.mul(&b, f).eval(&pt, f), f.mul(a.eval(&pt, f), b.eval(&pt, f)));
        }
    }

    #[test]
    fn text_round_trip() {
        let f = Fp::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = HPoly::random(3, f, &mut rng);
        let s = a.to_string();
        assert_eq!(HPoly::parse(&s, 3, f).unwrap(), a);
        let b = HPoly::parse("x*y - 2*z^2 + y^2", 2, f).unwrap();
        assert_eq!(b.to_string(), "1*x*y + 1*y^2 + 32001*z^2");
        assert!(HPoly::parse("x*y + z", 2, f).is_err());
    }
}
