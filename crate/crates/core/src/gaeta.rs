//! Gaeta resolutions, exceptional resolutions, Gaeta triangles and the
//! Betti-number decomposition along a triangle.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::chern::{serre_dual, ChernCharacter, LogChern};
use crate::error::{Error, Result};
use crate::exceptional::{controlling, ControlBranch, ControllingData, ExceptionalSlope};
use crate::rational::{as_i64, ceil_i64, fmt_rational, half, int, rat, Rational};

/// Multiplicities keyed by `(position, twist)`; position 1 is generators, 2 syzygies.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BettiTable {
    pub entries: BTreeMap<(u8, i64), u64>,
}

impl BettiTable {
    pub fn get(&self, pos: u8, twist: i64) -> u64 {
        self.entries.get(&(pos, twist)).copied().unwrap_or(0)
    }

    pub fn add(&mut self, pos: u8, twist: i64, m: u64) {
        if m > 0 {
            *self.entries.entry((pos, twist)).or_insert(0) += m;
        }
    }

    /// `beta_{i,j}` in the graded convention.
    pub fn beta(&self, i: u8, j: i64) -> u64 {
        match i {
            1 => self.get(1, -j),
            2 => self.get(2, -j - 1),
            _ => 0,
        }
    }

    /// Rows `j` with columns `beta_{1,j}` and `beta_{2,j}`.
    pub fn render(&self) -> String {
        let js: Vec<i64> = self
            .entries
            .keys()
            .map(|&(p, t)| if p == 1 { -t } else { -t - 1 })
            .collect();
        let (lo, hi) = match (js.iter().min(), js.iter().max()) {
            (Some(a), Some(b)) => (*a, *b),
            _ => return "(empty)\n".to_string(),
        };
        let mut out = format!("{:>5} | {:>4} {:>4}\n", "", 1, 2);
        out.push_str(&format!("{:->5}-+-{:->4}-{:->4}\n", "", "", ""));
        for j in lo..=hi {
            let cell = |v: u64| if v == 0 { "-".to_string() } else { v.to_string() };
            out.push_str(&format!("{:>5} | {:>4} {:>4}\n", j, cell(self.beta(1, j)), cell(self.beta(2, j))));
        }
        out
    }
}

impl Serialize for BettiTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(u8, i64, u64)> = self.entries.iter().map(|(&(p, t), &m)| (p, t, m)).collect();
        v.serialize(s)
    }
}

/// `0 -> sum O(a)^m -> sum O(b)^m -> U -> 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionShape {
    pub syzygies: Vec<(i64, u64)>,
    pub generators: Vec<(i64, u64)>,
    #[serde(skip)]
    pub character: ChernCharacter,
    /// Twist that appears on both sides in a divisorial shape.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shared_twist: Option<i64>,
}

fn normalize(v: &mut Vec<(i64, u64)>) {
    let mut m: BTreeMap<i64, u64> = BTreeMap::new();
    for &(t, k) in v.iter() {
        *m.entry(t).or_insert(0) += k;
    }
    *v = m.into_iter().rev().filter(|&(_, k)| k > 0).collect();
}

fn sum_lines(v: &[(i64, u64)]) -> ChernCharacter {
    v.iter().fold(ChernCharacter::zero(), |acc, &(t, k)| &acc + &ChernCharacter::line_bundle(t).scale_int(k as i64))
}

impl ResolutionShape {
    /// Builds a shape and sets `character` to generators minus syzygies.
    pub fn new(mut syzygies: Vec<(i64, u64)>, mut generators: Vec<(i64, u64)>) -> Self {
        normalize(&mut syzygies);
        normalize(&mut generators);
        let character = &sum_lines(&generators) - &sum_lines(&syzygies);
        ResolutionShape { syzygies, generators, character, shared_twist: None }
    }

    pub fn from_betti(b: &BettiTable) -> Self {
        let mut syz = Vec::new();
        let mut gens = Vec::new();
        for (&(p, t), &m) in &b.entries {
            if p == 1 {
                gens.push((t, m));
            } else {
                syz.push((t, m));
            }
        }
        ResolutionShape::new(syz, gens)
    }

    pub fn betti(&self) -> BettiTable {
        let mut b = BettiTable::default();
        for &(t, m) in &self.generators {
            b.add(1, t, m);
        }
        for &(t, m) in &self.syzygies {
            b.add(2, t, m);
        }
        b
    }

    pub fn twist(&self, d: i64) -> Self {
        let mv = |v: &[(i64, u64)]| v.iter().map(|&(t, m)| (t + d, m)).collect::<Vec<_>>();
        let mut s = ResolutionShape::new(mv(&self.syzygies), mv(&self.generators));
        s.shared_twist = self.shared_twist.map(|t| t + d);
        s
    }

    pub fn is_pure(&self) -> bool {
        self.syzygies.len() == 1 && self.generators.len() == 1
    }

    /// Generator and syzygy twists are disjoint, apart from a recorded shared twist.
    pub fn is_minimal(&self) -> bool {
        self.syzygies
            .iter()
            .all(|(t, _)| Some(*t) == self.shared_twist || self.generators.iter().all(|(g, _)| g != t))
    }

    pub fn max_twist(&self) -> Option<i64> {
        self.syzygies.iter().chain(&self.generators).map(|p| p.0).max()
    }
}

fn fmt_sum(v: &[(i64, u64)]) -> String {
    if v.is_empty() {
        return "0".to_string();
    }
    v.iter()
        .map(|&(t, m)| {
            let o = if t == 0 { "O".to_string() } else { format!("O({t})") };
            if m == 1 {
                o
            } else {
                format!("{o}^{m}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

impl fmt::Display for ResolutionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", fmt_sum(&self.syzygies), fmt_sum(&self.generators))
    }
}

fn count(x: &Rational, what: &str) -> Result<i64> {
    as_i64(x).ok_or_else(|| Error::NotGeneric(format!("{what} = {} is not an integer", fmt_rational(x))))
}

fn nonneg(x: i64, what: &str) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::NotGeneric(format!("{what} = {x} is negative")))
}

fn positive_rank(c: &ChernCharacter) -> Result<()> {
    if c.r.is_positive() {
        Ok(())
    } else {
        Err(Error::NonPositiveRank(fmt_rational(&c.r)))
    }
}

/// Smallest `d` with `chi(U(d)) > 0`, scanning up from the vertex `-mu - 3/2`.
pub fn minimal_twist_ch(c: &ChernCharacter) -> Result<i64> {
    positive_rank(c)?;
    let mu = &c.c1 / &c.r;
    let mut d = ceil_i64(&(-mu - rat(3, 2)));
    while !c.twist(d).euler().is_positive() {
        d += 1;
    }
    Ok(d)
}

pub fn minimal_twist(xi: &LogChern) -> Result<i64> {
    minimal_twist_ch(&xi.ch())
}

/// The three Gaeta exponents `(chi(O(-d),U), -chi(T(-d-1),U), -chi(O(-d+1),U))`.
fn gaeta_exponents(c: &ChernCharacter, d: i64) -> Result<(i64, i64, i64)> {
    let a = count(&ChernCharacter::line_bundle(-d).rel_euler(c), "chi(O(-d), U)")?;
    let b = count(&-ChernCharacter::tangent(-d - 1).rel_euler(c), "-chi(T(-d-1), U)")?;
    let e = count(&-ChernCharacter::line_bundle(-d + 1).rel_euler(c), "-chi(O(-d+1), U)")?;
    Ok((a, b, e))
}

fn shape_from_parts(d: i64, n: i64, l: i64, j: i64) -> Result<ResolutionShape> {
    let mut syz = vec![(-d - 2, nonneg(j, "syzygies at -d-2")?)];
    let mut gens = vec![(-d, nonneg(n, "generators at -d")?)];
    if l >= 0 {
        gens.push((-d - 1, l as u64));
    } else {
        syz.push((-d - 1, (-l) as u64));
    }
    Ok(ResolutionShape::new(syz, gens))
}

pub fn gaeta_resolution_ch(c: &ChernCharacter) -> Result<ResolutionShape> {
    let d = minimal_twist_ch(c)?;
    let (n, l, j) = gaeta_exponents(c, d)?;
    let shape = shape_from_parts(d, n, l, j)?;
    if shape.character != *c {
        return Err(Error::InternalInconsistency(format!("Gaeta shape {shape} does not sum to {c}")));
    }
    Ok(shape)
}

pub fn gaeta_resolution(xi: &LogChern) -> Result<ResolutionShape> {
    gaeta_resolution_ch(&xi.ch())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GaetaCase {
    Positive,
    Negative,
    Exceptional,
}

impl fmt::Display for GaetaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GaetaCase::Positive => "positive",
            GaetaCase::Negative => "negative",
            GaetaCase::Exceptional => "exceptional",
        };
        f.write_str(s)
    }
}

/// `E^m`, or a virtual character when `exceptional` is absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleTerm {
    pub character: ChernCharacter,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exceptional: Option<ExceptionalSlope>,
    pub exponent: i64,
}

impl TriangleTerm {
    fn power(e: &ExceptionalSlope, m: i64) -> Self {
        TriangleTerm { character: e.ch().scale_int(m), exceptional: Some(e.clone()), exponent: m }
    }

    fn virtual_char(c: ChernCharacter) -> Self {
        TriangleTerm { character: c, exceptional: None, exponent: 1 }
    }
}

/// `F -> U -> W[1]`, so `ch(U) = ch(F) - ch(W)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaetaTriangle {
    pub case: GaetaCase,
    pub f: TriangleTerm,
    pub w: TriangleTerm,
    pub controlling: ControllingData,
    /// `chi(E_{-gamma}, U)`.
    #[serde(with = "crate::rational::serde_str")]
    pub s: Rational,
    /// Twist used for the Betti bookkeeping.
    pub d: i64,
}

/// A resolution by exceptional bundles, `0 -> left -> right -> U -> 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExceptionalResolution {
    pub case: GaetaCase,
    pub left: Vec<(ExceptionalSlope, u64)>,
    pub right: Vec<(ExceptionalSlope, u64)>,
}

impl ExceptionalResolution {
    pub fn character(&self) -> ChernCharacter {
        let sum = |v: &[(ExceptionalSlope, u64)]| {
            v.iter().fold(ChernCharacter::zero(), |acc, (e, m)| &acc + &e.ch().scale_int(*m as i64))
        };
        &sum(&self.right) - &sum(&self.left)
    }
}

fn det3(m: &[[Rational; 3]; 3]) -> Rational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Coordinates of `target` in the basis `b` of `K_0`, by Cramer's rule.
pub fn solve3(b: [&ChernCharacter; 3], target: &ChernCharacter) -> Result<[Rational; 3]> {
    let col = |c: &ChernCharacter| [c.r.clone(), c.c1.clone(), c.ch2.clone()];
    let cols = [col(b[0]), col(b[1]), col(b[2])];
    let t = col(target);
    let build = |k: Option<usize>| {
        let mut m: [[Rational; 3]; 3] = Default::default();
        for (j, c) in cols.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = if Some(j) == k { t[i].clone() } else { c[i].clone() };
            }
        }
        m
    };
    let det = det3(&build(None));
    if det.is_zero() {
        return Err(Error::InternalInconsistency("exceptional collection is not a basis".into()));
    }
    Ok([det3(&build(Some(0))) / &det, det3(&build(Some(1))) / &det, det3(&build(Some(2))) / &det])
}

struct Collection {
    c: ControllingData,
    /// `E_{-gamma}`, `E_{-gamma-3}`, `E_{-alpha-3}`, `E_{-beta}`.
    eg: ExceptionalSlope,
    eg3: ExceptionalSlope,
    ea3: ExceptionalSlope,
    eb: ExceptionalSlope,
    s: Rational,
}

fn collection(xi: &LogChern) -> Result<Collection> {
    let c = controlling(xi, ControlBranch::Primary)?;
    let eg = c.exceptional.dual();
    let eg3 = eg.twist(-3);
    let ea3 = c.alpha.dual().twist(-3);
    let eb = c.beta.dual();
    let s = eg.ch().rel_euler(&xi.ch());
    Ok(Collection { c, eg, eg3, ea3, eb, s })
}

fn case_of(s: &Rational) -> GaetaCase {
    if s.is_positive() {
        GaetaCase::Positive
    } else if s.is_negative() {
        GaetaCase::Negative
    } else {
        GaetaCase::Exceptional
    }
}

pub fn exceptional_resolution(xi: &LogChern) -> Result<ExceptionalResolution> {
    let k = collection(xi)?;
    exceptional_resolution_from(xi, &k)
}

fn exceptional_resolution_from(xi: &LogChern, k: &Collection) -> Result<ExceptionalResolution> {
    let u = xi.ch();
    let case = case_of(&k.s);
    let exp = |x: &Rational, what: &str| -> Result<u64> { nonneg(count(x, what)?, what) };
    let res = match case {
        GaetaCase::Positive | GaetaCase::Exceptional => {
            let x = solve3([&k.ea3.ch(), &k.eb.ch(), &k.eg.ch()], &u)?;
            let left = vec![(k.ea3.clone(), exp(&-&x[0], "E_{-alpha-3} exponent")?)];
            let mut right = vec![(k.eb.clone(), exp(&x[1], "E_{-beta} exponent")?)];
            if case == GaetaCase::Positive {
                right.push((k.eg.clone(), exp(&x[2], "E_{-gamma} exponent")?));
            } else if !x[2].is_zero() {
                return Err(Error::InternalInconsistency("E_{-gamma} exponent nonzero in the exceptional case".into()));
            }
            ExceptionalResolution { case, left, right }
        }
        GaetaCase::Negative => {
            let x = solve3([&k.eg3.ch(), &k.ea3.ch(), &k.eb.ch()], &u)?;
            let left = vec![
                (k.eg3.clone(), exp(&-&x[0], "E_{-gamma-3} exponent")?),
                (k.ea3.clone(), exp(&-&x[1], "E_{-alpha-3} exponent")?),
            ];
            let right = vec![(k.eb.clone(), exp(&x[2], "E_{-beta} exponent")?)];
            ExceptionalResolution { case, left, right }
        }
    };
    let mut res = res;
    res.left.retain(|(_, m)| *m > 0);
    res.right.retain(|(_, m)| *m > 0);
    if res.character() != u {
        return Err(Error::InternalInconsistency("exceptional resolution does not sum to U".into()));
    }
    Ok(res)
}

pub fn gaeta_case(xi: &LogChern) -> Result<GaetaTriangle> {
    let k = collection(xi)?;
    let u = xi.ch();
    let case = case_of(&k.s);
    let (f, w) = match case {
        GaetaCase::Positive => {
            let m = count(&k.s, "chi(E_{-gamma}, U)")?;
            let f = TriangleTerm::power(&k.eg, m);
            let w = TriangleTerm::virtual_char(&f.character - &u);
            (f, w)
        }
        GaetaCase::Negative => {
            let m = count(&-&k.s, "-chi(E_{-gamma}, U)")?;
            let w = TriangleTerm::power(&k.eg3, m);
            let f = TriangleTerm::virtual_char(&u + &w.character);
            (f, w)
        }
        GaetaCase::Exceptional => {
            let r = exceptional_resolution_from(xi, &k)?;
            let find = |v: &[(ExceptionalSlope, u64)], e: &ExceptionalSlope| {
                v.iter().find(|(x, _)| x == e).map(|(_, m)| *m as i64).unwrap_or(0)
            };
            (TriangleTerm::power(&k.eb, find(&r.right, &k.eb)), TriangleTerm::power(&k.ea3, find(&r.left, &k.ea3)))
        }
    };
    if &f.character - &w.character != u {
        return Err(Error::InternalInconsistency("Gaeta triangle does not sum to U".into()));
    }
    // In the negative case mu_E is taken in (0, 1].
    let mut d = k.c.d;
    if case == GaetaCase::Negative && k.c.mu_e().is_zero() {
        d += 1;
    }
    Ok(GaetaTriangle { case, f, w, controlling: k.c, s: k.s, d })
}

/// The six Betti parts: `n` at `-d`, `l` at `-d-1` (positive on the
/// generator side), `j` at `-d-2`; index 1 is the `W` side, 2 the `F` side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BettiParts {
    pub n1: i64,
    pub n2: i64,
    pub l1: i64,
    pub l2: i64,
    pub j1: i64,
    pub j2: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaMapModel {
    pub triangle: GaetaTriangle,
    pub parts: BettiParts,
    pub total_shape: ResolutionShape,
    /// Left-hand Betti numbers of `F`.
    pub block_b: ResolutionShape,
    /// Right-hand Betti numbers of `W`.
    pub block_a_shape: ResolutionShape,
}

pub fn decompose_betti(xi: &LogChern) -> Result<ZetaMapModel> {
    let triangle = gaeta_case(xi)?;
    let d = triangle.d;
    let s_ch = &triangle.f.character;
    let q_dual = triangle.w.character.dual();
    let o = ChernCharacter::line_bundle;
    let t = ChernCharacter::tangent;
    let c = |x: Rational, what: &str| count(&x, what);
    let parts = BettiParts {
        n1: c(-o(d + 3).rel_euler(&q_dual), "n1")?,
        n2: c(o(-d).rel_euler(s_ch), "n2")?,
        l1: c(t(d + 1).rel_euler(&q_dual), "l1")?,
        l2: c(-t(-d - 1).rel_euler(s_ch), "l2")?,
        j1: c(o(d + 2).rel_euler(&q_dual), "j1")?,
        j2: c(-o(-d + 1).rel_euler(s_ch), "j2")?,
    };
    let u = xi.ch();
    let (a, b, e) = gaeta_exponents(&u, d)?;
    let p = parts;
    if (p.n1 + p.n2, p.l1 + p.l2, p.j1 + p.j2) != (a, b, e) {
        return Err(Error::InternalInconsistency(format!("Betti sums {p:?} do not add up to ({a}, {b}, {e})")));
    }
    if p.n1 < 0 || p.n2 < 0 || p.j1 < 0 || p.j2 < 0 || p.l1.signum() * p.l2.signum() < 0 {
        return Err(Error::InternalInconsistency(format!("Betti parts {p:?} have the wrong signs")));
    }
    let total_shape = gaeta_resolution_ch(&u)?;
    let block_b = shape_from_parts(d, p.n2, p.l2, p.j2)?;
    let block_a_shape = shape_from_parts(d, p.n1, p.l1, p.j1)?;
    let mut sum = block_b.betti();
    for (&(pos, tw), &m) in &block_a_shape.betti().entries {
        sum.add(pos, tw, m);
    }
    if sum != total_shape.betti() {
        return Err(Error::InternalInconsistency("block Betti tables do not add up to the Gaeta table".into()));
    }
    Ok(ZetaMapModel { triangle, parts, total_shape, block_b, block_a_shape })
}

/// The divisorial Gaeta shape attached to a pure Gaeta resolution.
pub fn divisorial_gaeta(xi: &LogChern) -> Result<ResolutionShape> {
    let g = gaeta_resolution(xi)?;
    if !g.is_pure() {
        return Err(Error::NotPure);
    }
    let (a, s) = g.syzygies[0];
    let (b, t) = g.generators[0];
    if t <= s {
        return Err(Error::OutOfRange(format!("need t > s, got s = {s}, t = {t}")));
    }
    let shape = match b - a {
        1 => {
            if s < 3 {
                return Err(Error::OutOfRange(format!("need s >= 3, got {s}")));
            }
            // O(-1)^s -> O^t  becomes  O(-2) + O(-1)^{s-3} -> O^{t-3} + O(1)
            ResolutionShape::new(vec![(-2, 1), (-1, s - 3)], vec![(0, t - 3), (1, 1)])
        }
        2 => {
            // O(-2)^s -> O^t  becomes  O(-2)^s + O(-1) -> O(-1) + O^t
            let mut sh = ResolutionShape::new(vec![(-2, s), (-1, 1)], vec![(-1, 1), (0, t)]);
            sh.shared_twist = Some(-1);
            sh
        }
        k => return Err(Error::OutOfRange(format!("twist gap {k} is neither 1 nor 2"))),
    };
    let out = shape.twist(b);
    if out.character != g.character {
        return Err(Error::InternalInconsistency("divisorial shape changes the character".into()));
    }
    Ok(out)
}

/// Gaeta resolution of the Serre dual `U^*(-3)`.
pub fn secondary_edge_resolution(xi: &LogChern) -> Result<ResolutionShape> {
    if xi.r < int(3) {
        return Err(Error::UnsupportedRank(format!("secondary edge needs rank at least 3, got {}", fmt_rational(&xi.r))));
    }
    gaeta_resolution(&serre_dual(xi))
}

/// Integral rank with `Delta = (1 - 1/r^2) / 2`.
pub fn is_exceptional_character(c: &ChernCharacter) -> bool {
    if !c.r.is_positive() || !c.r.is_integer() {
        return false;
    }
    let l = match crate::chern::to_log(c) {
        Ok(l) => l,
        Err(_) => return false,
    };
    l.delta == (Rational::from_integer(1.into()) - Rational::from_integer(1.into()) / (&l.r * &l.r)) * half()
}
