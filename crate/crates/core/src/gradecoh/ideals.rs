//! Betti tables of ideals from Hilbert functions, and Hilbert–Burch minors.

use std::collections::HashMap;

use super::field::Fp;
use super::linalg::Mat;
use super::matrix::GradedMatrix;
use super::points::{evaluation_matrix, PointConfig};
use super::poly::{monomial_count, monomial_index, monomials, HPoly};
use crate::error::{Error, Result};
use crate::gaeta::BettiTable;

/// Multiplies coordinate vectors of degree `t - 1` by `x`, `y`, `z`.
fn times_variables(basis: &[Vec<u64>], t: i64) -> Vec<Vec<u64>> {
    let ms = monomials(t - 1);
    let n = monomial_count(t);
    let mut out = Vec::with_capacity(3 * basis.len());
    for v in basis {
        for var in 0..3 {
            let mut w = vec![0; n];
            for (e, &c) in ms.iter().zip(v) {
                if c != 0 {
                    let (b, cc) = match var {
                        0 => (e[1], e[2]),
                        1 => (e[1] + 1, e[2]),
                        _ => (e[1], e[2] + 1),
                    };
                    w[monomial_index(b, cc)] = c;
                }
            }
            out.push(w);
        }
    }
    out
}

fn rank_of(vectors: &[Vec<u64>], n: usize, f: Fp) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Mat::from_rows(vectors, n).rank(f)
}

/// Assembles the table from `dim I_t`, `dim S_1 I_{t-1}` and the Hilbert function,
/// which must be constant from `h.len() - 3` on.
fn assemble(dim_i: &[u64], dim_s1i: &[u64]) -> Result<BettiTable> {
    let tmax = dim_i.len();
    let h: Vec<i64> = (0..tmax).map(|t| monomial_count(t as i64) as i64 - dim_i[t] as i64).collect();
    let hh = |t: i64| if t < 0 { 0 } else { h[(t as usize).min(tmax - 1)] };
    let mut b = BettiTable::default();
    for j in 1..tmax as i64 + 3 {
        let gens = if (j as usize) < tmax { dim_i[j as usize] - dim_s1i[j as usize] } else { 0 };
        // (1 - T)^3 times the Hilbert series of S/I
        let num = hh(j) - 3 * hh(j - 1) + 3 * hh(j - 2) - hh(j - 3);
        let syz = num + gens as i64;
        if syz < 0 {
            return Err(Error::InternalInconsistency(format!("negative syzygy count in degree {j}")));
        }
        b.add(1, -j, gens);
        b.add(2, -j, syz as u64);
    }
    Ok(b)
}

/// Betti table of the ideal of a reduced point set, from evaluation matrices.
pub fn ideal_betti(cfg: &PointConfig, f: Fp) -> Result<BettiTable> {
    let n = cfg.points.len();
    let tmax = n as i64 + 3;
    let mut dim_i = Vec::new();
    let mut dim_s1i = Vec::new();
    let mut prev: Vec<Vec<u64>> = Vec::new();
    for t in 0..tmax {
        let ker = evaluation_matrix(&cfg.points, t, f).kernel(f);
        let s1 = if t == 0 { 0 } else { rank_of(&times_variables(&prev, t), monomial_count(t), f) };
        dim_i.push(ker.len() as u64);
        dim_s1i.push(s1 as u64);
        prev = ker;
    }
    assemble(&dim_i, &dim_s1i)
}

/// Coordinate vectors of `g * m` for all monomials `m` of degree `t - deg g`.
fn multiples(g: &HPoly, t: i64) -> Vec<Vec<u64>> {
    let n = monomial_count(t);
    let terms = g.terms();
    monomials(t - g.deg)
        .iter()
        .map(|m| {
            let mut w = vec![0; n];
            for (e, c) in &terms {
                w[monomial_index(e[1] + m[1], e[2] + m[2])] = *c;
            }
            w
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealData {
    pub betti: BettiTable,
    /// Eventual value of the Hilbert function of `S/I`.
    pub length: u64,
    pub hilbert: Vec<u64>,
}

/// Betti table of the ideal generated by `gens`, assuming it is saturated of
/// codimension 2; the Hilbert function must be constant on the last three
/// degrees up to `tmax`, otherwise the zero locus is not finite.
pub fn betti_of_generators(gens: &[HPoly], tmax: i64, f: Fp) -> Result<IdealData> {
    let mut dim_i = Vec::new();
    let mut dim_s1i = Vec::new();
    for t in 0..=tmax {
        let n = monomial_count(t);
        let lower: Vec<Vec<u64>> = gens.iter().filter(|g| g.deg < t && !g.is_zero()).flat_map(|g| multiples(g, t)).collect();
        let mut all = lower.clone();
        all.extend(gens.iter().filter(|g| g.deg == t && !g.is_zero()).flat_map(|g| multiples(g, t)));
        dim_i.push(rank_of(&all, n, f) as u64);
        dim_s1i.push(rank_of(&lower, n, f) as u64);
    }
    let hilbert: Vec<u64> = (0..=tmax).map(|t| monomial_count(t) as u64 - dim_i[t as usize]).collect();
    let k = hilbert.len();
    if k < 3 || hilbert[k - 1] != hilbert[k - 2] || hilbert[k - 2] != hilbert[k - 3] {
        return Err(Error::NotGenericMatrix("Hilbert function does not stabilize; zero locus is not finite".into()));
    }
    Ok(IdealData { betti: assemble(&dim_i, &dim_s1i)?, length: hilbert[k - 1], hilbert })
}

/// Signed maximal minors of an `(m+1) x m` matrix: entry `i` is `(-1)^i` times
/// the determinant with row `i` deleted.
pub fn maximal_minors(m: &GradedMatrix, f: Fp) -> Result<Vec<HPoly>> {
    let (r, c) = (m.nrows(), m.ncols());
    if r != c + 1 {
        return Err(Error::NotGenericMatrix(format!("expected one more row than columns, got {r} x {c}")));
    }
    if r > 20 {
        return Err(Error::OutOfRange(format!("{r} rows")));
    }
    let total: i64 = m.row_twists.iter().sum::<i64>() - m.col_twists.iter().sum::<i64>();
    let deg_of = |mask: u32| -> i64 {
        (0..r).filter(|i| mask >> i & 1 == 1).map(|i| m.row_twists[i]).sum::<i64>()
            - m.col_twists[..mask.count_ones() as usize].iter().sum::<i64>()
    };
    // det of rows in `mask` against the first |mask| columns, by expansion along the last column
    let mut layer: HashMap<u32, HPoly> = HashMap::from([(0, HPoly::constant(1))]);
    for j in 0..c {
        let mut next: HashMap<u32, HPoly> = HashMap::new();
        for (&mask, d) in &layer {
            for i in (0..r).filter(|i| mask >> i & 1 == 0) {
                let e = &m.entries[i][j];
                if e.deg < 0 || e.is_zero() || d.is_zero() {
                    continue;
                }
                let nm = mask | 1 << i;
                let pos = (nm & ((1 << i) - 1)).count_ones() as usize;
                let mut term = e.mul(d, f);
                if (pos + j) % 2 == 1 {
                    term = term.neg(f);
                }
                let slot = next.entry(nm).or_insert_with(|| HPoly::zero(deg_of(nm)));
                *slot = slot.add(&term, f);
            }
        }
        layer = next;
    }
    let full: u32 = (1 << r) - 1;
    Ok((0..r)
        .map(|i| {
            let mask = full & !(1 << i);
            let d = layer.remove(&mask).unwrap_or_else(|| HPoly::zero(total - m.row_twists[i]));
            if i % 2 == 1 {
                d.neg(f)
            } else {
                d
            }
        })
        .collect())
}

/// Generators of the ideal presented by `m`, checked to define a finite scheme.
pub fn hilbert_burch(m: &GradedMatrix, f: Fp) -> Result<Vec<HPoly>> {
    let minors = maximal_minors(m, f)?;
    if minors.iter().filter(|g| !g.is_zero()).count() < 2 {
        return Err(Error::NotGenericMatrix("maximal minors do not cut out a finite scheme".into()));
    }
    hilbert_burch_ideal(m, &minors, f)?;
    Ok(minors)
}

/// Betti data of the ideal of minors, searched up to a degree fixed by the matrix.
pub fn hilbert_burch_ideal(m: &GradedMatrix, minors: &[HPoly], f: Fp) -> Result<IdealData> {
    let total: i64 = m.row_twists.iter().sum::<i64>() - m.col_twists.iter().sum::<i64>();
    // syzygy degrees of the ideal of minors
    let top = m.col_twists.iter().map(|b| total - b).max().unwrap_or(0);
    betti_of_generators(minors, top + 1, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaeta::ResolutionShape;
    use crate::gradecoh::points::{sample_points, Stratum};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_ideal_from_two_by_one() {
        let f = Fp::default();
        let mut m = GradedMatrix::zeros(vec![-1, -1], vec![-2]);
        m.set(0, 0, HPoly::var(0));
        m.set(1, 0, HPoly::var(1));
        let g = hilbert_burch(&m, f).unwrap();
        assert_eq!(g, vec![HPoly::var(1), HPoly::var(0).neg(f)]);
    }

    #[test]
    fn collinear_and_general_diagrams() {
        let f = Fp::default();
        let c = sample_points(Stratum::Line(4), 4, 7, f).unwrap();
        let b = ideal_betti(&c, f).unwrap();
        assert_eq!(ResolutionShape::from_betti(&b).to_string(), "O(-5) -> O(-1) + O(-4)");
        let g = sample_points(Stratum::General, 6, 7, f).unwrap();
        assert_eq!(ResolutionShape::from_betti(&ideal_betti(&g, f).unwrap()).to_string(), "O(-4)^3 -> O(-3)^4");
    }

    #[test]
    fn qk_minors_have_predicted_degrees() {
        let f = Fp::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = GradedMatrix::random_minimal(vec![-9, -8, -8, -8, -8, -8], vec![-10, -10, -10, -10, -9], f, &mut rng);
        let g = hilbert_burch(&m, f).unwrap();
        let degs: Vec<i64> = g.iter().map(|p| p.deg).collect();
        assert_eq!(degs, vec![9, 8, 8, 8, 8, 8]);
        let data = hilbert_burch_ideal(&m, &g, f).unwrap();
        assert_eq!(data.length, 40);
        assert_eq!(ResolutionShape::from_betti(&data.betti), m.shape());
    }

    #[test]
    fn twelve_points_from_three_quartics() {
        let f = Fp::default();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = GradedMatrix::random(vec![-4; 3], vec![-6; 2], f, &mut rng);
        let g = hilbert_burch(&m, f).unwrap();
        assert!(g.iter().all(|p| p.deg == 4));
        assert_eq!(hilbert_burch_ideal(&m, &g, f).unwrap().length, 12);
    }
}
