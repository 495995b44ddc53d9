//! Cohomology of sheaves presented by complexes of sums of line bundles.
//!
//! Everything reduces to ranks of the maps induced on `H^0` and `H^2`,
//! since `H^1` of a line bundle on the plane vanishes.

use serde::Serialize;

use super::field::Fp;
use super::linalg::Mat;
use super::matrix::GradedMatrix;
use super::poly::{monomial_count, monomial_index, monomials};
use crate::chern::ChernCharacter;
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, Rational};

/// `(h0, h1, h2)` of `O(a)`.
pub fn line_cohomology(a: i64) -> (u64, u64, u64) {
    let h0 = monomial_count(a) as u64;
    let h2 = monomial_count(-a - 3) as u64;
    (h0, 0, h2)
}

fn h0_sum(tw: &[i64], t: i64) -> u64 {
    tw.iter().map(|&a| line_cohomology(a + t).0).sum()
}

fn h2_sum(tw: &[i64], t: i64) -> u64 {
    tw.iter().map(|&a| line_cohomology(a + t).2).sum()
}

fn chi_sum(tw: &[i64], t: i64) -> Rational {
    tw.iter().fold(Rational::from_integer(0.into()), |acc, &a| acc + ChernCharacter::line_bundle(a + t).euler())
}

/// The map `H^0(sum O(b_j + t)) -> H^0(sum O(a_i + t))` on monomial coordinates.
pub fn induced_h0(m: &GradedMatrix, t: i64, f: Fp) -> Mat {
    let row_off: Vec<usize> = offsets(&m.row_twists, t);
    let col_off: Vec<usize> = offsets(&m.col_twists, t);
    let mut out = Mat::zeros(*row_off.last().unwrap(), *col_off.last().unwrap());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let e = &m.entries[i][j];
            let src = m.col_twists[j] + t;
            if src < 0 || e.deg < 0 || e.is_zero() {
                continue;
            }
            let terms = e.terms();
            for (u, mono) in monomials(src).iter().enumerate() {
                let col = col_off[j] + u;
                for (ex, c) in &terms {
                    let row = row_off[i] + monomial_index(ex[1] + mono[1], ex[2] + mono[2]);
                    let v = f.add(out.get(row, col), *c);
                    out.set(row, col, v);
                }
            }
        }
    }
    out
}

fn offsets(tw: &[i64], t: i64) -> Vec<usize> {
    let mut v = vec![0];
    for &a in tw {
        v.push(v.last().unwrap() + monomial_count(a + t));
    }
    v
}

/// The map `H^2(sum O(b_j + t)) -> H^2(sum O(a_i + t))`, as the transpose of the
/// `H^0` map of the dual matrix at twist `-t - 3`.
pub fn induced_h2(m: &GradedMatrix, t: i64, f: Fp) -> Mat {
    induced_h0(&m.dual(), -t - 3, f).transpose()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub h0: u64,
    pub h1: u64,
    pub h2: u64,
    #[serde(serialize_with = "crate::rational::serde_str::serialize")]
    pub chi_expected: Rational,
}

impl CohomologyReport {
    fn checked(h0: u64, h1: u64, h2: u64, chi_expected: Rational) -> Result<Self> {
        let r = CohomologyReport { h0, h1, h2, chi_expected };
        if !r.audit() {
            return Err(Error::InternalInconsistency(format!(
                "h0 - h1 + h2 = {} but chi = {}",
                h0 as i64 - h1 as i64 + h2 as i64,
                fmt_rational(&r.chi_expected)
            )));
        }
        Ok(r)
    }

    pub fn chi(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64
    }

    pub fn audit(&self) -> bool {
        Rational::from_integer(self.chi().into()) == self.chi_expected
    }

    pub fn vanishes(&self) -> bool {
        self.h0 == 0 && self.h1 == 0 && self.h2 == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PresentationKind {
    Cokernel,
    Kernel,
}

fn subtract(a: u64, b: u64, what: &str) -> Result<u64> {
    a.checked_sub(b).ok_or_else(|| Error::InternalInconsistency(format!("negative dimension in {what}")))
}

/// Fixed sample points for the generic-rank test.
const PROBES: [[u64; 3]; 3] = [[1, 7, 2029], [3, 1, 977], [12345, 678, 1]];

/// Cohomology of the cokernel or kernel of `m`, twisted by `t`.
pub fn cohomology_of_presentation(kind: PresentationKind, m: &GradedMatrix, t: i64, f: Fp) -> Result<CohomologyReport> {
    let h0f = h0_sum(&m.col_twists, t);
    let h0g = h0_sum(&m.row_twists, t);
    let h2f = h2_sum(&m.col_twists, t);
    let h2g = h2_sum(&m.row_twists, t);
    let r0 = induced_h0(m, t, f).rank(f) as u64;
    let r2 = induced_h2(m, t, f).rank(f) as u64;
    match kind {
        PresentationKind::Cokernel => {
            if !PROBES.iter().any(|p| m.fiber(p, f).rank(f) == m.ncols()) || r0 != h0f {
                return Err(Error::NotGenericMatrix("map is not injective".into()));
            }
            let chi = chi_sum(&m.row_twists, t) - chi_sum(&m.col_twists, t);
            CohomologyReport::checked(h0g - r0, h2f - r2, h2g - r2, chi)
        }
        PresentationKind::Kernel => {
            if r2 != h2g || !is_surjective(m, f) {
                return Err(Error::NotGenericMatrix("map is not surjective".into()));
            }
            let chi = chi_sum(&m.col_twists, t) - chi_sum(&m.row_twists, t);
            CohomologyReport::checked(h0f - r0, h0g - r0, h2f - h2g, chi)
        }
    }
}

/// Surjectivity as a map of sheaves: the map on sections is onto at some twist
/// where the target is globally generated.
pub fn is_surjective(m: &GradedMatrix, f: Fp) -> bool {
    if m.nrows() == 0 {
        return true;
    }
    if m.ncols() < m.nrows() {
        return false;
    }
    let lo = -m.row_twists.iter().min().unwrap();
    let spread = m.row_twists.iter().max().unwrap() - m.col_twists.iter().min().unwrap();
    (lo..=lo + 2 * spread.max(1) + 4).any(|t| {
        let h0g = h0_sum(&m.row_twists, t) as usize;
        h0_sum(&m.col_twists, t) as usize >= h0g && induced_h0(m, t, f).rank(f) == h0g
    })
}

fn check_complex(d_in: &GradedMatrix, d_out: &GradedMatrix, f: Fp) -> Result<()> {
    if d_out.col_twists != d_in.row_twists {
        return Err(Error::NotGenericMatrix("twists of consecutive maps do not match".into()));
    }
    if !d_out.compose(d_in, f)?.is_zero() {
        return Err(Error::NotAComplex);
    }
    Ok(())
}

/// Cohomology of the homology at `T0` of `0 -> T2 -> T1 -> T0`, exact elsewhere, twisted by `t`.
pub fn cohomology_of_length2(t2_to_t1: &GradedMatrix, t1_to_t0: &GradedMatrix, t: i64, f: Fp) -> Result<CohomologyReport> {
    check_complex(t2_to_t1, t1_to_t0, f)?;
    let (t2, t1, t0) = (&t2_to_t1.col_twists, &t2_to_t1.row_twists, &t1_to_t0.row_twists);
    let r0_2 = induced_h0(t2_to_t1, t, f).rank(f) as u64;
    if r0_2 != h0_sum(t2, t) {
        return Err(Error::NotGenericMatrix("first map is not injective on sections".into()));
    }
    let r2_2 = induced_h2(t2_to_t1, t, f).rank(f) as u64;
    let r2_1 = induced_h2(t1_to_t0, t, f).rank(f) as u64;
    // Q = image of T1 in T0
    let h0q = h0_sum(t1, t) - r0_2;
    let h1q = h2_sum(t2, t) - r2_2;
    let h2q = h2_sum(t1, t) - r2_2;
    let h0 = subtract(h0_sum(t0, t) + h1q, h0q, "h0")?;
    let h1 = subtract(h2q, r2_1, "h1")?;
    let h2 = h2_sum(t0, t) - r2_1;
    let chi = chi_sum(t0, t) - chi_sum(t1, t) + chi_sum(t2, t);
    CohomologyReport::checked(h0, h1, h2, chi)
}

/// Cohomology of the homology at `C0` of `0 -> C1 -> C0 -> C-1 -> 0`, exact elsewhere.
pub fn cohomology_of_middle(c1_to_c0: &GradedMatrix, c0_to_cm1: &GradedMatrix, t: i64, f: Fp) -> Result<CohomologyReport> {
    check_complex(c1_to_c0, c0_to_cm1, f)?;
    let (c1, c0, cm1) = (&c1_to_c0.col_twists, &c1_to_c0.row_twists, &c0_to_cm1.row_twists);
    if induced_h0(c1_to_c0, t, f).rank(f) as u64 != h0_sum(c1, t) {
        return Err(Error::NotGenericMatrix("first map is not injective on sections".into()));
    }
    if induced_h2(c0_to_cm1, t, f).rank(f) as u64 != h2_sum(cm1, t) {
        return Err(Error::NotGenericMatrix("last map is not surjective on H^2".into()));
    }
    let r0_0 = induced_h0(c0_to_cm1, t, f).rank(f) as u64;
    let r2_1 = induced_h2(c1_to_c0, t, f).rank(f) as u64;
    // K = kernel of the last map
    let h0k = h0_sum(c0, t) - r0_0;
    let h1k = h0_sum(cm1, t) - r0_0;
    let h2k = h2_sum(c0, t) - h2_sum(cm1, t);
    let h0 = subtract(h0k, h0_sum(c1, t), "h0")?;
    let h1 = h1k + h2_sum(c1, t) - r2_1;
    let h2 = subtract(h2k, r2_1, "h2")?;
    let chi = chi_sum(c0, t) - chi_sum(c1, t) - chi_sum(cm1, t);
    CohomologyReport::checked(h0, h1, h2, chi)
}

/// Total complex of `coker(a) (x) coker(b)` for injective `a: P1 -> P0`, `b: F2 -> F1`:
/// returns `(P1F2 -> P1F1 + P0F2, P1F1 + P0F2 -> P0F1)`.
pub fn tensor_cokernels(a: &GradedMatrix, b: &GradedMatrix, f: Fp) -> (GradedMatrix, GradedMatrix) {
    let id = GradedMatrix::identity;
    let m2 = GradedMatrix::kron(&id(&a.col_twists), b, f).vstack(&GradedMatrix::kron(a, &id(&b.col_twists), f).neg(f));
    let m1 = GradedMatrix::kron(a, &id(&b.row_twists), f).hstack(&GradedMatrix::kron(&id(&a.row_twists), b, f));
    (m2, m1)
}

/// Total complex of `coker(a) (x) ker(b)` for injective `a: P1 -> P0` and surjective `b: Q0 -> Q-1`:
/// returns `(P1Q0 -> P0Q0 + P1Q-1, P0Q0 + P1Q-1 -> P0Q-1)`.
pub fn tensor_cokernel_kernel(a: &GradedMatrix, b: &GradedMatrix, f: Fp) -> (GradedMatrix, GradedMatrix) {
    let id = GradedMatrix::identity;
    let d1 = GradedMatrix::kron(a, &id(&b.col_twists), f).vstack(&GradedMatrix::kron(&id(&a.col_twists), b, f));
    let d0 = GradedMatrix::kron(&id(&a.row_twists), b, f).hstack(&GradedMatrix::kron(a, &id(&b.row_twists), f).neg(f));
    (d1, d0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradecoh::poly::HPoly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn line_bundles() {
        assert_eq!(line_cohomology(2), (6, 0, 0));
        assert_eq!(line_cohomology(-3), (0, 0, 1));
        assert_eq!(line_cohomology(-5), (0, 0, 6));
        assert_eq!(line_cohomology(-1), (0, 0, 0));
    }

    #[test]
    fn multiplication_by_a_variable() {
        let f = Fp::default();
        let mut m = GradedMatrix::zeros(vec![0], vec![-1]);
        m.set(0, 0, HPoly::var(0));
        for t in 1..6 {
            let h = induced_h0(&m, t, f);
            assert_eq!((h.rows, h.cols), (monomial_count(t), monomial_count(t - 1)));
            assert_eq!(h.rank(f), h.cols);
        }
        let id = GradedMatrix::identity(&[0]);
        assert_eq!(induced_h0(&id, 2, f), Mat::identity(6));
    }

    #[test]
    fn structure_sheaf_of_a_line() {
        let f = Fp::default();
        let mut m = GradedMatrix::zeros(vec![0], vec![-1]);
        m.set(0, 0, HPoly::var(0));
        let r = cohomology_of_presentation(PresentationKind::Cokernel, &m, 0, f).unwrap();
        assert_eq!((r.h0, r.h1, r.h2), (1, 0, 0));
        // O_L(-2) has h1 = 1
        let r = cohomology_of_presentation(PresentationKind::Cokernel, &m, -2, f).unwrap();
        assert_eq!((r.h0, r.h1, r.h2), (0, 1, 0));
    }

    #[test]
    fn degenerate_ladder_matches_presentation() {
        let f = Fp::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = GradedMatrix::random(vec![1; 5], vec![0; 3], f, &mut rng);
        let empty = GradedMatrix::zeros(vec![0; 3], vec![]);
        for t in -4..2 {
            let p = cohomology_of_presentation(PresentationKind::Cokernel, &a, t, f).unwrap();
            let l = cohomology_of_length2(&empty, &a, t, f).unwrap();
            assert_eq!(p, l);
        }
        // E(-2) has no sections
        assert_eq!(cohomology_of_presentation(PresentationKind::Cokernel, &a, -2, f).unwrap().h0, 0);
    }

    #[test]
    fn tangent_bundle_twists() {
        // T(-2) and T(-4) have no cohomology; h1(T(-3)) = 1
        let f = Fp::default();
        let mut e = GradedMatrix::zeros(vec![1; 3], vec![0]);
        for i in 0..3 {
            e.set(i, 0, HPoly::var(i));
        }
        let h = |t| cohomology_of_presentation(PresentationKind::Cokernel, &e, t, f).unwrap();
        assert!(h(-2).vanishes());
        assert!(h(-4).vanishes());
        assert_eq!((h(-3).h0, h(-3).h1, h(-3).h2), (0, 1, 0));
        assert_eq!(h(0).h0, 8);
    }

    #[test]
    fn kernel_and_non_complex() {
        let f = Fp::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        // kernel of a general O(-1)^3 -> O is the twisted cotangent-type bundle
        let b = GradedMatrix::random(vec![0], vec![-1; 3], f, &mut rng);
        let r = cohomology_of_presentation(PresentationKind::Kernel, &b, 0, f).unwrap();
        assert_eq!((r.h0, r.h1, r.h2), (0, 1, 0));
        let c = GradedMatrix::random(vec![0; 3], vec![-1], f, &mut rng);
        assert_eq!(cohomology_of_length2(&c, &b.twist(1), 0, f), Err(Error::NotAComplex));
    }
}
