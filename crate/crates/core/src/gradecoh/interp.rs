//! Interpolation checks for the triangular and tangential bundles, sections of
//! twisted tangent bundles through special point schemes, and their zero loci.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::cohomology::{
    cohomology_of_length2, cohomology_of_middle, cohomology_of_presentation, induced_h0, is_surjective, tensor_cokernel_kernel,
    tensor_cokernels, CohomologyReport, PresentationKind,
};
use super::field::Fp;
use super::ideals::{betti_of_generators, hilbert_burch};
use super::linalg::Mat;
use super::matrix::GradedMatrix;
use super::points::{evaluation_matrix, sample_points, Stratum};
use super::poly::{monomial_count, HPoly};
use crate::chern::ChernCharacter;
use crate::error::{Error, Result};
use crate::gaeta::BettiTable;
use crate::rational::{as_i64, Rational};

const ATTEMPTS: u64 = 8;

/// Runs `f` on derived seeds until it stops asking for a new one.
fn with_retries<T>(seed: u64, mut f: impl FnMut(u64) -> Result<T>) -> Result<T> {
    let mut last = None;
    for a in 0..ATTEMPTS {
        let s = if a == 0 { seed } else { seed ^ (a.wrapping_mul(0x9e37_79b9_7f4a_7c15)) };
        match f(s) {
            Err(e @ (Error::RetryWithNewSeed(_) | Error::NotGenericMatrix(_))) => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap())
}

fn line_sum(tw: &[i64]) -> ChernCharacter {
    tw.iter().fold(ChernCharacter::zero(), |acc, &a| &acc + &ChernCharacter::line_bundle(a))
}

fn presented(m: &GradedMatrix) -> ChernCharacter {
    &line_sum(&m.row_twists) - &line_sum(&m.col_twists)
}

fn euler_int(c: &ChernCharacter) -> Result<i64> {
    let x: Rational = c.euler();
    as_i64(&x).ok_or_else(|| Error::InternalInconsistency("non-integral Euler characteristic".into()))
}

/// Euler sequence presentation `O(t-1) -> O(t)^3` of `T(t-1)`.
pub fn euler_presentation(t: i64) -> GradedMatrix {
    let mut m = GradedMatrix::zeros(vec![t; 3], vec![t - 1]);
    for i in 0..3 {
        m.set(i, 0, HPoly::var(i));
    }
    m
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedReport {
    pub sheaf: String,
    pub report: CohomologyReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trial {
    pub seed: u64,
    pub groups: Vec<NamedReport>,
}

impl Trial {
    pub fn vanishes(&self) -> bool {
        self.groups.iter().all(|g| g.report.vanishes())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Points on a curve, sections checked fiberwise.
    Fiberwise,
    /// Length-2 ladder on the tensor with a (qk) resolution.
    Ladder,
    /// Split check against `T(-2s-1)` and the kernel bundle `V`.
    KernelBundle,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpolationReport {
    pub family: &'static str,
    /// `r` for the triangular family, `s` for the tangential one.
    pub param: u64,
    pub k: u64,
    pub n: u64,
    pub route: Route,
    /// Euler characteristics of the checked tensor products, all zero.
    pub chi_audit: bool,
    pub trials: Vec<Trial>,
    pub passed: bool,
}

impl InterpolationReport {
    /// Smallest `h0` over the trials of the first checked group.
    pub fn min_h0(&self) -> Option<u64> {
        self.trials.iter().filter_map(|t| t.groups.first().map(|g| g.report.h0)).min()
    }
}

/// `h^i(E (x) I_Z)` for `E = coker(a)` and reduced `Z`, via sections of the
/// target whose values at each point lie in the image of the fiber.
pub fn twisted_ideal_cohomology(a: &GradedMatrix, points: &[[u64; 3]], f: Fp) -> Result<CohomologyReport> {
    let e = cohomology_of_presentation(PresentationKind::Cokernel, a, 0, f)?;
    let rank_e = a.nrows() - a.ncols();
    let mut offsets = vec![0];
    for &t in &a.row_twists {
        offsets.push(offsets.last().unwrap() + monomial_count(t));
    }
    let cols = *offsets.last().unwrap();
    let mut conds: Vec<Vec<u64>> = Vec::new();
    for p in points {
        let fib = a.fiber(p, f);
        if fib.rank(f) != a.ncols() {
            return Err(Error::RetryWithNewSeed("bundle is not locally free at a sample point".into()));
        }
        for l in fib.transpose().kernel(f) {
            let mut row = vec![0; cols];
            for (i, &li) in l.iter().enumerate() {
                if li == 0 {
                    continue;
                }
                let ev = evaluation_matrix(std::slice::from_ref(p), a.row_twists[i], f);
                for (j, &v) in ev.row(0).iter().enumerate() {
                    row[offsets[i] + j] = f.mul(li, v);
                }
            }
            conds.push(row);
        }
    }
    let rank_conds = if conds.is_empty() { 0 } else { Mat::from_rows(&conds, cols).rank(f) };
    let w = cols - rank_conds;
    let image = induced_h0(a, 0, f).rank(f);
    let h0 = (w - image) as u64;
    // 0 -> E(x)I_Z -> E -> E|_Z -> 0
    let h1 = (points.len() * rank_e) as u64 + h0 + e.h1 - e.h0;
    let ch = presented(a).tensor(&ChernCharacter::ideal_points(points.len() as i64));
    let r = CohomologyReport { h0, h1, h2: e.h2, chi_expected: ch.euler() };
    if !r.audit() {
        return Err(Error::InternalInconsistency("Euler characteristic audit failed".into()));
    }
    Ok(r)
}

/// Random presentation `O(r-3)^{kr} -> O(r-2)^{k(2r-1)}`.
pub fn triangular_bundle<R: Rng>(r: u64, k: u64, f: Fp, rng: &mut R) -> GradedMatrix {
    let (r, k) = (r as i64, k as usize);
    GradedMatrix::random(vec![r - 2; k * (2 * r as usize - 1)], vec![r - 3; k * r as usize], f, rng)
}

/// Random presentation `O(2s-3)^{ks} -> O(2s-1)^{k(5s-1)}`.
pub fn tangential_bundle<R: Rng>(s: u64, k: u64, f: Fp, rng: &mut R) -> GradedMatrix {
    let (s, k) = (s as i64, k as usize);
    GradedMatrix::random(vec![2 * s - 1; k * (5 * s as usize - 1)], vec![2 * s - 3; k * s as usize], f, rng)
}

pub fn verify_interpolation_triangular(r: u64, k: u64, seed: u64, trials: u64, f: Fp) -> Result<InterpolationReport> {
    if r < 3 || k == 0 {
        return Err(Error::OutOfRange(format!("need r >= 3 and k >= 1, got r = {r}, k = {k}")));
    }
    let n = r * (r + 1) / 2;
    let e_ch = presented(&triangular_bundle(r, k, f, &mut ChaCha8Rng::seed_from_u64(0)));
    let chi = euler_int(&e_ch.tensor(&ChernCharacter::ideal_points(n as i64)))?;
    let mut out = Vec::new();
    for i in 0..trials.max(1) {
        let trial = with_retries(seed.wrapping_add(i), |s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let a = triangular_bundle(r, k, f, &mut rng);
            let z = sample_points(Stratum::OnCurve(r as u32 - 1), n as usize, rng.gen(), f)?;
            let rep = twisted_ideal_cohomology(&a, &z.points, f)?;
            Ok(Trial { seed: s, groups: vec![NamedReport { sheaf: "E (x) I_Z".into(), report: rep }] })
        })?;
        out.push(trial);
    }
    let passed = chi == 0 && out.iter().any(Trial::vanishes);
    Ok(InterpolationReport { family: "triangular", param: r, k, n, route: Route::Fiberwise, chi_audit: chi == 0, trials: out, passed })
}

/// Minimal (qk) matrix with `k = 1` whose last column is the Euler block `(0, x, y, z, 0, ...)`.
pub fn special_qk_matrix<R: Rng>(s: u64, f: Fp, rng: &mut R) -> GradedMatrix {
    let s = s as i64;
    let mut rows = vec![-2 * s - 1];
    rows.extend(vec![-2 * s; s as usize + 1]);
    let mut cols = vec![-2 * s - 2; s as usize];
    cols.push(-2 * s - 1);
    let mut m = GradedMatrix::random_minimal(rows, cols, f, rng);
    let last = s as usize;
    for i in 0..m.nrows() {
        let e = if (1..=3).contains(&i) { HPoly::var(i - 1) } else { HPoly::zero(m.row_twists[i] - m.col_twists[last]) };
        m.entries[i][last] = e;
    }
    m
}

/// Random minimal (qk) matrix `O(-2s-2)^s + O(-2s-1)^k -> O(-2s-1)^k + O(-2s)^{s+1}`.
pub fn qk_matrix<R: Rng>(s: u64, k: u64, f: Fp, rng: &mut R) -> GradedMatrix {
    let (s, k) = (s as i64, k as usize);
    let mut rows = vec![-2 * s - 1; k];
    rows.extend(vec![-2 * s; s as usize + 1]);
    let mut cols = vec![-2 * s - 2; s as usize];
    cols.extend(vec![-2 * s - 1; k]);
    GradedMatrix::random_minimal(rows, cols, f, rng)
}

/// Checks that the minors of `m` cut out a scheme of length `n`.
fn check_length(m: &GradedMatrix, n: u64, f: Fp) -> Result<()> {
    let g = hilbert_burch(m, f)?;
    let data = super::ideals::hilbert_burch_ideal(m, &g, f)?;
    if data.length != n {
        return Err(Error::NotGenericMatrix(format!("minors cut out length {} instead of {n}", data.length)));
    }
    Ok(())
}

pub fn default_route(s: u64) -> Route {
    if s <= 4 {
        Route::Ladder
    } else {
        Route::KernelBundle
    }
}

pub fn verify_interpolation_tangential(s: u64, k: u64, seed: u64, trials: u64, route: Route, f: Fp) -> Result<InterpolationReport> {
    if s < 2 || k == 0 {
        return Err(Error::OutOfRange(format!("need s >= 2 and k >= 1, got s = {s}, k = {k}")));
    }
    if route == Route::KernelBundle && s < 5 {
        return Err(Error::OutOfRange(format!("the kernel-bundle route needs s >= 5, got {s}")));
    }
    if route == Route::Fiberwise {
        return Err(Error::OutOfRange("tangential schemes are not given by points".into()));
    }
    let si = s as i64;
    let n = 2 * s * (s + 1);
    let m_ch = presented(&tangential_bundle(s, k, f, &mut ChaCha8Rng::seed_from_u64(0)));
    let mut chis = vec![euler_int(&m_ch.tensor(&ChernCharacter::ideal_points(n as i64)))?];
    if route == Route::KernelBundle {
        let v_ch = &line_sum(&vec![-2 * si - 2; s as usize]) - &line_sum(&kernel_targets(s));
        chis.push(euler_int(&m_ch.tensor(&ChernCharacter::tangent(-2 * si - 1)))?);
        chis.push(euler_int(&m_ch.tensor(&v_ch))?);
    }
    let chi_audit = chis.iter().all(|&c| c == 0);
    let mut out = Vec::new();
    for i in 0..trials.max(1) {
        let trial = with_retries(seed.wrapping_add(i), |sd| {
            let mut rng = ChaCha8Rng::seed_from_u64(sd);
            let a = tangential_bundle(s, k, f, &mut rng);
            let groups = match route {
                Route::Ladder => {
                    let q = special_qk_matrix(s, f, &mut rng);
                    check_length(&q, n, f)?;
                    let (m2, m1) = tensor_cokernels(&a, &q, f);
                    vec![NamedReport { sheaf: "M (x) I_Z".into(), report: cohomology_of_length2(&m2, &m1, 0, f)? }]
                }
                _ => {
                    let t = euler_presentation(-2 * si);
                    let (m2, m1) = tensor_cokernels(&a, &t, f);
                    let rt = cohomology_of_length2(&m2, &m1, 0, f)?;
                    let b = GradedMatrix::random(kernel_targets(s), vec![-2 * si - 2; s as usize], f, &mut rng);
                    if !is_surjective(&b, f) {
                        return Err(Error::RetryWithNewSeed("kernel map is not surjective".into()));
                    }
                    let (d1, d0) = tensor_cokernel_kernel(&a, &b, f);
                    let rv = cohomology_of_middle(&d1, &d0, 0, f)?;
                    vec![
                        NamedReport { sheaf: format!("M (x) T({})", -2 * si - 1), report: rt },
                        NamedReport { sheaf: "M (x) V".into(), report: rv },
                    ]
                }
            };
            Ok(Trial { seed: sd, groups })
        })?;
        out.push(trial);
    }
    let passed = chi_audit && out.iter().any(Trial::vanishes);
    Ok(InterpolationReport { family: "tangential", param: s, k, n, route, chi_audit, trials: out, passed })
}

/// Targets `O(-2s-1)^2 + O(-2s)^{s-5}` of the map whose kernel is `V`.
fn kernel_targets(s: u64) -> Vec<i64> {
    let s = s as i64;
    let mut t = vec![-2 * s - 1; 2];
    t.extend(vec![-2 * s; (s - 5).max(0) as usize]);
    t
}

/// Escalates `k` from 1 until `check(k)` passes; returns the first passing report.
pub fn minimal_k(kmax: u64, mut check: impl FnMut(u64) -> Result<InterpolationReport>) -> Result<(Option<u64>, Vec<InterpolationReport>)> {
    let mut seen = Vec::new();
    for k in 1..=kmax {
        let r = check(k)?;
        let ok = r.passed;
        seen.push(r);
        if ok {
            return Ok((Some(k), seen));
        }
    }
    Ok((None, seen))
}

#[derive(Clone, Debug, Serialize)]
pub struct QkReport {
    pub s: u64,
    pub k: u64,
    pub seed: u64,
    pub sections: u64,
    pub report: CohomologyReport,
}

/// `h^0(T(2s-2) (x) I_Z)` for `Z` with a random minimal (qk) resolution.
pub fn qk_section_count(s: u64, k: u64, seed: u64, f: Fp) -> Result<QkReport> {
    if s < 1 || k > s {
        return Err(Error::OutOfRange(format!("need 0 <= k <= s, got s = {s}, k = {k}")));
    }
    let n = 2 * s * (s + 1);
    with_retries(seed, |sd| {
        let mut rng = ChaCha8Rng::seed_from_u64(sd);
        let q = qk_matrix(s, k, f, &mut rng);
        check_length(&q, n, f)?;
        let t = euler_presentation(2 * s as i64 - 1);
        let (m2, m1) = tensor_cokernels(&t, &q, f);
        let report = cohomology_of_length2(&m2, &m1, 0, f)?;
        Ok(QkReport { s, k, seed: sd, sections: report.h0, report })
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroLocusReport {
    pub s: u64,
    pub seed: u64,
    pub generators: Vec<String>,
    pub betti: BettiTable,
    pub length: u64,
}

/// Zero scheme of a random section `(A, B, C)` of `T(2s-2)`: the 2x2 minors of
/// the matrix with rows `(x, y, z)` and `(A, B, C)`.
pub fn tangent_section_zero_locus(s: u64, seed: u64, f: Fp) -> Result<ZeroLocusReport> {
    if s < 2 {
        return Err(Error::OutOfRange(format!("need s >= 2, got {s}")));
    }
    let d = 2 * s as i64 - 1;
    with_retries(seed, |sd| {
        let mut rng = ChaCha8Rng::seed_from_u64(sd);
        let sec: Vec<HPoly> = (0..3).map(|_| HPoly::random(d, f, &mut rng)).collect();
        let v: Vec<HPoly> = (0..3).map(HPoly::var).collect();
        let minor = |i: usize, j: usize| v[i].mul(&sec[j], f).sub(&v[j].mul(&sec[i], f), f);
        let gens = vec![minor(1, 2), minor(2, 0), minor(0, 1)];
        let data = betti_of_generators(&gens, 2 * d + 3, f)
            .map_err(|e| Error::RetryWithNewSeed(format!("degenerate section: {e}")))?;
        Ok(ZeroLocusReport { s, seed: sd, generators: gens.iter().map(HPoly::to_string).collect(), betti: data.betti, length: data.length })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaeta::ResolutionShape;

    #[test]
    fn qk_counts_small() {
        let f = Fp::default();
        assert_eq!(qk_section_count(2, 1, 0, f).unwrap().sections, 1);
        assert_eq!(qk_section_count(2, 0, 0, f).unwrap().sections, 0);
        assert_eq!(qk_section_count(3, 2, 0, f).unwrap().sections, 2);
    }

    #[test]
    fn zero_locus_s2() {
        let f = Fp::default();
        let z = tangent_section_zero_locus(2, 1, f).unwrap();
        assert_eq!(z.length, 13);
        assert_eq!(ResolutionShape::from_betti(&z.betti).to_string(), "O(-5) + O(-7) -> O(-4)^3");
    }

    #[test]
    fn triangular_r3() {
        let f = Fp::default();
        let r = verify_interpolation_triangular(3, 1, 0, 2, f).unwrap();
        assert!(r.chi_audit);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn collinear_points_are_not_interpolated() {
        // ten collinear points: every section of E(-1) vanishes on them
        let f = Fp::default();
        let a = triangular_bundle(4, 1, f, &mut ChaCha8Rng::seed_from_u64(3));
        let z = sample_points(Stratum::Line(10), 10, 3, f).unwrap();
        let r = twisted_ideal_cohomology(&a, &z.points, f).unwrap();
        assert_eq!(r.h0, 17);
        assert!(r.audit());
    }

    #[test]
    fn tangential_s2() {
        let f = Fp::default();
        let r = verify_interpolation_tangential(2, 1, 0, 1, Route::Ladder, f).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn kernel_bundle_twist_vanishes() {
        // M at s = 5: h0(M(-12)) = 0 and h1(M(-12)) is the kernel of the H^2 map
        let f = Fp::default();
        let a = tangential_bundle(5, 1, f, &mut ChaCha8Rng::seed_from_u64(5));
        let r = cohomology_of_presentation(PresentationKind::Cokernel, &a, -12, f).unwrap();
        let h2map = super::super::cohomology::induced_h2(&a, -12, f);
        assert_eq!(r.h0, 0);
        assert_eq!(r.h1, (h2map.cols - h2map.rank(f)) as u64);
    }
}
