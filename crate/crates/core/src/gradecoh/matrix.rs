//! Matrices of forms describing maps `sum O(col_j) -> sum O(row_i)`.

use std::fmt::Write as _;

use rand::Rng;

use super::field::Fp;
use super::linalg::Mat;
use super::poly::HPoly;
use crate::error::{Error, Result};
use crate::gaeta::ResolutionShape;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMatrix {
    /// Target summands `O(a_i)`.
    pub row_twists: Vec<i64>,
    /// Source summands `O(b_j)`.
    pub col_twists: Vec<i64>,
    /// `entries[i][j]` has degree `a_i - b_j`.
    pub entries: Vec<Vec<HPoly>>,
}

fn expand(v: &[(i64, usize)]) -> Vec<i64> {
    v.iter().flat_map(|&(t, m)| std::iter::repeat_n(t, m)).collect()
}

impl GradedMatrix {
    pub fn zeros(row_twists: Vec<i64>, col_twists: Vec<i64>) -> Self {
        let entries = row_twists.iter().map(|a| col_twists.iter().map(|b| HPoly::zero(a - b)).collect()).collect();
        GradedMatrix { row_twists, col_twists, entries }
    }

    /// Twists given as `(twist, multiplicity)` runs.
    pub fn zeros_runs(rows: &[(i64, usize)], cols: &[(i64, usize)]) -> Self {
        GradedMatrix::zeros(expand(rows), expand(cols))
    }

    pub fn identity(twists: &[i64]) -> Self {
        let mut m = GradedMatrix::zeros(twists.to_vec(), twists.to_vec());
        for i in 0..twists.len() {
            m.entries[i][i] = HPoly::constant(1);
        }
        m
    }

    pub fn random<R: Rng>(row_twists: Vec<i64>, col_twists: Vec<i64>, f: Fp, rng: &mut R) -> Self {
        let entries =
            row_twists.iter().map(|a| col_twists.iter().map(|b| HPoly::random(a - b, f, rng)).collect()).collect();
        GradedMatrix { row_twists, col_twists, entries }
    }

    /// Random matrix with every constant entry set to zero.
    pub fn random_minimal<R: Rng>(row_twists: Vec<i64>, col_twists: Vec<i64>, f: Fp, rng: &mut R) -> Self {
        GradedMatrix::random(row_twists, col_twists, f, rng).minimalized()
    }

    pub fn nrows(&self) -> usize {
        self.row_twists.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_twists.len()
    }

    pub fn set(&mut self, i: usize, j: usize, p: HPoly) {
        assert_eq!(p.deg, self.row_twists[i] - self.col_twists[j], "entry ({i},{j}) has the wrong degree");
        self.entries[i][j] = p;
    }

    pub fn is_minimal(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.deg != 0 || e.is_zero())
    }

    pub fn minimalized(mut self) -> Self {
        for e in self.entries.iter_mut().flatten() {
            *e = e.without_constant();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(HPoly::is_zero)
    }

    /// Composite `self . o`.
    pub fn compose(&self, o: &GradedMatrix, f: Fp) -> Result<GradedMatrix> {
        if self.col_twists != o.row_twists {
            return Err(Error::NotGenericMatrix("twists do not match for composition".into()));
        }
        let mut out = GradedMatrix::zeros(self.row_twists.clone(), o.col_twists.clone());
        for i in 0..self.nrows() {
            for j in 0..o.ncols() {
                let mut acc = HPoly::zero(self.row_twists[i] - o.col_twists[j]);
                for k in 0..self.ncols() {
                    if self.entries[i][k].deg >= 0 && o.entries[k][j].deg >= 0 {
                        acc = acc.add(&self.entries[i][k].mul(&o.entries[k][j], f), f);
                    }
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    /// The dual map `sum O(-a_i) -> sum O(-b_j)`.
    pub fn dual(&self) -> GradedMatrix {
        let rows: Vec<i64> = self.col_twists.iter().map(|t| -t).collect();
        let cols: Vec<i64> = self.row_twists.iter().map(|t| -t).collect();
        let entries = (0..self.ncols()).map(|j| (0..self.nrows()).map(|i| self.entries[i][j].clone()).collect()).collect();
        GradedMatrix { row_twists: rows, col_twists: cols, entries }
    }

    pub fn neg(&self, f: Fp) -> GradedMatrix {
        let mut m = self.clone();
        for e in m.entries.iter_mut().flatten() {
            *e = e.neg(f);
        }
        m
    }

    pub fn twist(&self, t: i64) -> GradedMatrix {
        let mut m = self.clone();
        m.row_twists.iter_mut().for_each(|x| *x += t);
        m.col_twists.iter_mut().for_each(|x| *x += t);
        m
    }

    /// Kronecker product; row `(i, k)` sits at `i * b.nrows() + k`.
    pub fn kron(a: &GradedMatrix, b: &GradedMatrix, f: Fp) -> GradedMatrix {
        let rows: Vec<i64> = a.row_twists.iter().flat_map(|x| b.row_twists.iter().map(move |y| x + y)).collect();
        let cols: Vec<i64> = a.col_twists.iter().flat_map(|x| b.col_twists.iter().map(move |y| x + y)).collect();
        let mut out = GradedMatrix::zeros(rows, cols);
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let e = &a.entries[i][j];
                if e.is_zero() {
                    continue;
                }
                for k in 0..b.nrows() {
                    for l in 0..b.ncols() {
                        let g = &b.entries[k][l];
                        if !g.is_zero() {
                            out.entries[i * b.nrows() + k][j * b.ncols() + l] = e.mul(g, f);
                        }
                    }
                }
            }
        }
        out
    }

    /// Block matrix `[self | o]` with shared rows.
    pub fn hstack(&self, o: &GradedMatrix) -> GradedMatrix {
        assert_eq!(self.row_twists, o.row_twists);
        let mut m = self.clone();
        m.col_twists.extend_from_slice(&o.col_twists);
        for (r, ro) in m.entries.iter_mut().zip(&o.entries) {
            r.extend(ro.iter().cloned());
        }
        m
    }

    /// Block matrix `[self ; o]` with shared columns.
    pub fn vstack(&self, o: &GradedMatrix) -> GradedMatrix {
        assert_eq!(self.col_twists, o.col_twists);
        let mut m = self.clone();
        m.row_twists.extend_from_slice(&o.row_twists);
        m.entries.extend(o.entries.iter().cloned());
        m
    }

    /// Fiber of the map at a point, as a `nrows x ncols` matrix.
    pub fn fiber(&self, pt: &[u64; 3], f: Fp) -> Mat {
        let mut m = Mat::zeros(self.nrows(), self.ncols());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                m.set(i, j, self.entries[i][j].eval(pt, f));
            }
        }
        m
    }

    /// Twist data as a resolution `sources -> targets`.
    pub fn shape(&self) -> ResolutionShape {
        let runs = |v: &[i64]| v.iter().map(|&t| (t, 1u64)).collect::<Vec<_>>();
        ResolutionShape::new(runs(&self.col_twists), runs(&self.row_twists))
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
        let mut s = format!("rows: {}\ncols: {}\n", join(&self.row_twists), join(&self.col_twists));
        for (i, r) in self.entries.iter().enumerate() {
            for (j, e) in r.iter().enumerate() {
                if !e.is_zero() {
                    let _ = writeln!(s, "{i} {j} : {e}");
                }
            }
        }
        s
    }

    pub fn from_text(text: &str, f: Fp) -> Result<GradedMatrix> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let mut header = |key: &str| -> Result<Vec<i64>> {
            let l = lines.next().ok_or_else(|| Error::Parse(format!("missing '{key}:' line")))?;
            let rest = l.strip_prefix(key).and_then(|r| r.strip_prefix(':')).ok_or_else(|| Error::Parse(format!("expected '{key}:', got '{l}'")))?;
            rest.split_whitespace().map(|t| t.parse().map_err(|_| Error::Parse(format!("bad twist '{t}'")))).collect()
        };
        let rows = header("rows")?;
        let cols = header("cols")?;
        let mut m = GradedMatrix::zeros(rows, cols);
        for l in lines {
            let (idx, poly) = l.split_once(':').ok_or_else(|| Error::Parse(format!("expected 'i j : entry', got '{l}'")))?;
            let ij: Vec<usize> = idx
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad index '{t}'"))))
                .collect::<Result<_>>()?;
            let [i, j] = ij[..] else { return Err(Error::Parse(format!("expected two indices in '{l}'"))) };
            if i >= m.nrows() || j >= m.ncols() {
                return Err(Error::Parse(format!("index ({i},{j}) out of range")));
            }
            let deg = m.row_twists[i] - m.col_twists[j];
            m.entries[i][j] = HPoly::parse(poly, deg, f)?;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn text_round_trip_is_exact() {
        let f = Fp::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = GradedMatrix::random_minimal(vec![-9, -8, -8], vec![-10, -10, -9], f, &mut rng);
        assert!(m.is_minimal());
        let t = m.to_text();
        let back = GradedMatrix::from_text(&t, f).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), t);
        assert!(GradedMatrix::from_text("rows: 0\ncols: -1\n0 0 : x^2", f).is_err());
    }

    #[test]
    fn kron_and_compose_interchange() {
        // (A (x) I)(I (x) B) = A (x) B
        let f = Fp::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = GradedMatrix::random(vec![1, 1], vec![0], f, &mut rng);
        let b = GradedMatrix::random(vec![0, 0, 0], vec![-1, -2], f, &mut rng);
        let lhs = GradedMatrix::kron(&a, &GradedMatrix::identity(&b.row_twists), f)
            .compose(&GradedMatrix::kron(&GradedMatrix::identity(&a.col_twists), &b, f), f)
            .unwrap();
        assert_eq!(lhs, GradedMatrix::kron(&a, &b, f));
        assert_eq!(a.dual().dual(), a);
    }
}
