//! Sampled Betti diagrams against the stable base locus tables.

use rayon::prelude::*;
use serde::Serialize;

use super::field::Fp;
use super::ideals::ideal_betti;
use super::points::{sample_points, Stratum};
use crate::cones::sbld_table;
use crate::error::{Error, Result};
use crate::gaeta::ResolutionShape;

/// Distinct base loci of the table for `n`, as `(betti_id, stratum, diagram)`.
pub fn table_strata(n: u64) -> Result<Vec<(String, Stratum, ResolutionShape)>> {
    let mut out = Vec::new();
    for row in sbld_table(n)? {
        let st: Stratum = row.base_locus.parse()?;
        if !out.iter().any(|(_, s, _)| *s == st) {
            out.push((row.betti_id.clone(), st, row.betti.clone()));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct BettiTrials {
    pub n: u64,
    pub stratum: Stratum,
    pub betti_id: String,
    pub expected: ResolutionShape,
    pub seeds: Vec<u64>,
    /// Diagrams that differ from `expected`, with their seed.
    pub mismatches: Vec<(u64, ResolutionShape)>,
    pub matches: u64,
    pub trials: u64,
}

impl BettiTrials {
    pub fn passed(&self) -> bool {
        self.matches == self.trials
    }
}

/// Samples `trials` configurations (seeds `seed, seed + 1, ...`) and compares
/// their ideal Betti diagrams with the table row for `stratum`.
pub fn betti_trials(n: u64, stratum: Stratum, seed: u64, trials: u64, f: Fp) -> Result<BettiTrials> {
    let (betti_id, _, expected) = table_strata(n)?
        .into_iter()
        .find(|(_, s, _)| *s == stratum)
        .ok_or_else(|| Error::UnsupportedN(n, format!("no table row with base locus {stratum}")))?;
    let seeds: Vec<u64> = (0..trials).map(|i| seed.wrapping_add(i)).collect();
    let observed: Vec<ResolutionShape> = seeds
        .par_iter()
        .map(|&s| {
            let cfg = sample_points(stratum, n as usize, s, f)?;
            Ok(ResolutionShape::from_betti(&ideal_betti(&cfg, f)?))
        })
        .collect::<Result<_>>()?;
    let mismatches: Vec<(u64, ResolutionShape)> =
        seeds.iter().zip(observed).filter(|(_, o)| *o != expected).map(|(&s, o)| (s, o)).collect();
    Ok(BettiTrials {
        n,
        stratum,
        betti_id,
        expected,
        matches: trials - mismatches.len() as u64,
        seeds,
        mismatches,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_points_strata() {
        let st: Vec<Stratum> = table_strata(5).unwrap().into_iter().map(|x| x.1).collect();
        assert_eq!(st, vec![Stratum::Line(5), Stratum::Line(4), Stratum::L33, Stratum::Line(3), Stratum::General]);
        let r = betti_trials(5, Stratum::L33, 3, 4, Fp::default()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.betti_id, "G(5)");
    }
}
