//! The counting pipeline end to end, plus oracle verification.

use std::time::{Duration, Instant};

use num_traits::Zero;

use crate::algebra::{growth, min_recurrence, GrowthEstimate, Polynomial, Recurrence, GUARD};
use crate::classify::ClassOrder;
use crate::error::{Error, Result};
use crate::lattice::decompose;
use crate::num::Rat;
use crate::oracle::{enumerate_stats, ryser_permanent_capped, Budget};
use crate::spec::{adjacency_matrix, normalize, CirculantSpec, Mode};
use crate::transfer::TransferSystem;

/// Terms checked past the fitting window.
const EXTRA: usize = 10;

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub budget: Budget,
}

/// Wall-clock cost of each stage.
#[derive(Clone, Debug, Default)]
pub struct Timings {
    pub build: Duration,
    pub annihilator: Duration,
    pub sequence: Duration,
    pub fit: Duration,
}

#[derive(Clone, Debug)]
pub struct Derivation {
    pub spec: CirculantSpec,
    pub normalized: CirculantSpec,
    pub system: TransferSystem,
    pub annihilator: Polynomial,
    /// Indexed by the caller's `n`.
    pub recurrence: Recurrence,
    /// Where the transfer iteration starts, in the caller's `n`.
    pub n0: i64,
    /// `T(n0), T(n0 + 1), ...` as produced by the transfer iteration.
    pub transfer_terms: Vec<Rat>,
    pub growth: GrowthEstimate,
    pub timings: Timings,
}

impl Derivation {
    /// The proven bound on the recurrence order for this family.
    ///
    /// Weighted constant families only get the annihilator degree `2^w`:
    /// `3I + P` has permanent `3^n + 1`, which needs order 2 with `w = 1`.
    pub fn degree_bound(&self) -> u128 {
        let w = self.system.width() as u32;
        match self.normalized.mode() {
            // a single jump has no boundary, but still needs order 1
            Mode::Constant if !self.system.weighted => ((1u128 << w) - 1).max(1),
            _ => 1u128 << w,
        }
    }

    /// Offset between the caller's `n` and the analyzed family's `n`.
    pub fn n_shift(&self) -> i64 {
        self.normalized.provenance().map_or(0, |p| p.n_shift)
    }
}

/// Exact permanent of the circulant at `n`, or `None` where the circulant is not
/// defined (non-positive size or coinciding jumps).
pub fn oracle_permanent(spec: &CirculantSpec, n: i64, budget: &Budget) -> Result<Option<Rat>> {
    if spec.size(n) < 1 {
        return Ok(None);
    }
    match adjacency_matrix(spec, n) {
        Ok(m) => ryser_permanent_capped(&m, budget.ryser_dim).map(Some),
        Err(Error::Collision { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Normalize, decompose, build the transfer system, annihilate, iterate and
/// fit.
///
/// The fitted recurrence is then walked back below `n0` one index at a time
/// while the Ryser value at the new start still satisfies it; the base of
/// the reported recurrence is the earliest such index.
pub fn derive(spec: &CirculantSpec, opts: &Options) -> Result<Derivation> {
    let normalized = normalize(spec);
    let shift = normalized.provenance().map_or(0, |p| p.n_shift);
    let mut timings = Timings::default();

    let clock = Instant::now();
    let decomp = decompose(&normalized)?;
    let states = 1usize
        .checked_shl(2 * decomp.width() as u32)
        .unwrap_or(usize::MAX);
    if states > opts.budget.states {
        return Err(Error::StateBudget {
            states,
            budget: opts.budget.states,
        });
    }
    let order = ClassOrder::canonical(decomp.width());
    let system = TransferSystem::build_with_order(decomp, order)?;
    timings.build = clock.elapsed();

    let clock = Instant::now();
    let annihilator = system.annihilator()?;
    timings.annihilator = clock.elapsed();
    let cap = annihilator.degree().max(1);

    let clock = Instant::now();
    let count = 2 * cap + GUARD + EXTRA;
    let terms = system.sequence(system.n0 + count as i64 - 1);
    timings.sequence = clock.elapsed();

    let clock = Instant::now();
    let n0 = system.n0 - shift;
    let mut recurrence = min_recurrence(&terms, n0, cap)?;
    recurrence = extend_backward(spec, recurrence, &opts.budget)?;
    timings.fit = clock.elapsed();

    let growth = growth(&recurrence);
    Ok(Derivation {
        spec: spec.clone(),
        normalized,
        system,
        annihilator,
        recurrence,
        n0,
        transfer_terms: terms,
        growth,
        timings,
    })
}

fn extend_backward(spec: &CirculantSpec, mut rec: Recurrence, budget: &Budget) -> Result<Recurrence> {
    let d = rec.order();
    if rec.coeffs[d - 1].is_zero() {
        return Ok(rec);
    }
    loop {
        let m = rec.base - 1;
        if m < 1 || spec.size(m) as usize > budget.ryser_dim {
            return Ok(rec);
        }
        let Some(value) = oracle_permanent(spec, m, budget)? else {
            return Ok(rec);
        };
        // T(m + d) = sum_j c_j T(m + d - j), with T(m) the candidate
        let vals = rec.terms(rec.base, d)?;
        let mut rhs = &rec.coeffs[d - 1] * &value;
        for j in 1..d {
            rhs += &rec.coeffs[j - 1] * &vals[d - 1 - j];
        }
        if rhs != vals[d - 1] {
            return Ok(rec);
        }
        rec = rec.prepend(&[value]);
    }
}

/// One oracle comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub n: i64,
    pub recurrence: Rat,
    pub ryser: Option<Rat>,
    pub enumeration: Option<Rat>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.ryser.as_ref().is_none_or(|r| *r == self.recurrence)
            && self.enumeration.as_ref().is_none_or(|e| *e == self.recurrence)
    }
}

/// Compares the recurrence with Ryser and, for unweighted families, exhaustive
/// enumeration at every `n` from the base to `n_max` whose matrix fits the
/// budget. Sizes beyond the budget are an error, not a skip.
pub fn verify(derivation: &Derivation, n_max: i64, budget: &Budget) -> Result<Vec<Check>> {
    let spec = &derivation.spec;
    let rec = &derivation.recurrence;
    let mut checks = Vec::new();
    for n in rec.base..=n_max {
        let size = spec.size(n).max(0) as usize;
        if size > budget.ryser_dim {
            return Err(Error::SizeCap {
                dim: size,
                cap: budget.ryser_dim,
            });
        }
        let value = rec.terms(n, 1)?.remove(0);
        let Some(ryser) = oracle_permanent(spec, n, budget)? else {
            continue;
        };
        let enumeration = if !spec.is_weighted()
            && size <= budget.enum_size
            && spec.jumps().len() <= budget.enum_jumps
        {
            Some(Rat::from_integer(enumerate_stats(spec, n, 0, budget)?.count))
        } else {
            None
        };
        checks.push(Check {
            n,
            recurrence: value,
            ryser: Some(ryser),
            enumeration,
        });
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use crate::spec::parse_spec;

    #[test]
    fn self_loops_give_constant_one() {
        let d = derive(&CirculantSpec::constant(&[0]).unwrap(), &Options::default()).unwrap();
        assert_eq!(d.recurrence.coeffs, vec![rat(1)]);
        assert_eq!(d.annihilator.to_string(), "x - 1");
    }

    #[test]
    fn consecutive_jumps_verify() {
        let spec = CirculantSpec::constant(&[1, 2, 3]).unwrap();
        let d = derive(&spec, &Options::default()).unwrap();
        let checks = verify(&d, 12, &Budget::default()).unwrap();
        assert!(!checks.is_empty());
        assert!(checks.iter().all(Check::passed));
    }

    #[test]
    fn three_n_family_reaches_back_to_two() {
        let spec = parse_spec("0,1n+0,2n-1", Some("3n")).unwrap();
        let d = derive(&spec, &Options::default()).unwrap();
        assert_eq!(d.recurrence.base, 2);
        assert_eq!(d.recurrence.initials, vec![rat(17), rat(45), rat(113), rat(309)]);
    }

    #[test]
    fn verify_refuses_oversized_matrices() {
        let d = derive(&CirculantSpec::constant(&[0, 1, 2]).unwrap(), &Options::default()).unwrap();
        let err = verify(&d, 40, &Budget::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
