//! Beyond plain counting: weighted permanents, cycle-count moments and
//! Hamiltonian cycles.
//!
//! Moments and Hamiltonian cycles run a second transfer over
//! [`pairing::PairingState`]s on the raw (unshifted) jumps.

pub mod pairing;

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::algebra::{eval_recurrence, min_recurrence, Recurrence, GUARD};
use crate::derive::{derive, Derivation, Options};
use crate::error::{Error, Result};
use crate::num::{Int, Rat};
use crate::oracle::Budget;
use crate::par;
use crate::spec::CirculantSpec;

pub use pairing::{Frame, PairingState, Slot, Walk};

/// Default cap on the moment order.
pub const MAX_MOMENT: usize = 3;

/// The pairing-state transfer of one family.
#[derive(Clone, Debug)]
pub struct StateGraph {
    pub frame: Frame,
    pub walk: Walk,
    pub moments: usize,
    pub states: Vec<PairingState>,
    /// `incoming[to]` lists `(from, closed)` for every move into `to`.
    incoming: Vec<Vec<(usize, u32)>>,
    /// Orbit counts of the hook completions of each state.
    completions: Vec<Vec<usize>>,
    /// Moment sums of the legal covers of the starting path, per state.
    initial: Vec<Vec<Int>>,
    /// Whether some tour closed into a cycle before the hook step.
    pub lattice_cycle_seen: bool,
}

fn binomials(t_max: usize) -> Vec<Vec<Int>> {
    let mut rows: Vec<Vec<Int>> = Vec::new();
    for t in 0..=t_max {
        let mut row = vec![Int::one(); t + 1];
        for j in 1..t {
            row[j] = &rows[t - 1][j - 1] + &rows[t - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// `m'_t = sum_j C(t, j) c^(t-j) m_j`: moments after adding `c` cycles to
/// every cover.
pub fn shift_moments(m: &[Int], c: u64, binom: &[Vec<Int>]) -> Vec<Int> {
    let c = Int::from(c);
    (0..m.len())
        .map(|t| {
            let mut total = Int::zero();
            let mut power = Int::one();
            for j in (0..=t).rev() {
                total += &binom[t][j] * &power * &m[j];
                power *= &c;
            }
            total
        })
        .collect()
}

impl StateGraph {
    pub fn build(spec: &CirculantSpec, walk: Walk, moments: usize, budget: &Budget) -> Result<Self> {
        let frame = Frame::new(spec)?;
        let moments = if walk == Walk::Tours { 0 } else { moments };
        let mut index: HashMap<PairingState, usize> = HashMap::new();
        let mut states: Vec<PairingState> = Vec::new();
        let mut initial: Vec<Vec<Int>> = Vec::new();
        let mut lattice_cycle_seen = false;
        let mut intern = |s: PairingState, states: &mut Vec<PairingState>, initial: &mut Vec<Vec<Int>>| {
            *index.entry(s.clone()).or_insert_with(|| {
                states.push(s);
                initial.push(vec![Int::zero(); moments + 1]);
                states.len() - 1
            })
        };

        let mut snaps = Vec::new();
        pairing::legal_covers(&frame, frame.n0 as usize, |s| snaps.push(s));
        for snap in snaps {
            let state = match walk {
                Walk::Covers => snap.state,
                Walk::Tours if snap.closed == 0 => snap.state,
                Walk::Tours if snap.closed == 1 && snap.state.paths.is_empty() => {
                    lattice_cycle_seen = true;
                    PairingState::finished()
                }
                Walk::Tours => continue,
            };
            let id = intern(state, &mut states, &mut initial);
            let mut power = Int::one();
            let c = Int::from(snap.closed);
            for t in 0..=moments {
                initial[id][t] += &power;
                power *= &c;
            }
        }

        let mut edges: Vec<Vec<(usize, u32)>> = Vec::new();
        let mut next = 0;
        while next < states.len() {
            if states.len() > budget.states {
                return Err(Error::StateBudget {
                    states: states.len(),
                    budget: budget.states,
                });
            }
            let moves = pairing::step(&frame, &states[next], walk);
            let mut out = Vec::with_capacity(moves.len());
            for m in moves {
                if m.to.done {
                    lattice_cycle_seen = true;
                }
                let id = intern(m.to, &mut states, &mut initial);
                out.push((id, m.closed));
            }
            edges.push(out);
            next += 1;
        }
        let mut incoming = vec![Vec::new(); states.len()];
        for (from, out) in edges.iter().enumerate() {
            for &(to, closed) in out {
                incoming[to].push((from, closed));
            }
        }
        let completions = states.iter().map(|s| pairing::completions(&frame, s)).collect();
        Ok(StateGraph {
            frame,
            walk,
            moments,
            states,
            incoming,
            completions,
            initial,
            lattice_cycle_seen,
        })
    }

    pub fn n0(&self) -> i64 {
        self.frame.n0
    }

    fn advance(&self, v: &[Vec<Int>], binom: &[Vec<Int>]) -> Vec<Vec<Int>> {
        par::map_range(self.states.len(), |to| {
            let mut acc = vec![Int::zero(); self.moments + 1];
            for &(from, closed) in &self.incoming[to] {
                let add = if closed == 0 {
                    v[from].clone()
                } else {
                    shift_moments(&v[from], closed as u64, binom)
                };
                for (a, b) in acc.iter_mut().zip(add) {
                    *a += b;
                }
            }
            acc
        })
    }

    fn close(&self, v: &[Vec<Int>], binom: &[Vec<Int>]) -> Vec<Int> {
        let mut total = vec![Int::zero(); self.moments + 1];
        for (s, comps) in self.completions.iter().enumerate() {
            if v[s].iter().all(Zero::is_zero) {
                continue;
            }
            match self.walk {
                Walk::Tours => {
                    let ok = if self.states[s].done {
                        1
                    } else {
                        comps.iter().filter(|&&c| c == 1).count()
                    };
                    total[0] += &v[s][0] * Int::from(ok);
                }
                Walk::Covers => {
                    for &c in comps {
                        for (a, b) in total.iter_mut().zip(shift_moments(&v[s], c as u64, binom)) {
                            *a += b;
                        }
                    }
                }
            }
        }
        total
    }

    /// `values[t][k]` is moment `t` (or the tour count) at `n0 + k`.
    pub fn sequence(&self, count: usize) -> Vec<Vec<Int>> {
        let binom = binomials(self.moments);
        let mut out = vec![Vec::with_capacity(count); self.moments + 1];
        let mut v = self.initial.clone();
        for k in 0..count {
            for (t, x) in self.close(&v, &binom).into_iter().enumerate() {
                out[t].push(x);
            }
            if k + 1 < count {
                v = self.advance(&v, &binom);
            }
        }
        out
    }
}

/// Cycle-count moments `TC_0..TC_i` with their recurrences.
#[derive(Clone, Debug)]
pub struct MomentAnalysis {
    pub graph: StateGraph,
    pub terms: Vec<Vec<Rat>>,
    pub recurrences: Vec<Recurrence>,
}

impl MomentAnalysis {
    pub fn n0(&self) -> i64 {
        self.graph.n0()
    }

    pub fn recurrence(&self, t: usize) -> &Recurrence {
        &self.recurrences[t]
    }
}

fn fit(terms: &[Int], base: i64, cap: usize) -> Result<(Vec<Rat>, Recurrence)> {
    let rats: Vec<Rat> = terms.iter().map(|x| Rat::from_integer(x.clone())).collect();
    let rec = min_recurrence(&rats, base, cap)?;
    Ok((rats, rec))
}

/// Recurrences for `TC_0, ..., TC_i` on the raw jumps of a constant family.
pub fn moments_derive(spec: &CirculantSpec, i: usize, budget: &Budget) -> Result<MomentAnalysis> {
    if i > MAX_MOMENT {
        return Err(Error::Unsupported(format!("moment order {i} exceeds {MAX_MOMENT}")));
    }
    let graph = StateGraph::build(spec, Walk::Covers, i, budget)?;
    let cap = graph.states.len() * (i + 1);
    let seq = graph.sequence(2 * cap + GUARD + 8);
    let mut terms = Vec::new();
    let mut recurrences = Vec::new();
    for (t, values) in seq.iter().enumerate() {
        let (rats, rec) = fit(values, graph.n0(), graph.states.len() * (t + 1))?;
        terms.push(rats);
        recurrences.push(rec);
    }
    Ok(MomentAnalysis {
        graph,
        terms,
        recurrences,
    })
}

/// Exact expected number of cycles of a uniform cycle cover at `n`.
pub fn moments_ratio(analysis: &MomentAnalysis, n: i64) -> Result<Rat> {
    if analysis.recurrences.len() < 2 {
        return Err(Error::Unsupported("the ratio needs the first moment".into()));
    }
    let tc0 = eval_recurrence(&analysis.recurrences[0], n)?;
    let tc1 = eval_recurrence(&analysis.recurrences[1], n)?;
    if tc0.is_zero() {
        return Err(Error::Inconsistency(format!("no cycle covers at n = {n}")));
    }
    Ok(tc1 / tc0)
}

/// `ratio(n + 1) - ratio(n)`: the slope of the expected cycle count, which
/// grows linearly in `n` up to exponentially small corrections.
pub fn moments_slope(analysis: &MomentAnalysis, n: i64) -> Result<Rat> {
    Ok(moments_ratio(analysis, n + 1)? - moments_ratio(analysis, n)?)
}

/// Hamiltonian-cycle counts with their recurrence.
#[derive(Clone, Debug)]
pub struct HamiltonianAnalysis {
    pub graph: StateGraph,
    pub terms: Vec<Rat>,
    pub recurrence: Recurrence,
}

pub fn hamiltonian_derive(spec: &CirculantSpec, budget: &Budget) -> Result<HamiltonianAnalysis> {
    let graph = StateGraph::build(spec, Walk::Tours, 0, budget)?;
    let cap = graph.states.len();
    let seq = graph.sequence(2 * cap + GUARD + 8);
    let (terms, recurrence) = fit(&seq[0], graph.n0(), cap)?;
    Ok(HamiltonianAnalysis {
        graph,
        terms,
        recurrence,
    })
}

/// The full counting pipeline on a weighted family.
pub fn weighted_derive(spec: &CirculantSpec, opts: &Options) -> Result<Derivation> {
    derive(spec, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_stats;

    #[test]
    fn moment_shift_is_binomial() {
        let b = binomials(3);
        // covers with 2 and 5 cycles, shifted by 3: 5 and 8 cycles
        let m: Vec<Int> = [2u64, 7, 29, 133].iter().map(|&x| Int::from(x)).collect();
        let want: Vec<Int> = [2u64, 13, 89, 637].iter().map(|&x| Int::from(x)).collect();
        assert_eq!(shift_moments(&m, 3, &b), want);
    }

    #[test]
    fn covers_walk_matches_enumeration() {
        let budget = Budget::default();
        for jumps in [&[-1, 0, 1][..], &[0, 1, 2], &[1, 2], &[-2, 1], &[0, 1, 3]] {
            let spec = CirculantSpec::constant(jumps).unwrap();
            let g = StateGraph::build(&spec, Walk::Covers, 2, &budget).unwrap();
            let seq = g.sequence(6);
            for k in 0..6 {
                let n = g.n0() + k as i64;
                let stats = enumerate_stats(&spec, n, 2, &budget).unwrap();
                for t in 0..3 {
                    assert_eq!(seq[t][k], stats.moment_sums[t], "{jumps:?} n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn tours_walk_matches_enumeration() {
        let budget = Budget::default();
        for jumps in [&[1, 2][..], &[0, 1, 2], &[-1, 1], &[1, 3], &[-2, 1, 2]] {
            let spec = CirculantSpec::constant(jumps).unwrap();
            let g = StateGraph::build(&spec, Walk::Tours, 0, &budget).unwrap();
            let seq = g.sequence(7);
            for k in 0..7 {
                let n = g.n0() + k as i64;
                if spec.size(n) > 16 {
                    break;
                }
                let stats = enumerate_stats(&spec, n, 0, &budget).unwrap();
                assert_eq!(seq[0][k], stats.hamiltonian_count, "{jumps:?} n={n}");
            }
        }
    }

    #[test]
    fn self_loops_have_n_cycles() {
        let budget = Budget::default();
        let a = moments_derive(&CirculantSpec::constant(&[0]).unwrap(), 1, &budget).unwrap();
        for n in 1..20 {
            assert_eq!(moments_ratio(&a, n).unwrap(), Rat::from_integer(Int::from(n)));
        }
    }

    #[test]
    fn rotation_has_one_tour() {
        let h = hamiltonian_derive(&CirculantSpec::constant(&[1]).unwrap(), &Budget::default()).unwrap();
        assert_eq!(h.recurrence.coeffs, vec![Rat::one()]);
        assert!(h.terms.iter().all(|t| t.is_one()));
    }

    #[test]
    fn state_budget_is_enforced() {
        let budget = Budget {
            states: 2,
            ..Budget::default()
        };
        let err = StateGraph::build(&CirculantSpec::constant(&[0, 1, 2]).unwrap(), Walk::Covers, 1, &budget)
            .unwrap_err();
        assert!(matches!(err, Error::StateBudget { .. }));
    }
}
