//! Random families checked end to end against the exhaustive oracles.

use proptest::prelude::*;

use circperm::algebra::eval_recurrence;
use circperm::derive::{derive, oracle_permanent, verify, Options};
use circperm::extensions::{hamiltonian_derive, moments_derive};
use circperm::num::rat;
use circperm::oracle::{brute_hamiltonian, enumerate_stats, ryser_permanent, Budget};
use circperm::par::with_threads;
use circperm::spec::{adjacency_matrix, parse_spec, parse_weights};
use circperm::{CirculantSpec, Rat};

const MAX_SIZE: i64 = 13;

fn jump_set(lo: i64, hi: i64, max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::btree_set(lo..=hi, 1..=max_len).prop_map(|s| s.into_iter().collect())
}

fn text(jumps: &[i64]) -> String {
    jumps.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn check_counts(spec: &CirculantSpec) -> Result<(), TestCaseError> {
    let d = derive(spec, &Options::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(d.recurrence.order() as u128 <= d.degree_bound());
    let mut n_max = d.recurrence.base;
    while spec.size(n_max + 1) <= MAX_SIZE {
        n_max += 1;
    }
    let checks = verify(&d, n_max, &Budget::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for c in &checks {
        prop_assert!(c.passed(), "{spec} at n = {}: {:?} vs {:?}", c.n, c.recurrence, c.ryser);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn constant_families(jumps in jump_set(-2, 3, 4)) {
        check_counts(&CirculantSpec::constant(&jumps).unwrap())?;
    }

    #[test]
    fn linear_families(a in -1i64..=1, b in 0i64..=2, s in 0i64..=1) {
        let spec = parse_spec(&format!("{a},n+{b}"), Some(&format!("2n+{s}"))).unwrap();
        check_counts(&spec)?;
    }

    #[test]
    fn weighted_families(jumps in jump_set(0, 3, 3), w in proptest::collection::vec(1i64..=3, 3)) {
        let weights = parse_weights(&text(&w[..jumps.len()])).unwrap();
        let spec = CirculantSpec::constant(&jumps).unwrap().with_weights(weights).unwrap();
        check_counts(&spec)?;
    }

    #[test]
    fn cycle_moments(jumps in jump_set(-1, 2, 3)) {
        let spec = CirculantSpec::constant(&jumps).unwrap();
        let budget = Budget::default();
        let a = moments_derive(&spec, 2, &budget).unwrap();
        for n in a.n0()..=10 {
            let stats = enumerate_stats(&spec, n, 2, &budget).unwrap();
            for t in 0..=2 {
                prop_assert_eq!(
                    eval_recurrence(a.recurrence(t), n).unwrap(),
                    Rat::from_integer(stats.moment_sums[t].clone()),
                    "{} TC{} at n = {}", spec, t, n
                );
            }
        }
    }

    #[test]
    fn hamiltonian_cycles(jumps in jump_set(1, 4, 3)) {
        let spec = CirculantSpec::constant(&jumps).unwrap();
        let budget = Budget::default();
        let h = hamiltonian_derive(&spec, &budget).unwrap();
        for n in h.recurrence.base..=12 {
            prop_assert_eq!(
                eval_recurrence(&h.recurrence, n).unwrap(),
                Rat::from_integer(brute_hamiltonian(&spec, n, &budget).unwrap()),
                "{} at n = {}", spec, n
            );
        }
    }
}

#[test]
fn moment_zero_is_the_permanent() {
    let spec = CirculantSpec::constant(&[-1, 0, 2]).unwrap();
    let budget = Budget::default();
    let a = moments_derive(&spec, 0, &budget).unwrap();
    for n in a.n0()..=14 {
        let perm = oracle_permanent(&spec, n, &budget).unwrap().unwrap();
        assert_eq!(eval_recurrence(a.recurrence(0), n).unwrap(), perm);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let spec = parse_spec("0,1,3,4", None).unwrap();
    let m = adjacency_matrix(&spec, 15).unwrap();
    let one = with_threads(1, || ryser_permanent(&m).unwrap());
    let many = with_threads(4, || ryser_permanent(&m).unwrap());
    assert_eq!(one, many);
    let budget = Budget::default();
    let a = with_threads(1, || enumerate_stats(&spec, 14, 2, &budget).unwrap());
    let b = with_threads(4, || enumerate_stats(&spec, 14, 2, &budget).unwrap());
    assert_eq!(a, b);
    let d1 = with_threads(1, || derive(&spec, &Options::default()).unwrap());
    let d4 = with_threads(4, || derive(&spec, &Options::default()).unwrap());
    assert_eq!(d1.recurrence, d4.recurrence);
}

#[test]
fn reindexed_family_matches_raw_indices() {
    // n + 3 sits above the size 2n + 1, so the family is analyzed shifted
    let spec = parse_spec("0,n+3", Some("2n+1")).unwrap();
    let d = derive(&spec, &Options::default()).unwrap();
    let budget = Budget::default();
    for n in d.recurrence.base..=6 {
        if let Some(p) = oracle_permanent(&spec, n, &budget).unwrap() {
            assert_eq!(eval_recurrence(&d.recurrence, n).unwrap(), p, "n = {n}");
        }
    }
}

#[test]
fn empty_circulant_counts() {
    let spec = CirculantSpec::constant(&[2]).unwrap();
    let d = derive(&spec, &Options::default()).unwrap();
    for n in d.recurrence.base..=10 {
        assert_eq!(eval_recurrence(&d.recurrence, n).unwrap(), rat(1));
    }
}
