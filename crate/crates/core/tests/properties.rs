mod support;

use torsionlab::verify::DEFAULT_SEED;

#[test]
fn ring_axioms() {
    support::ring_axioms(DEFAULT_SEED).unwrap();
}

#[test]
fn grading() {
    support::grading(DEFAULT_SEED).unwrap();
}

#[test]
fn reduction_confluence() {
    support::reduction_confluence(DEFAULT_SEED).unwrap();
}

#[test]
fn decomposability_matches_brute_force() {
    support::decomposability_vs_brute_force().unwrap();
}

#[test]
fn parallel_and_sequential_agree() {
    support::parallel_determinism().unwrap();
}

#[test]
fn other_seeds_pass_too() {
    for seed in [1u64, 2, 3] {
        support::ring_axioms(seed).unwrap();
        support::reduction_confluence(seed).unwrap();
    }
}
