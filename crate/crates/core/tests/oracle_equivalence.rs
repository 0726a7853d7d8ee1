mod common;

use common::*;
use eqfree::analysis::{census, Census};
use eqfree::automata::{cyclically_reduced_dfa, intersect, nonempty_reduced_dfa, reduced_dfa};
use eqfree::equations::*;
use eqfree::freegroup::{Homomorphism, Word};
use eqfree::kernel_grammar::trivial_word_grammar;
use eqfree::oracle::*;
use num_bigint::BigUint;

const SNAPSHOT_LEN: usize = 14;

fn zero() -> BigUint {
    BigUint::from(0u32)
}

#[test]
fn trivial_word_grammar_matches_enumeration() {
    for n in 1..=3 {
        let g = trivial_word_grammar(n).unwrap();
        let identity = Homomorphism::new(n, n, (1..=n).map(|i| Word::parse_ambient(&"abc"[i - 1..i], n).unwrap()).collect()).unwrap();
        let len = if n == 3 { 6 } else { 8 };
        let brute = brute_census_plain(&identity, len, Mode::AllWords, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(census(&g, len).unwrap(), brute, "rank {n}");
    }
    let g = trivial_word_grammar(1).unwrap();
    assert_eq!(census(&g, 4).unwrap().counts[4], BigUint::from(6u32));
}

#[test]
fn fixture_ideals_match_enumeration() {
    for f in FIXTURES {
        let inst = f.instance();
        let phi = inst.phi();
        let all = census(ideal_grammar(&inst), 8).unwrap();
        assert_eq!(all, brute_census(phi, 8, Mode::AllWords, None, DEFAULT_BUDGET).unwrap(), "{} ideal", f.name);
        let reduced = intersect(ideal_grammar(&inst), &reduced_dfa(inst.equation_rank())).unwrap();
        assert_eq!(
            census(&reduced, 8).unwrap(),
            brute_census(phi, 8, Mode::Reduced, None, DEFAULT_BUDGET).unwrap(),
            "{} reduced",
            f.name
        );
        let cyc = intersect(ideal_grammar(&inst), &cyclically_reduced_dfa(inst.equation_rank())).unwrap();
        assert_eq!(
            census(&cyc, 10).unwrap(),
            brute_census(phi, 10, Mode::CyclicallyReduced, None, DEFAULT_BUDGET).unwrap(),
            "{} cyclically reduced",
            f.name
        );
        let ne = census(nonempty_reduced_ideal(&inst).unwrap(), 8).unwrap();
        let mut b = brute_census(phi, 8, Mode::Reduced, None, DEFAULT_BUDGET).unwrap();
        b.counts[0] = zero();
        assert_eq!(ne, b, "{} nonempty reduced", f.name);
    }
}

#[test]
fn fixture_strata_match_enumeration() {
    for f in FIXTURES {
        let inst = f.instance();
        for d in 0..=8 {
            let g = census(&degree_stratum_grammar(&inst, d).unwrap(), 10).unwrap();
            let mut b = brute_census(inst.phi(), 10, Mode::CyclicallyReduced, Some(d), DEFAULT_BUDGET).unwrap();
            if d == 0 {
                assert_eq!(b.counts[0], BigUint::from(1u32));
                b.counts[0] = zero();
            }
            assert_eq!(g, b, "{} stratum {d}", f.name);
        }
    }
}

#[test]
fn degree_zero_stratum_is_empty() {
    for f in FIXTURES {
        let inst = f.instance();
        let b = brute_census(inst.phi(), 10, Mode::CyclicallyReduced, Some(0), DEFAULT_BUDGET).unwrap();
        assert_eq!(b.total(), BigUint::from(1u32), "{}: only the empty word", f.name);
        assert!(!has_degree_d(&inst, 0).unwrap().0);
    }
}

#[test]
fn min_degree_matches_bounded_search() {
    for (f, len) in [(EVEN, 8), (ODD, 8), (CYCLIC, 6), (INDEPENDENT, 8)] {
        let inst = f.instance();
        let brute = brute_min_degree(inst.phi(), len, DEFAULT_BUDGET).unwrap();
        assert_eq!(brute, min_degree(&inst).ok(), "{}", f.name);
    }
}

#[test]
fn hard_instance_strata_match_enumeration() {
    let h = hard_instance(2, 1);
    let inst = Instance::from_hard(&h).unwrap();
    assert!(analyze_dependence(&inst, 1000).unwrap().dependent);
    for d in 1..=5 {
        let g = census(&degree_stratum_grammar(&inst, d).unwrap(), 9).unwrap();
        let b = brute_census(inst.phi(), 9, Mode::CyclicallyReduced, Some(d), DEFAULT_BUDGET).unwrap();
        assert_eq!(g, b, "degree {d}");
    }
    let d = min_degree(&inst).unwrap();
    let b = brute_min_degree(inst.phi(), 10, DEFAULT_BUDGET).unwrap();
    if let Some(b) = b {
        assert_eq!(b, d);
    } else {
        assert!(d >= 4);
    }
}

#[test]
fn random_homomorphisms_mitm_matches_plain() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    for _ in 0..40 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=2);
        let images: Vec<Word> = (0..m).map(|_| {
            let len = rng.gen_range(0..=3);
            random_reduced(&mut rng, n, len)
        }).collect();
        let phi = Homomorphism::new(m, n, images).unwrap();
        let len = if m == 3 { 6 } else { 7 };
        for mode in [Mode::AllWords, Mode::Reduced, Mode::CyclicallyReduced] {
            assert_eq!(
                brute_census(&phi, len, mode, None, DEFAULT_BUDGET).unwrap(),
                brute_census_plain(&phi, len, mode, None, DEFAULT_BUDGET).unwrap()
            );
        }
        let d = rng.gen_range(0..=3);
        assert_eq!(
            brute_census(&phi, len, Mode::CyclicallyReduced, Some(d), DEFAULT_BUDGET).unwrap(),
            brute_census_plain(&phi, len, Mode::CyclicallyReduced, Some(d), DEFAULT_BUDGET).unwrap()
        );
    }
}

#[test]
fn budget_guard() {
    let inst = ODD.instance();
    let err = brute_census(inst.phi(), 30, Mode::AllWords, None, 1_000).unwrap_err();
    assert!(matches!(err, OracleError::BudgetExceeded { .. }));
    assert!(brute_census_plain(inst.phi(), 12, Mode::Reduced, Some(2), 1_000).is_err());
}

fn snapshot_cases() -> Vec<(String, Instance, Option<usize>)> {
    let mut v = Vec::new();
    for (f, degrees) in [(EVEN, vec![4, 6]), (ODD, vec![2, 3]), (CYCLIC, vec![2, 4])] {
        v.push((format!("{}_cyclic", f.name), f.instance(), None));
        for d in degrees {
            v.push((format!("{}_stratum{d}", f.name), f.instance(), Some(d)));
        }
    }
    v
}

/// Snapshots hold exhaustive counts. They are rewritten only when
/// `EQFREE_REGEN_FIXTURES=1`; otherwise the grammar census must match them.
#[test]
fn census_snapshots() {
    for (name, inst, d) in snapshot_cases() {
        let path = fixture_path(&name);
        let grammar = match d {
            Some(d) => (*degree_stratum_grammar(&inst, d).unwrap()).clone(),
            None => intersect(ideal_grammar(&inst), &cyclically_reduced_dfa(inst.equation_rank()).reject_empty()).unwrap(),
        };
        let from_grammar = census(&grammar, SNAPSHOT_LEN).unwrap();
        if regen_requested() {
            let mut brute = brute_census(inst.phi(), SNAPSHOT_LEN, Mode::CyclicallyReduced, d, DEFAULT_BUDGET).unwrap();
            brute.counts[0] = zero();
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, brute.to_text()).unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing snapshot {}", path.display()));
        let stored = Census::from_text(&text).unwrap();
        assert_eq!(stored, from_grammar, "{name}");
    }
}

#[test]
fn nonempty_reduced_dfa_census() {
    let g = trivial_word_grammar(2).unwrap();
    let ne = intersect(&g, &nonempty_reduced_dfa(2)).unwrap();
    assert!(eqfree::analysis::is_empty(&ne));
}
