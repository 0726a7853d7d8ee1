//! Growth verdicts checked against census asymptotics.

mod common;

use common::*;
use eqfree::analysis::{census, classify_growth, GrowthClass};
use eqfree::equations::*;
use eqfree::freegroup::Letter;
use eqfree::grammar::{Grammar, Production, Symbol};
use num_bigint::BigUint;

/// Exponential verdicts need `ρ(M)/ρ(M−2) ≥ 1 + δ`; polynomial ones a
/// log-log slope within 0.35 of `k` on a late window.
fn cross_check(g: &Grammar, label: &str) -> GrowthClass {
    let verdict = classify_growth(g).unwrap();
    match verdict {
        GrowthClass::Exponential => {
            let cum = census(g, 40).unwrap().cumulative();
            for m in 30..=40 {
                let q = ratio(&cum[m], &cum[m - 2]);
                assert!(q >= 1.2, "{label}: exponential but rho({m})/rho({}) = {q:.3}", m - 2);
            }
        }
        GrowthClass::Polynomial { k } => {
            let cum = census(g, 200).unwrap().cumulative();
            let slope = loglog_slope(&cum, 100, 200);
            assert!((slope - k as f64).abs() <= 0.35, "{label}: k = {k} but slope {slope:.3}");
        }
        GrowthClass::Finite { max_len } => {
            let c = census(g, max_len + 30).unwrap();
            assert!(c.counts[max_len] > BigUint::from(0u32), "{label}: no word of length {max_len}");
            assert!(c.counts[max_len + 1..].iter().all(|x| *x == BigUint::from(0u32)), "{label}: longer words");
        }
    }
    verdict
}

#[test]
fn fixture_strata() {
    let mut seen = Vec::new();
    for (f, max_d) in [(EVEN, 8), (ODD, 5), (CYCLIC, 5)] {
        let inst = f.instance();
        for d in 1..=max_d {
            let g = degree_stratum_grammar(&inst, d).unwrap();
            if eqfree::analysis::is_empty(&g) {
                continue;
            }
            let v = cross_check(&g, &format!("{} degree {d}", f.name));
            seen.push((f.name, d, v));
        }
    }
    let get = |name: &str, d: usize| seen.iter().find(|s| s.0 == name && s.1 == d).map(|s| s.2);
    assert!(matches!(get("even", 4), Some(GrowthClass::Finite { max_len: 7 })));
    assert!(matches!(get("even", 6), Some(GrowthClass::Polynomial { k }) if k >= 1));
    assert_eq!(get("even", 8), Some(GrowthClass::Exponential));
    assert_eq!(get("odd", 2), Some(GrowthClass::Polynomial { k: 2 }));
    assert!(matches!(get("odd", 3), Some(GrowthClass::Polynomial { k }) if k >= 1));
}

#[test]
fn rank_one_subgroups_grow_polynomially() {
    for (m, k) in [(1usize, 0usize), (2, 1), (3, 1), (3, 2), (2, 3)] {
        let h = "a".repeat(m);
        let g = if k == 0 { "1".to_string() } else { "a".repeat(k) };
        let inst = eqfree::equations::Instance::parse(1, &[h.as_str()], &g).unwrap();
        for d in 1..=4 {
            let s = degree_stratum_grammar(&inst, d).unwrap();
            if eqfree::analysis::is_empty(&s) {
                continue;
            }
            let v = cross_check(&s, &format!("a^{m}, a^{k}, degree {d}"));
            let deg = v.polynomial_degree().unwrap_or(usize::MAX);
            assert!(deg <= d, "a^{m}, a^{k}, degree {d}: {v}");
        }
    }
}

#[test]
fn classic_languages() {
    let a = Symbol::T(Letter::generator(1));
    let b = Symbol::T(Letter::generator(2));
    let c = Symbol::T(Letter::inverse_of(1));
    let p = |h: usize, body: Vec<Symbol>| Production::new(h, body);
    let n = Symbol::N;
    let cases: Vec<(&str, Grammar, GrowthClass)> = vec![
        ("a*", Grammar::new(2, 1, vec![p(0, vec![]), p(0, vec![a, n(0)])], 0, true).unwrap(), GrowthClass::Polynomial { k: 1 }),
        ("{a,b}*", Grammar::new(2, 1, vec![p(0, vec![]), p(0, vec![a, n(0)]), p(0, vec![b, n(0)])], 0, true).unwrap(), GrowthClass::Exponential),
        (
            "a^n b^n",
            Grammar::new(2, 1, vec![p(0, vec![]), p(0, vec![a, n(0), b])], 0, true).unwrap(),
            GrowthClass::Polynomial { k: 1 },
        ),
        (
            "A* a* b*",
            Grammar::new(
                2,
                3,
                vec![
                    p(0, vec![n(1), n(2)]),
                    p(1, vec![]),
                    p(1, vec![a, n(1)]),
                    p(2, vec![]),
                    p(2, vec![b, n(2)]),
                    p(0, vec![c, n(0)]),
                ],
                0,
                true,
            )
            .unwrap(),
            GrowthClass::Polynomial { k: 3 },
        ),
        (
            "(a* b)*",
            Grammar::new(2, 2, vec![p(0, vec![]), p(0, vec![n(1), b, n(0)]), p(1, vec![]), p(1, vec![a, n(1)])], 0, true)
                .unwrap(),
            GrowthClass::Exponential,
        ),
        ("finite", Grammar::new(2, 1, vec![p(0, vec![a, b, a]), p(0, vec![b])], 0, true).unwrap(), GrowthClass::Finite { max_len: 3 }),
    ];
    for (name, g, expected) in cases {
        assert_eq!(cross_check(&g, name), expected, "{name}");
    }
}
