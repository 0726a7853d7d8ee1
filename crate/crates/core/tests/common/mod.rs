#![allow(dead_code)]

use eqfree::equations::Instance;
use eqfree::freegroup::{Letter, Word};
use eqfree::grammar::{Grammar, Production, Symbol};
use eqfree::oracle::stallings_rank;
use num_bigint::BigUint;
use rand::Rng;

/// Named instances used across the integration tests.
pub struct Fixture {
    pub name: &'static str,
    pub n: usize,
    pub basis: &'static [&'static str],
    pub element: &'static str,
}

impl Fixture {
    pub fn instance(&self) -> Instance {
        Instance::parse(self.n, self.basis, self.element).unwrap()
    }
}

/// Ideal generated by one equation of degree 4; only even degrees.
pub const EVEN: Fixture = Fixture { name: "even", n: 2, basis: &["ba", "abbA"], element: "a" };
/// Every degree from 2 on.
pub const ODD: Fixture = Fixture { name: "odd", n: 2, basis: &["b", "ababa"], element: "a" };
/// Rank-one subgroup of `F_1`.
pub const CYCLIC: Fixture = Fixture { name: "cyclic", n: 1, basis: &["aa"], element: "a" };
pub const INDEPENDENT: Fixture = Fixture { name: "independent", n: 2, basis: &["a"], element: "b" };

pub const FIXTURES: [Fixture; 4] = [EVEN, ODD, CYCLIC, INDEPENDENT];

pub fn random_reduced<R: Rng>(rng: &mut R, rank: usize, len: usize) -> Word {
    let mut v: Vec<Letter> = Vec::with_capacity(len);
    while v.len() < len {
        let l = Letter::new(rng.gen_range(1..=rank), rng.gen_bool(0.5));
        if v.last() != Some(&l.inverse()) {
            v.push(l);
        }
    }
    Word::new(v)
}

/// A random instance with `n ≤ 2`, `r ≤ 2` and words of length at most 3.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    loop {
        let n = rng.gen_range(1..=2);
        let r = rng.gen_range(1..=2);
        let basis: Vec<Word> = (0..r).map(|_| {
            let len = rng.gen_range(1..=3);
            random_reduced(rng, n, len)
        }).collect();
        if stallings_rank(n, &basis) != r {
            continue;
        }
        let len = rng.gen_range(0..=3);
        let g = random_reduced(rng, n, len);
        if let Ok(inst) = eqfree::equations::build_instance(n, &basis, &g) {
            return inst;
        }
    }
}

/// A random ε-free grammar without unit productions: every body is a
/// terminal or has two or three symbols.
pub fn random_grammar<R: Rng>(rng: &mut R, max_nonterminals: usize) -> Grammar {
    let rank = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=max_nonterminals);
    let mut prods = Vec::new();
    for head in 0..n {
        for _ in 0..rng.gen_range(0..=3) {
            let len = if rng.gen_bool(0.3) { 1 } else { rng.gen_range(2..=3) };
            let body: Vec<Symbol> = (0..len)
                .map(|_| {
                    if len == 1 || rng.gen_bool(0.4) {
                        Symbol::T(Letter::new(rng.gen_range(1..=rank), rng.gen_bool(0.5)))
                    } else {
                        Symbol::N(rng.gen_range(0..n))
                    }
                })
                .collect();
            prods.push(Production::new(head, body));
        }
    }
    Grammar::new(rank, n, prods, 0, false).unwrap()
}

/// `best[N][l]`: minimum σ-size of a word of length `l` derived from `N`,
/// by dynamic programming over lengths. Valid for grammars without ε or
/// unit productions, where every body symbol takes at least one letter.
pub fn min_sigma_table(g: &Grammar, sigma: &dyn Fn(Letter) -> u64, max_len: usize) -> Vec<Vec<Option<u64>>> {
    let n = g.nonterminal_count();
    let mut best: Vec<Vec<Option<u64>>> = vec![vec![None; max_len + 1]; n];
    fn fill(
        body: &[Symbol],
        left: usize,
        acc: u64,
        best: &[Vec<Option<u64>>],
        sigma: &dyn Fn(Letter) -> u64,
        out: &mut Option<u64>,
    ) {
        let Some((&s, rest)) = body.split_first() else {
            if left == 0 {
                *out = Some(out.map_or(acc, |o| o.min(acc)));
            }
            return;
        };
        match s {
            Symbol::T(l) => {
                if left >= 1 {
                    fill(rest, left - 1, acc + sigma(l), best, sigma, out);
                }
            }
            Symbol::N(m) => {
                for take in 1..=left.saturating_sub(rest.len()) {
                    if let Some(v) = best[m][take] {
                        fill(rest, left - take, acc + v, best, sigma, out);
                    }
                }
            }
        }
    }
    for l in 1..=max_len {
        for p in g.productions() {
            let mut out = None;
            fill(&p.body, l, 0, &best, sigma, &mut out);
            if let Some(v) = out {
                let cell = &mut best[p.head][l];
                *cell = Some(cell.map_or(v, |c| c.min(v)));
            }
        }
    }
    best
}

/// Least-squares slope of `ln ρ(M)` against `ln M` over `lo..=hi`,
/// skipping zero values.
pub fn loglog_slope(cumulative: &[BigUint], lo: usize, hi: usize) -> f64 {
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter(|&m| cumulative[m] > BigUint::from(0u32))
        .map(|m| ((m as f64).ln(), big_ln(&cumulative[m])))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let s = x.to_string();
        s.parse::<f64>().unwrap().ln()
    } else {
        let shift = bits - 900;
        let y: BigUint = x >> shift;
        y.to_string().parse::<f64>().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

pub fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    (big_ln(a) - big_ln(b)).exp()
}

/// Fixture census files live next to the tests.
pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.census.txt"))
}

pub fn regen_requested() -> bool {
    std::env::var("EQFREE_REGEN_FIXTURES").is_ok_and(|v| v == "1")
}
