//! Ground truth independent of the grammar pipeline: subgroup rank by
//! Stallings folding, exhaustive kernel censuses, and a generator for a
//! family of instances whose equations all have large degree.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use thiserror::Error;

use crate::analysis::Census;
use crate::freegroup::{push_reduced, Homomorphism, Letter, Word};

/// Default cap on the number of enumerated words.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration needs about {needed} words, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("alphabet of rank {0} is too large for packed enumeration")]
    AlphabetTooLarge(usize),
}

/// Rank of the subgroup of `F_n` generated by `words`.
pub fn stallings_rank(_n: usize, words: &[Word]) -> usize {
    let mut g = FoldingGraph::wedge(words);
    g.fold();
    g.rank()
}

/// A labelled graph with a base vertex 0. Edges `(u, gen, v)` read `a_gen`
/// from `u` to `v`.
#[derive(Debug, Clone)]
pub struct FoldingGraph {
    parent: Vec<usize>,
    edges: Vec<(usize, usize, usize)>,
}

impl FoldingGraph {
    /// One loop at the base vertex per nontrivial reduced word.
    pub fn wedge(words: &[Word]) -> FoldingGraph {
        let mut parent = vec![0];
        let mut edges = Vec::new();
        for w in words {
            let w = w.reduce();
            if w.is_empty() {
                continue;
            }
            let mut cur = 0;
            for (i, &l) in w.letters().iter().enumerate() {
                let next = if i + 1 == w.len() {
                    0
                } else {
                    parent.push(parent.len());
                    parent.len() - 1
                };
                if l.is_inverse() {
                    edges.push((next, l.gen(), cur));
                } else {
                    edges.push((cur, l.gen(), next));
                }
                cur = next;
            }
        }
        FoldingGraph { parent, edges }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Merges until no vertex has two equally labelled edges in the same
    /// direction.
    pub fn fold(&mut self) {
        loop {
            let mut changed = false;
            let mut out: HashMap<(usize, usize), usize> = HashMap::new();
            let mut inc: HashMap<(usize, usize), usize> = HashMap::new();
            for k in 0..self.edges.len() {
                let (u, g, v) = self.edges[k];
                let (u, v) = (self.find(u), self.find(v));
                if let Some(&t) = out.get(&(u, g)) {
                    let (a, b) = (self.find(t), self.find(v));
                    if a != b {
                        self.parent[a.max(b)] = a.min(b);
                        changed = true;
                    }
                } else {
                    out.insert((u, g), v);
                }
                let (u, v) = (self.find(u), self.find(v));
                if let Some(&s) = inc.get(&(v, g)) {
                    let (a, b) = (self.find(s), self.find(u));
                    if a != b {
                        self.parent[a.max(b)] = a.min(b);
                        changed = true;
                    }
                } else {
                    inc.insert((v, g), u);
                }
            }
            if !changed {
                break;
            }
        }
        let mut set = std::collections::HashSet::new();
        for k in 0..self.edges.len() {
            let (u, g, v) = self.edges[k];
            set.insert((self.find(u), g, self.find(v)));
        }
        self.edges = set.into_iter().collect();
        self.edges.sort_unstable();
    }

    pub fn vertex_count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&v| self.find(v) == v).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `|E| − |V| + 1`; meaningful after [`FoldingGraph::fold`].
    pub fn rank(&mut self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }
}

/// Which words a census counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    AllWords,
    Reduced,
    CyclicallyReduced,
}

/// Exact census of `{w : φ(w) = 1}` restricted by mode and, optionally, by
/// degree with respect to the last source generator.
///
/// Cyclically reduced censuses (with or without degree) and unfiltered
/// censuses are computed by meet in the middle, so the budget bounds the
/// number of half-length words; other combinations enumerate every word.
pub fn brute_census(
    phi: &Homomorphism,
    max_len: usize,
    mode: Mode,
    degree: Option<usize>,
    budget: u128,
) -> Result<Census, OracleError> {
    if degree.is_some() && mode != Mode::CyclicallyReduced {
        return brute_census_plain(phi, max_len, mode, degree, budget);
    }
    let mut counts = vec![0u128; max_len + 1];
    let mitm = Mitm::new(phi, max_len, mode, degree, budget)?;
    mitm.join(|len, xc, n| {
        if degree.is_none_or(|d| d == xc) {
            counts[len] += n;
        }
    });
    Ok(Census { counts: counts.into_iter().map(BigUint::from).collect() })
}

/// The same census by direct length-lexicographic enumeration.
pub fn brute_census_plain(
    phi: &Homomorphism,
    max_len: usize,
    mode: Mode,
    degree: Option<usize>,
    budget: u128,
) -> Result<Census, OracleError> {
    let m = phi.source_rank();
    let needed = (2 * m as u128).saturating_pow(max_len as u32);
    if needed > budget {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }
    let var = [m];
    let mut counts = vec![0u128; max_len + 1];
    let letters: Vec<Letter> = Letter::alphabet(m).collect();
    let mut word = Vec::with_capacity(max_len);
    fn rec(
        phi: &Homomorphism,
        word: &mut Vec<Letter>,
        letters: &[Letter],
        max_len: usize,
        mode: Mode,
        degree: Option<usize>,
        var: &[usize],
        counts: &mut [u128],
    ) {
        let w = Word::new(word.clone());
        let ok_mode = match mode {
            Mode::AllWords => true,
            Mode::Reduced => w.is_reduced(),
            Mode::CyclicallyReduced => w.is_cyclically_reduced(),
        };
        if ok_mode && degree.is_none_or(|d| w.degree(var) == d) && phi.evaluate_unchecked(word).is_empty() {
            counts[word.len()] += 1;
        }
        if word.len() == max_len {
            return;
        }
        for &l in letters {
            if mode != Mode::AllWords && word.last() == Some(&l.inverse()) {
                continue;
            }
            word.push(l);
            rec(phi, word, letters, max_len, mode, degree, var, counts);
            word.pop();
        }
    }
    rec(phi, &mut word, &letters, max_len, mode, degree, &var, &mut counts);
    Ok(Census { counts: counts.into_iter().map(BigUint::from).collect() })
}

/// Minimum degree of a nontrivial kernel word of length at most `max_len`.
pub fn brute_min_degree(phi: &Homomorphism, max_len: usize, budget: u128) -> Result<Option<usize>, OracleError> {
    let mitm = Mitm::new(phi, max_len, Mode::CyclicallyReduced, None, budget)?;
    let mut best: Option<usize> = None;
    mitm.join(|len, xc, n| {
        if len > 0 && n > 0 {
            best = Some(best.map_or(xc, |b| b.min(xc)));
        }
    });
    Ok(best)
}

#[derive(Clone, Copy)]
struct Half {
    key: u64,
    word: u64,
    len: u8,
    xc: u8,
    first: u8,
    last: u8,
}

const NONE: u8 = u8::MAX;

/// Half-length tables for meet-in-the-middle joins.
struct Mitm<'a> {
    phi: &'a Homomorphism,
    max_len: usize,
    mode: Mode,
    /// by half length: entries sorted by image hash, and by inverse image hash
    by_image: Vec<Vec<Half>>,
    by_inverse: Vec<Vec<Half>>,
}

fn hash_letters(ls: &[Letter]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    ls.hash(&mut h);
    h.finish()
}

fn unpack(word: u64, len: u8) -> Vec<Letter> {
    (0..len).map(|i| Letter::from_code(((word >> (4 * i as u64)) & 0xf) as usize)).collect()
}

impl<'a> Mitm<'a> {
    fn new(
        phi: &'a Homomorphism,
        max_len: usize,
        mode: Mode,
        degree: Option<usize>,
        budget: u128,
    ) -> Result<Mitm<'a>, OracleError> {
        let m = phi.source_rank();
        if 2 * m > 16 {
            return Err(OracleError::AlphabetTooLarge(m));
        }
        let half = max_len.div_ceil(2);
        let needed = (2 * m as u128).saturating_pow(half as u32);
        if needed > budget || half > 16 {
            return Err(OracleError::BudgetExceeded { needed, budget });
        }
        let mut by_image = vec![Vec::new(); half + 1];
        let mut by_inverse = vec![Vec::new(); half + 1];
        let letters: Vec<Letter> = Letter::alphabet(m).collect();
        let cap = degree.unwrap_or(usize::MAX);
        // depth-first; image stacks kept per depth
        let mut stack: Vec<(u64, u8, u8, Vec<Letter>)> = vec![(0, 0, 0, Vec::new())];
        while let Some((word, len, xc, image)) = stack.pop() {
            let inv: Vec<Letter> = image.iter().rev().map(|l| l.inverse()).collect();
            let first = if len == 0 { NONE } else { (word & 0xf) as u8 };
            let last = if len == 0 { NONE } else { ((word >> (4 * (len as u64 - 1))) & 0xf) as u8 };
            let h = Half { key: hash_letters(&image), word, len, xc, first, last };
            by_image[len as usize].push(h);
            by_inverse[len as usize].push(Half { key: hash_letters(&inv), ..h });
            if len as usize == half {
                continue;
            }
            for &l in &letters {
                if mode != Mode::AllWords && len > 0 && last as usize == l.inverse().code() {
                    continue;
                }
                let nxc = xc + (l.gen() == m) as u8;
                if nxc as usize > cap {
                    continue;
                }
                let mut img = image.clone();
                for &c in phi.image(l).letters() {
                    push_reduced(&mut img, c);
                }
                stack.push((word | (l.code() as u64) << (4 * len as u64), len + 1, nxc, img));
            }
        }
        for t in by_image.iter_mut().chain(by_inverse.iter_mut()) {
            t.sort_unstable_by_key(|h| h.key);
        }
        Ok(Mitm { phi, max_len, mode, by_image, by_inverse })
    }

    /// Calls `f(length, x count, number of words)` for every class of
    /// kernel words passing the mode filter.
    fn join(&self, mut f: impl FnMut(usize, usize, u128)) {
        f(0, 0, 1);
        let inv_code = |c: u8| (c ^ 1) as u8;
        for len in 1..=self.max_len {
            let hu = len.div_ceil(2);
            let hv = len / 2;
            let us = &self.by_image[hu];
            let vs = &self.by_inverse[hv];
            let (mut i, mut j) = (0, 0);
            while i < us.len() && j < vs.len() {
                let (ku, kv) = (us[i].key, vs[j].key);
                if ku < kv {
                    i += 1;
                    continue;
                }
                if kv < ku {
                    j += 1;
                    continue;
                }
                let i2 = i + us[i..].iter().take_while(|h| h.key == ku).count();
                let j2 = j + vs[j..].iter().take_while(|h| h.key == kv).count();
                // exact grouping by image
                let mut groups: HashMap<Vec<Letter>, (HashMap<(u8, u8, u8), u128>, HashMap<(u8, u8, u8), u128>)> =
                    HashMap::new();
                for u in &us[i..i2] {
                    let img = self.phi.evaluate_unchecked(&unpack(u.word, u.len));
                    *groups.entry(img.into_letters()).or_default().0.entry((u.xc, u.first, u.last)).or_default() += 1;
                }
                for v in &vs[j..j2] {
                    let img = self.phi.evaluate_unchecked(&unpack(v.word, v.len)).inverse();
                    if let Some(g) = groups.get_mut(img.letters()) {
                        *g.1.entry((v.xc, v.first, v.last)).or_default() += 1;
                    }
                }
                for (uc, vc) in groups.values() {
                    for (&(xu, fu, lu), &nu) in uc {
                        for (&(xv, fv, lv), &nv) in vc {
                            if self.mode != Mode::AllWords && hv > 0 && lu == inv_code(fv) {
                                continue;
                            }
                            if self.mode == Mode::CyclicallyReduced && len > 1 {
                                let last = if hv > 0 { lv } else { lu };
                                if fu == inv_code(last) {
                                    continue;
                                }
                            }
                            f(len, (xu + xv) as usize, nu * nv);
                        }
                    }
                }
                i = i2;
                j = j2;
            }
        }
    }
}

/// `u(y, x) = x y x² y … y x^{p+1}`.
pub fn u_word(y: Letter, x: Letter, p: usize) -> Word {
    let mut v = Vec::new();
    for e in 1..=p + 1 {
        if e > 1 {
            v.push(y);
        }
        v.extend(std::iter::repeat_n(x, e));
    }
    Word::new(v)
}

/// Data of the hard family over `F_{n+1} = ⟨a_1..a_n, b⟩`: basis
/// `h_1 = a_1`, `h_i = a_i·u(a_{i−1}, b)⁻¹`, `h' = ā_n b̄`, element `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardInstance {
    pub rank: usize,
    pub basis: Vec<Word>,
    pub element: Word,
    /// A nontrivial equation over `h_1..h_n, h', x` (variable last).
    pub equation: Word,
}

pub fn hard_instance(n: usize, p: usize) -> HardInstance {
    assert!(n >= 2 && p >= 1, "hard instances need n >= 2 and p >= 1");
    let a = Letter::generator;
    let b = Letter::generator(n + 1);
    let mut basis = vec![Word::new(vec![a(1)])];
    for i in 2..=n {
        basis.push(Word::new(vec![a(i)]).concat(&u_word(a(i - 1), b, p).inverse()));
    }
    basis.push(Word::new(vec![a(n).inverse(), b.inverse()]));
    // â_1 = h_1, â_i = h_i u(â_{i−1}, x), w = h' x â_n
    let x = Letter::generator(n + 2);
    let mut hat = Word::new(vec![Letter::generator(1)]);
    for i in 2..=n {
        let u = u_word(Letter::generator(1), x, p);
        let expanded: Vec<Letter> = u
            .letters()
            .iter()
            .flat_map(|&l| if l == x { vec![x] } else { hat.letters().to_vec() })
            .collect();
        hat = Word::new(vec![Letter::generator(i)]).concat(&Word::new(expanded));
    }
    let equation = Word::new(vec![Letter::generator(n + 1), x]).concat(&hat);
    HardInstance { rank: n + 1, basis, element: Word::new(vec![b]), equation }
}
