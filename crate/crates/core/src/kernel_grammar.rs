//! Unambiguous grammars for the trivial-word language of a free group and
//! for the kernel of a homomorphism between free groups.

use std::collections::HashMap;

use thiserror::Error;

use crate::freegroup::{Homomorphism, Letter, Word};
use crate::grammar::{Grammar, Production, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("rank must be at least 1")]
    RankZero,
}

/// `L(1)` over `F_n`: `S`, then `A_i`, then `Ā_i`.
pub fn trivial_word_grammar(n: usize) -> Result<Grammar, KernelError> {
    if n == 0 {
        return Err(KernelError::RankZero);
    }
    let s = 0;
    let a = |i: usize| 1 + 2 * (i - 1);
    let abar = |i: usize| 2 + 2 * (i - 1);
    let t = |gen: usize, inv: bool| Symbol::T(Letter::new(gen, inv));
    let mut prods = vec![Production::new(s, vec![])];
    for j in 1..=n {
        prods.push(Production::new(s, vec![t(j, false), Symbol::N(abar(j)), Symbol::N(s)]));
        prods.push(Production::new(s, vec![t(j, true), Symbol::N(a(j)), Symbol::N(s)]));
    }
    for i in 1..=n {
        for (head, inv) in [(a(i), false), (abar(i), true)] {
            prods.push(Production::new(head, vec![t(i, inv)]));
            for j in 1..=n {
                // a_j Ā_j X and ā_j A_j X, skipping the one that starts with the inverse target
                if !(j == i && inv) {
                    prods.push(Production::new(head, vec![t(j, false), Symbol::N(abar(j)), Symbol::N(head)]));
                }
                if !(j == i && !inv) {
                    prods.push(Production::new(head, vec![t(j, true), Symbol::N(a(j)), Symbol::N(head)]));
                }
            }
        }
    }
    Ok(Grammar::from_parts(n, 1 + 2 * n, prods, s, true))
}

/// Final segments of the images `β_k` and their inverses, deduplicated by
/// content, with `ε` at index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixTable {
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl SuffixTable {
    pub fn new(phi: &Homomorphism) -> SuffixTable {
        let mut t = SuffixTable { words: Vec::new(), index: HashMap::new() };
        t.insert(Word::empty());
        for b in phi.images() {
            for w in [b.clone(), b.inverse()] {
                for s in 0..w.len() {
                    t.insert(Word::new(w.letters()[s..].to_vec()));
                }
            }
        }
        t
    }

    fn insert(&mut self, w: Word) -> usize {
        if let Some(&i) = self.index.get(&w) {
            return i;
        }
        self.index.insert(w.clone(), self.words.len());
        self.words.push(w);
        self.words.len() - 1
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Word> {
        self.words.iter()
    }

    /// Index of `λ` minus its first letter.
    fn tail(&self, i: usize) -> usize {
        let w = &self.words[i];
        self.index[&Word::new(w.letters()[1..].to_vec())]
    }
}

/// Nonterminal kinds. `target` is the letter the symbol reduces to
/// (`a_i` for `A_i`, `ā_i` for `Ā_i`); suffixes are table indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelNonterminal {
    S { lambda: usize },
    A { target: Letter, lambda: usize, mu: usize },
}

/// The kernel grammar together with its naming data.
#[derive(Debug, Clone)]
pub struct KernelGrammar {
    pub grammar: Grammar,
    pub suffixes: SuffixTable,
    pub kinds: Vec<KernelNonterminal>,
}

impl KernelGrammar {
    /// Materializes the symbols reachable from `S^ε`, then trims.
    pub fn build(phi: &Homomorphism) -> KernelGrammar {
        let suffixes = SuffixTable::new(phi);
        let mut b = Builder::new(phi, &suffixes);
        b.id(KernelNonterminal::S { lambda: 0 });
        b.run();
        let (g, kinds) = b.finish();
        let (grammar, map) = g.trim_with_map();
        let mut new_kinds = vec![KernelNonterminal::S { lambda: 0 }; grammar.nonterminal_count()];
        for (old, m) in map.iter().enumerate() {
            if let Some(new) = m {
                new_kinds[*new] = kinds[old];
            }
        }
        KernelGrammar { grammar, suffixes, kinds: new_kinds }
    }

    /// Every `S^λ`, `A_i^{λ,μ}` and `Ā_i^{λ,μ}`, untrimmed, rooted at `S^ε`.
    pub fn build_full(phi: &Homomorphism) -> KernelGrammar {
        let suffixes = SuffixTable::new(phi);
        let mut b = Builder::new(phi, &suffixes);
        b.id(KernelNonterminal::S { lambda: 0 });
        for lambda in 0..suffixes.len() {
            b.id(KernelNonterminal::S { lambda });
        }
        for target in Letter::alphabet(phi.target_rank()) {
            for lambda in 0..suffixes.len() {
                for mu in 0..suffixes.len() {
                    b.id(KernelNonterminal::A { target, lambda, mu });
                }
            }
        }
        b.run();
        let (grammar, kinds) = b.finish();
        KernelGrammar { grammar, suffixes, kinds }
    }

    pub fn find(&self, kind: KernelNonterminal) -> Option<usize> {
        self.kinds.iter().position(|&k| k == kind)
    }
}

struct Builder<'a> {
    phi: &'a Homomorphism,
    suffixes: &'a SuffixTable,
    image_index: Vec<(usize, usize)>,
    ids: HashMap<KernelNonterminal, usize>,
    kinds: Vec<KernelNonterminal>,
    done: usize,
    productions: Vec<Production>,
}

impl<'a> Builder<'a> {
    fn new(phi: &'a Homomorphism, suffixes: &'a SuffixTable) -> Builder<'a> {
        let image_index = phi
            .images()
            .iter()
            .map(|b| (suffixes.index_of(b).unwrap(), suffixes.index_of(&b.inverse()).unwrap()))
            .collect();
        Builder {
            phi,
            suffixes,
            image_index,
            ids: HashMap::new(),
            kinds: Vec::new(),
            done: 0,
            productions: Vec::new(),
        }
    }

    fn id(&mut self, k: KernelNonterminal) -> usize {
        if let Some(&i) = self.ids.get(&k) {
            return i;
        }
        self.ids.insert(k, self.kinds.len());
        self.kinds.push(k);
        self.kinds.len() - 1
    }

    fn run(&mut self) {
        while self.done < self.kinds.len() {
            let head = self.done;
            self.done += 1;
            self.expand(head);
        }
    }

    fn push(&mut self, head: usize, body: Vec<Symbol>) {
        self.productions.push(Production::new(head, body));
    }

    fn expand(&mut self, head: usize) {
        let m = self.phi.source_rank();
        let nsuf = self.suffixes.len();
        match self.kinds[head] {
            KernelNonterminal::S { lambda: 0 } => {
                self.push(head, vec![]);
                for k in 1..=m {
                    let (fwd, inv) = self.image_index[k - 1];
                    let nf = self.id(KernelNonterminal::S { lambda: fwd });
                    let ni = self.id(KernelNonterminal::S { lambda: inv });
                    self.push(head, vec![Symbol::T(Letter::generator(k)), Symbol::N(nf)]);
                    self.push(head, vec![Symbol::T(Letter::inverse_of(k)), Symbol::N(ni)]);
                }
            }
            KernelNonterminal::S { lambda } => {
                let c = self.suffixes.get(lambda).letters()[0];
                let rest = self.suffixes.tail(lambda);
                for nu in 0..nsuf {
                    let y = self.id(KernelNonterminal::A { target: c.inverse(), lambda: rest, mu: nu });
                    let s = self.id(KernelNonterminal::S { lambda: nu });
                    self.push(head, vec![Symbol::N(y), Symbol::N(s)]);
                }
            }
            KernelNonterminal::A { target, lambda: 0, mu } => {
                for k in 1..=m {
                    let (fwd, inv) = self.image_index[k - 1];
                    let nf = self.id(KernelNonterminal::A { target, lambda: fwd, mu });
                    let ni = self.id(KernelNonterminal::A { target, lambda: inv, mu });
                    self.push(head, vec![Symbol::T(Letter::generator(k)), Symbol::N(nf)]);
                    self.push(head, vec![Symbol::T(Letter::inverse_of(k)), Symbol::N(ni)]);
                }
            }
            KernelNonterminal::A { target, lambda, mu } => {
                let c = self.suffixes.get(lambda).letters()[0];
                let rest = self.suffixes.tail(lambda);
                if c == target {
                    if rest == mu {
                        self.push(head, vec![]);
                    }
                    return;
                }
                for nu in 0..nsuf {
                    let y = self.id(KernelNonterminal::A { target: c.inverse(), lambda: rest, mu: nu });
                    let x = self.id(KernelNonterminal::A { target, lambda: nu, mu });
                    self.push(head, vec![Symbol::N(y), Symbol::N(x)]);
                }
            }
        }
    }

    fn finish(self) -> (Grammar, Vec<KernelNonterminal>) {
        let g = Grammar::from_parts(self.phi.source_rank(), self.kinds.len(), self.productions, 0, true);
        (g, self.kinds)
    }
}

/// Grammar of all source words mapped to the identity by `φ`.
pub fn kernel_grammar(phi: &Homomorphism) -> Grammar {
    KernelGrammar::build(phi).grammar
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::census;
    use crate::grammar::parse_count;

    fn amb(s: &str, n: usize) -> Word {
        Word::parse_ambient(s, n).unwrap()
    }

    #[test]
    fn trivial_grammar_membership() {
        let g = trivial_word_grammar(1).unwrap();
        assert_eq!(parse_count(&g, &amb("aA", 1), 4).unwrap(), 1);
        assert_eq!(parse_count(&g, &amb("Aa", 1), 4).unwrap(), 1);
        assert_eq!(parse_count(&g, &amb("a", 1), 4).unwrap(), 0);
        assert_eq!(census(&g, 4).unwrap().counts[4], 6u32.into());
        let g2 = trivial_word_grammar(2).unwrap();
        assert_eq!(parse_count(&g2, &amb("abBA", 2), 4).unwrap(), 1);
        assert_eq!(parse_count(&g2, &amb("abAB", 2), 4).unwrap(), 0);
        assert_eq!(g2.ram(), 2);
        assert!(trivial_word_grammar(0).is_err());
    }

    #[test]
    fn kernel_examples() {
        let id = Homomorphism::new(1, 1, vec![amb("a", 1)]).unwrap();
        let k = kernel_grammar(&id);
        assert_eq!(k.ram(), 2);
        assert_eq!(parse_count(&k, &amb("aaAA", 1), 4).unwrap(), 1);
        assert_eq!(parse_count(&k, &amb("aaA", 1), 4).unwrap(), 0);

        let zero = Homomorphism::new(1, 1, vec![Word::empty()]).unwrap();
        let kz = kernel_grammar(&zero);
        for w in ["a", "aA", "AAa", ""] {
            assert_eq!(parse_count(&kz, &amb(w, 1), 4).unwrap(), 1, "{w}");
        }

        let phi = Homomorphism::new(3, 2, vec![amb("ba", 2), amb("abbA", 2), amb("a", 2)]).unwrap();
        let kg = kernel_grammar(&phi);
        let eq = |s: &str| Word::parse_equation(s, 2).unwrap();
        assert_eq!(parse_count(&kg, &eq("Xh2xxH1xH1"), 4).unwrap(), 1);
        assert_eq!(parse_count(&kg, &eq("x"), 4).unwrap(), 0);
        assert_eq!(parse_count(&kg, &eq("h1H1"), 4).unwrap(), 1);
    }

    #[test]
    fn suffix_table_contents() {
        let phi = Homomorphism::new(3, 2, vec![amb("ba", 2), amb("abbA", 2), amb("a", 2)]).unwrap();
        let t = SuffixTable::new(&phi);
        assert_eq!(t.len(), 12);
        assert!(t.len() <= 2 * 3 * phi.norm() + 1);
        assert_eq!(t.get(0), &Word::empty());
    }
}
