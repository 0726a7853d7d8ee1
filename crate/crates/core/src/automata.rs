//! Finite automata over signed alphabets, the regular languages of reduced
//! and cyclically reduced words, and grammar × automaton intersection.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::freegroup::{Letter, Word};
use crate::grammar::{Grammar, GrammarError, Production, Symbol};

/// An automaton with transitions `[state][letter code] -> targets`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    rank: usize,
    transitions: Vec<Vec<Vec<usize>>>,
    initial: Vec<usize>,
    finals: Vec<bool>,
    deterministic: bool,
}

impl Automaton {
    /// Builds from explicit edges `(from, letter, to)`.
    pub fn new(rank: usize, states: usize, edges: &[(usize, Letter, usize)], initial: Vec<usize>, finals: &[usize]) -> Automaton {
        let mut transitions = vec![vec![Vec::new(); 2 * rank]; states];
        for &(p, l, q) in edges {
            assert!(l.gen() <= rank && p < states && q < states);
            if !transitions[p][l.code()].contains(&q) {
                transitions[p][l.code()].push(q);
            }
        }
        let mut f = vec![false; states];
        for &q in finals {
            f[q] = true;
        }
        let mut a = Automaton { rank, transitions, initial, finals: f, deterministic: false };
        a.deterministic = a.initial.len() == 1 && a.transitions.iter().flatten().all(|t| t.len() <= 1);
        a
    }

    fn from_dfa(rank: usize, table: Vec<Vec<Option<usize>>>, initial: usize, finals: Vec<bool>) -> Automaton {
        let transitions = table.into_iter().map(|row| row.into_iter().map(|t| t.into_iter().collect()).collect()).collect();
        Automaton { rank, transitions, initial: vec![initial], finals, deterministic: true }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn step(&self, q: usize, l: Letter) -> &[usize] {
        &self.transitions[q][l.code()]
    }

    pub fn accepts(&self, w: &Word) -> bool {
        if w.check_rank(self.rank).is_err() {
            return false;
        }
        let mut cur = vec![false; self.state_count()];
        for &q in &self.initial {
            cur[q] = true;
        }
        for &l in w.letters() {
            let mut next = vec![false; self.state_count()];
            for (q, _) in cur.iter().enumerate().filter(|(_, &b)| b) {
                for &t in self.step(q, l) {
                    next[t] = true;
                }
            }
            cur = next;
        }
        cur.iter().zip(&self.finals).any(|(&a, &b)| a && b)
    }

    /// Same language minus the empty word: a fresh non-final copy of the
    /// initial states becomes the only entry point.
    pub fn reject_empty(&self) -> Automaton {
        let fresh = self.state_count();
        let mut transitions = self.transitions.clone();
        let mut row = vec![Vec::new(); 2 * self.rank];
        for &q in &self.initial {
            for (c, targets) in self.transitions[q].iter().enumerate() {
                for &t in targets {
                    if !row[c].contains(&t) {
                        row[c].push(t);
                    }
                }
            }
        }
        transitions.push(row);
        let mut finals = self.finals.clone();
        finals.push(false);
        let deterministic = transitions.iter().flatten().all(|t| t.len() <= 1);
        Automaton { rank: self.rank, transitions, initial: vec![fresh], finals, deterministic }
    }
}

/// All reduced words (ε included). States: start, one per last letter, sink.
pub fn reduced_dfa(m: usize) -> Automaton {
    let mut a = nonempty_reduced_dfa(m);
    a.finals[0] = true;
    a
}

/// Nonempty reduced words, with `2m + 2` states.
pub fn nonempty_reduced_dfa(m: usize) -> Automaton {
    let k = 2 * m;
    let sink = k + 1;
    let mut table = vec![vec![None; k]; k + 2];
    for c in 0..k {
        table[0][c] = Some(c + 1);
        table[sink][c] = Some(sink);
        for last in 0..k {
            let inv = Letter::from_code(last).inverse().code();
            table[last + 1][c] = Some(if c == inv { sink } else { c + 1 });
        }
    }
    let mut finals = vec![true; k + 2];
    finals[0] = false;
    finals[sink] = false;
    Automaton::from_dfa(m, table, 0, finals)
}

/// Cyclically reduced words (ε included), tracking first and last letter.
pub fn cyclically_reduced_dfa(m: usize) -> Automaton {
    crdfa(m, None)
}

/// Cyclically reduced words with exactly `d` letters over generator
/// `variable`. The empty word is accepted iff `d = 0`.
pub fn cyclically_reduced_degree_dfa(m: usize, variable: usize, d: usize) -> Automaton {
    crdfa(m, Some((variable, d)))
}

fn crdfa(m: usize, degree: Option<(usize, usize)>) -> Automaton {
    let k = 2 * m;
    let levels = degree.map_or(1, |(_, d)| d + 1);
    let start = 0;
    let sink = 1;
    let id = |f: usize, l: usize, c: usize| 2 + (f * k + l) * levels + c;
    let states = 2 + k * k * levels;
    let mut table = vec![vec![None; k]; states];
    let mut finals = vec![false; states];
    let is_var = |c: usize| degree.is_some_and(|(v, _)| Letter::from_code(c).gen() == v);
    let cap = degree.map_or(0, |(_, d)| d);
    for c in 0..k {
        table[sink][c] = Some(sink);
        let cnt = is_var(c) as usize;
        table[start][c] = Some(if degree.is_some() && cnt > cap { sink } else { id(c, c, cnt.min(levels - 1)) });
    }
    finals[start] = cap == 0;
    for f in 0..k {
        for l in 0..k {
            for cnt in 0..levels {
                let q = id(f, l, cnt);
                let inv_l = Letter::from_code(l).inverse().code();
                for c in 0..k {
                    let next = cnt + is_var(c) as usize;
                    table[q][c] = Some(if c == inv_l || (degree.is_some() && next > cap) {
                        sink
                    } else {
                        id(f, c, next.min(levels - 1))
                    });
                }
                let cyclic = Letter::from_code(f).inverse().code() != l;
                finals[q] = cyclic && (degree.is_none() || cnt == cap);
            }
        }
    }
    Automaton::from_dfa(m, table, start, finals)
}

#[derive(Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> BitSet {
        BitSet(vec![0; n.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.0[w] & b == 0;
        self.0[w] |= b;
        fresh
    }
    fn union_with(&mut self, o: &BitSet) -> bool {
        let mut changed = false;
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            let n = *a | *b;
            changed |= n != *a;
            *a = n;
        }
        changed
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

/// Reachability summaries: for each demanded pair `(N, p)`, the states `q`
/// such that `N` derives some `w` with `q ∈ δ(p, w)`.
struct Summaries<'a> {
    g: &'a Grammar,
    m: &'a Automaton,
    index: HashMap<(usize, usize), usize>,
    pairs: Vec<(usize, usize)>,
    reach: Vec<BitSet>,
    dependents: Vec<Vec<usize>>,
    dep_seen: HashSet<(usize, usize)>,
}

impl<'a> Summaries<'a> {
    fn compute(g: &'a Grammar, m: &'a Automaton) -> Summaries<'a> {
        let mut s = Summaries {
            g,
            m,
            index: HashMap::new(),
            pairs: Vec::new(),
            reach: Vec::new(),
            dependents: Vec::new(),
            dep_seen: HashSet::new(),
        };
        let mut queue = VecDeque::new();
        let mut queued = Vec::new();
        for &q0 in m.initial() {
            s.demand(g.start(), q0, &mut queue, &mut queued);
        }
        while let Some(pid) = queue.pop_front() {
            queued[pid] = false;
            if s.process(pid, &mut queue, &mut queued) {
                for &d in &s.dependents[pid].clone() {
                    if !queued[d] {
                        queued[d] = true;
                        queue.push_back(d);
                    }
                }
            }
        }
        s
    }

    fn demand(&mut self, n: usize, p: usize, queue: &mut VecDeque<usize>, queued: &mut Vec<bool>) -> usize {
        if let Some(&pid) = self.index.get(&(n, p)) {
            return pid;
        }
        let pid = self.pairs.len();
        self.index.insert((n, p), pid);
        self.pairs.push((n, p));
        self.reach.push(BitSet::new(self.m.state_count()));
        self.dependents.push(Vec::new());
        queued.push(true);
        queue.push_back(pid);
        pid
    }

    fn process(&mut self, pid: usize, queue: &mut VecDeque<usize>, queued: &mut Vec<bool>) -> bool {
        let (n, p) = self.pairs[pid];
        let states = self.m.state_count();
        let mut acc = BitSet::new(states);
        for &j in &self.g.productions_by_head()[n] {
            let mut cur = BitSet::new(states);
            cur.insert(p);
            for sym in &self.g.productions()[j].body {
                let mut next = BitSet::new(states);
                match *sym {
                    Symbol::T(l) => {
                        for s in cur.iter() {
                            for &t in self.m.step(s, l) {
                                next.insert(t);
                            }
                        }
                    }
                    Symbol::N(x) => {
                        for s in cur.iter() {
                            let sub = self.demand(x, s, queue, queued);
                            if self.dep_seen.insert((sub, pid)) {
                                self.dependents[sub].push(pid);
                            }
                            next.union_with(&self.reach[sub]);
                        }
                    }
                }
                cur = next;
                if cur.is_empty() {
                    break;
                }
            }
            acc.union_with(&cur);
        }
        self.reach[pid].union_with(&acc)
    }

    fn get(&self, n: usize, p: usize) -> Option<&BitSet> {
        self.index.get(&(n, p)).map(|&i| &self.reach[i])
    }
}

/// Grammar for `L(G) ∩ L(M)`, trimmed, nonterminals `N_{p→q}` plus a new
/// start symbol.
pub fn intersect(g: &Grammar, m: &Automaton) -> Result<Grammar, GrammarError> {
    if g.rank() != m.rank() {
        return Err(GrammarError::AlphabetMismatch { grammar: g.rank(), automaton: m.rank() });
    }
    let sums = Summaries::compute(g, m);
    let mut ids: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut productions = Vec::new();
    let start = 0;
    let mut next_id = 1;
    let mut id_of = |key: (usize, usize, usize), next_id: &mut usize| -> usize {
        *ids.entry(key).or_insert_with(|| {
            *next_id += 1;
            *next_id - 1
        })
    };
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut work: VecDeque<(usize, usize)> = VecDeque::new();
    for &q0 in m.initial() {
        if let Some(r) = sums.get(g.start(), q0) {
            for qf in r.iter().filter(|&q| m.is_final(q)) {
                let target = id_of((g.start(), q0, qf), &mut next_id);
                productions.push(Production::new(start, vec![Symbol::N(target)]));
            }
            if seen.insert((g.start(), q0)) {
                work.push_back((g.start(), q0));
            }
        }
    }
    while let Some((n, p)) = work.pop_front() {
        for &j in &g.productions_by_head()[n] {
            let body = &g.productions()[j].body;
            // depth-first over state sequences along the body
            let mut stack: Vec<(usize, usize, Vec<Symbol>)> = vec![(0, p, Vec::with_capacity(body.len()))];
            while let Some((pos, s, built)) = stack.pop() {
                if pos == body.len() {
                    let head = id_of((n, p, s), &mut next_id);
                    productions.push(Production::new(head, built));
                    continue;
                }
                match body[pos] {
                    Symbol::T(l) => {
                        for &t in m.step(s, l) {
                            let mut b = built.clone();
                            b.push(Symbol::T(l));
                            stack.push((pos + 1, t, b));
                        }
                    }
                    Symbol::N(x) => {
                        let Some(r) = sums.get(x, s) else { continue };
                        for t in r.iter() {
                            let mut b = built.clone();
                            b.push(Symbol::N(id_of((x, s, t), &mut next_id)));
                            stack.push((pos + 1, t, b));
                            if seen.insert((x, s)) {
                                work.push_back((x, s));
                            }
                        }
                    }
                }
            }
        }
    }
    let size: usize = productions.iter().map(|p: &Production| 1 + p.body.len()).sum();
    let bound = intersection_size_bound(g, m);
    assert!(size as u128 <= bound, "intersection size {size} exceeds bound {bound}");
    let unambiguous = g.is_unambiguous() && m.is_deterministic();
    Ok(Grammar::from_parts(g.rank(), next_id, productions, start, unambiguous).trim())
}

/// `‖P‖·|Q|^{2+2·ram} + 2·|Q₀|·|Q|` (the second term covers the new start rules).
pub fn intersection_size_bound(g: &Grammar, m: &Automaton) -> u128 {
    let q = m.state_count() as u128;
    let exp = 2 + 2 * g.ram() as u32;
    let main = (g.total_size() as u128).saturating_mul(q.saturating_pow(exp));
    main.saturating_add(2 * m.initial().len() as u128 * q)
}
