//! Context-free grammars with flat production storage, size metrics,
//! trimming, derivation plans and a bounded derivation counter.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freegroup::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("production {production} references nonterminal {nonterminal} but only {count} exist")]
    NonterminalOutOfRange { production: usize, nonterminal: usize, count: usize },
    #[error("terminal {letter} outside alphabet of rank {rank}")]
    TerminalOutOfRange { letter: Letter, rank: usize },
    #[error("malformed derivation plan: {0}")]
    MalformedPlan(String),
    #[error("the language is empty")]
    EmptyLanguage,
    #[error("grammar is not marked unambiguous")]
    NotUnambiguous,
    #[error("nonterminal N{0} derives the empty word in more than one way")]
    AmbiguousEpsilon(usize),
    #[error("infinitely many derivations: epsilon or unit cycle through N{0}")]
    DerivationCycle(usize),
    #[error("alphabet mismatch: grammar rank {grammar}, automaton rank {automaton}")]
    AlphabetMismatch { grammar: usize, automaton: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    T(Letter),
    N(usize),
}

impl Symbol {
    pub fn nonterminal(self) -> Option<usize> {
        match self {
            Symbol::N(n) => Some(n),
            Symbol::T(_) => None,
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::T(l) => write!(f, "{l}"),
            Symbol::N(n) => write!(f, "N{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Production {
    pub head: usize,
    pub body: Vec<Symbol>,
}

impl Production {
    pub fn new(head: usize, body: Vec<Symbol>) -> Production {
        Production { head, body }
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = usize> + '_ {
        self.body.iter().filter_map(|s| s.nonterminal())
    }
}

/// A grammar over the signed alphabet of rank `rank`.
#[derive(Debug, Clone)]
pub struct Grammar {
    rank: usize,
    nonterminals: usize,
    productions: Vec<Production>,
    start: usize,
    unambiguous: bool,
    by_head: OnceLock<Vec<Vec<usize>>>,
    eps: OnceLock<Vec<Count>>,
}

impl Grammar {
    /// Checks every reference. `unambiguous` is a promise made by the caller.
    pub fn new(
        rank: usize,
        nonterminals: usize,
        productions: Vec<Production>,
        start: usize,
        unambiguous: bool,
    ) -> Result<Grammar, GrammarError> {
        let count = nonterminals.max(start + 1);
        for (i, p) in productions.iter().enumerate() {
            for n in std::iter::once(p.head).chain(p.nonterminals()) {
                if n >= count {
                    return Err(GrammarError::NonterminalOutOfRange { production: i, nonterminal: n, count });
                }
            }
            for s in &p.body {
                if let Symbol::T(l) = s {
                    if l.gen() > rank {
                        return Err(GrammarError::TerminalOutOfRange { letter: *l, rank });
                    }
                }
            }
        }
        Ok(Grammar::from_parts(rank, count, productions, start, unambiguous))
    }

    pub(crate) fn from_parts(
        rank: usize,
        nonterminals: usize,
        productions: Vec<Production>,
        start: usize,
        unambiguous: bool,
    ) -> Grammar {
        Grammar {
            rank,
            nonterminals,
            productions,
            start,
            unambiguous,
            by_head: OnceLock::new(),
            eps: OnceLock::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nonterminal_count(&self) -> usize {
        self.nonterminals
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_unambiguous(&self) -> bool {
        self.unambiguous
    }

    /// Same grammar, with the unambiguity promise replaced.
    pub fn with_unambiguous(mut self, flag: bool) -> Grammar {
        self.unambiguous = flag;
        self
    }

    /// Same productions, rooted at another nonterminal.
    pub fn with_start(&self, start: usize) -> Grammar {
        assert!(start < self.nonterminals);
        Grammar::from_parts(self.rank, self.nonterminals, self.productions.clone(), start, self.unambiguous)
    }

    /// Production indices grouped by head.
    pub fn productions_by_head(&self) -> &[Vec<usize>] {
        self.by_head.get_or_init(|| {
            let mut v = vec![Vec::new(); self.nonterminals];
            for (i, p) in self.productions.iter().enumerate() {
                v[p.head].push(i);
            }
            v
        })
    }

    /// `‖P‖ = Σ (1 + |body|)`.
    pub fn total_size(&self) -> usize {
        self.productions.iter().map(|p| 1 + p.body.len()).sum()
    }

    /// Maximal number of nonterminals in a body.
    pub fn ram(&self) -> usize {
        self.productions.iter().map(|p| p.nonterminals().count()).max().unwrap_or(0)
    }

    /// Number of derivations of ε from each nonterminal.
    pub fn epsilon_counts(&self) -> &[Count] {
        self.eps.get_or_init(|| epsilon_counts(self))
    }

    pub fn derives_epsilon(&self, n: usize) -> bool {
        !self.epsilon_counts()[n].is_zero()
    }

    /// Keeps productive and reachable nonterminals.
    pub fn trim(&self) -> Grammar {
        self.trim_with_map().0
    }

    /// Like [`Grammar::trim`], also returning old id → new id.
    pub fn trim_with_map(&self) -> (Grammar, Vec<Option<usize>>) {
        let productive = crate::analysis::productive(self);
        let mut map = vec![None; self.nonterminals];
        if !productive[self.start] {
            map[self.start] = Some(0);
            return (Grammar::from_parts(self.rank, 1, Vec::new(), 0, self.unambiguous), map);
        }
        let by_head = self.productions_by_head();
        let usable = |p: &Production| productive[p.head] && p.nonterminals().all(|n| productive[n]);
        let mut order = vec![self.start];
        map[self.start] = Some(0);
        let mut i = 0;
        while i < order.len() {
            let n = order[i];
            i += 1;
            for &pi in &by_head[n] {
                let p = &self.productions[pi];
                if !usable(p) {
                    continue;
                }
                for m in p.nonterminals() {
                    if map[m].is_none() {
                        map[m] = Some(order.len());
                        order.push(m);
                    }
                }
            }
        }
        let productions = self
            .productions
            .iter()
            .filter(|p| map[p.head].is_some() && usable(p))
            .map(|p| Production {
                head: map[p.head].unwrap(),
                body: p
                    .body
                    .iter()
                    .map(|s| match *s {
                        Symbol::N(n) => Symbol::N(map[n].unwrap()),
                        t => t,
                    })
                    .collect(),
            })
            .collect();
        (Grammar::from_parts(self.rank, order.len(), productions, 0, self.unambiguous), map)
    }

    /// Substitutes bottom-up along `plan` and returns the start word.
    pub fn replay(&self, plan: &DerivationPlan) -> Result<Word, GrammarError> {
        self.replay_parts(plan, |_| 1)?;
        let mut defined: Vec<Option<Vec<Letter>>> = vec![None; self.nonterminals];
        for e in &plan.entries {
            let p = &self.productions[e.production];
            let mut w = Vec::new();
            for s in &p.body {
                match *s {
                    Symbol::T(l) => w.push(l),
                    Symbol::N(n) => w.extend_from_slice(defined[n].as_ref().unwrap()),
                }
            }
            defined[p.head] = Some(w);
        }
        Ok(Word::new(defined[self.start].take().unwrap_or_default()))
    }

    /// Saturating length of the word a plan replays to.
    pub fn plan_yield_len(&self, plan: &DerivationPlan) -> Result<u64, GrammarError> {
        Ok(self.replay_parts(plan, |_| 1)?.unwrap_or(0))
    }

    /// Validates a plan and folds a saturating per-letter weight over it.
    fn replay_parts(&self, plan: &DerivationPlan, weight: impl Fn(Letter) -> u64) -> Result<Option<u64>, GrammarError> {
        let bad = |m: String| Err(GrammarError::MalformedPlan(m));
        let mut val: Vec<Option<u64>> = vec![None; self.nonterminals];
        if plan.entries.is_empty() {
            return bad("empty plan".into());
        }
        for (i, e) in plan.entries.iter().enumerate() {
            let Some(p) = self.productions.get(e.production) else {
                return bad(format!("entry {i}: no production {}", e.production));
            };
            if val[p.head].is_some() {
                return bad(format!("entry {i}: head N{} repeated", p.head));
            }
            let mut total: u64 = 0;
            for s in &p.body {
                let add = match *s {
                    Symbol::T(l) => weight(l),
                    Symbol::N(n) => match val[n] {
                        Some(v) => v,
                        None => return bad(format!("entry {i}: N{n} used before its rule")),
                    },
                };
                total = total.saturating_add(add);
            }
            val[p.head] = Some(total);
        }
        let last = &self.productions[plan.entries.last().unwrap().production];
        if last.head != self.start {
            return bad(format!("last head N{} is not the start N{}", last.head, self.start));
        }
        Ok(val[self.start])
    }

    /// One production per line: `N<id> -> sym sym ...`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for p in &self.productions {
            s.push_str(&format!("N{} ->", p.head));
            if p.body.is_empty() {
                s.push_str(" ε");
            }
            for sym in &p.body {
                s.push_str(&format!(" {sym:?}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Ordered production list, optionally annotated with sizes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationPlan {
    pub entries: Vec<PlanEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub production: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau: Option<u64>,
}

impl DerivationPlan {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn productions(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.production)
    }
}

/// A derivation count: exact (saturating) or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Count {
    #[default]
    Zero,
    Fin(u128),
    Inf,
}

impl Count {
    pub const ONE: Count = Count::Fin(1);

    pub fn of(n: u128) -> Count {
        if n == 0 {
            Count::Zero
        } else {
            Count::Fin(n)
        }
    }

    pub fn is_zero(self) -> bool {
        self == Count::Zero
    }

    pub fn add(self, o: Count) -> Count {
        match (self, o) {
            (Count::Inf, _) | (_, Count::Inf) => Count::Inf,
            (Count::Zero, x) | (x, Count::Zero) => x,
            (Count::Fin(a), Count::Fin(b)) => Count::Fin(a.saturating_add(b)),
        }
    }

    pub fn mul(self, o: Count) -> Count {
        match (self, o) {
            (Count::Zero, _) | (_, Count::Zero) => Count::Zero,
            (Count::Inf, _) | (_, Count::Inf) => Count::Inf,
            (Count::Fin(a), Count::Fin(b)) => Count::Fin(a.saturating_mul(b)),
        }
    }

    pub fn finite(self) -> Option<u128> {
        match self {
            Count::Zero => Some(0),
            Count::Fin(n) => Some(n),
            Count::Inf => None,
        }
    }
}

/// ε-derivation counts. A nullable nonterminal that reaches a cycle of
/// nullable productions has infinitely many.
fn epsilon_counts(g: &Grammar) -> Vec<Count> {
    let n = g.nonterminals;
    // nullable fixed point
    let mut nullable = vec![false; n];
    loop {
        let mut changed = false;
        for p in &g.productions {
            if !nullable[p.head] && p.body.iter().all(|s| matches!(s, Symbol::N(m) if nullable[*m])) {
                nullable[p.head] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let null_prods: Vec<&Production> = g
        .productions
        .iter()
        .filter(|p| p.body.iter().all(|s| matches!(s, Symbol::N(m) if nullable[*m])))
        .collect();
    let mut succ = vec![Vec::new(); n];
    for p in &null_prods {
        for m in p.nonterminals() {
            succ[p.head].push(m);
        }
    }
    let infinite = reaches_cycle(&succ);
    // memoized evaluation on the acyclic part
    let mut out = vec![Count::Zero; n];
    let mut done = vec![false; n];
    let mut by_head = vec![Vec::new(); n];
    for p in &null_prods {
        by_head[p.head].push(*p);
    }
    for v in 0..n {
        eval_eps(v, &by_head, &infinite, &nullable, &mut out, &mut done);
    }
    out
}

fn eval_eps(
    v: usize,
    by_head: &[Vec<&Production>],
    infinite: &[bool],
    nullable: &[bool],
    out: &mut [Count],
    done: &mut [bool],
) -> Count {
    if done[v] {
        return out[v];
    }
    let c = if !nullable[v] {
        Count::Zero
    } else if infinite[v] {
        Count::Inf
    } else {
        let mut total = Count::Zero;
        for p in &by_head[v] {
            let mut prod = Count::ONE;
            for m in p.nonterminals() {
                prod = prod.mul(eval_eps(m, by_head, infinite, nullable, out, done));
            }
            total = total.add(prod);
        }
        total
    };
    out[v] = c;
    done[v] = true;
    c
}

/// Marks every vertex from which a cycle is reachable.
pub(crate) fn reaches_cycle(succ: &[Vec<usize>]) -> Vec<bool> {
    let n = succ.len();
    let comps = scc(succ);
    let mut comp_of = vec![0; n];
    for (ci, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = ci;
        }
    }
    let mut bad = vec![false; comps.len()];
    // Tarjan order lists sinks first, so successors are settled earlier.
    for (ci, c) in comps.iter().enumerate() {
        let cyclic = c.len() > 1 || succ[c[0]].contains(&c[0]);
        let mut b = cyclic;
        for &v in c {
            for &w in &succ[v] {
                if comp_of[w] != ci && bad[comp_of[w]] {
                    b = true;
                }
            }
        }
        bad[ci] = b;
    }
    (0..n).map(|v| bad[comp_of[v]]).collect()
}

/// Strongly connected components, in reverse topological order (every
/// component appears after all components it has edges into).
pub fn scc(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    // iterative Tarjan: frames of (vertex, next edge position)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei < succ[v].len() {
                let w = succ[v][*ei];
                *ei += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut c = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        c.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(c);
                }
            }
        }
    }
    comps
}

/// Derivation counter with per-grammar preprocessing done once.
pub struct Parser<'g> {
    g: &'g Grammar,
    by_head: &'g [Vec<usize>],
    eps: &'g [Count],
    left_recursive: bool,
    /// Letters that can begin a nonempty word of each nonterminal; `None`
    /// when the alphabet is too large for the bitmask.
    first: Option<Vec<u128>>,
    /// Shortest word length of each nonterminal (`u64::MAX` if none).
    min_len: Vec<u64>,
}

impl<'g> Parser<'g> {
    pub fn new(g: &'g Grammar) -> Parser<'g> {
        let eps = g.epsilon_counts();
        let mut succ = vec![Vec::new(); g.nonterminals];
        for p in &g.productions {
            for s in &p.body {
                match *s {
                    Symbol::T(_) => break,
                    Symbol::N(m) => {
                        succ[p.head].push(m);
                        if eps[m].is_zero() {
                            break;
                        }
                    }
                }
            }
        }
        let left_recursive = reaches_cycle(&succ).iter().any(|&b| b);
        let first = (2 * g.rank <= 128).then(|| first_sets(g, eps));
        let min_len = min_lengths(g);
        Parser { g, by_head: g.productions_by_head(), eps, left_recursive, first, min_len }
    }

    fn may_start(&self, n: usize, l: Letter) -> bool {
        self.first.as_ref().is_none_or(|f| f[n] >> l.code() & 1 == 1)
    }

    pub fn is_left_recursive(&self) -> bool {
        self.left_recursive
    }

    /// Number of leftmost derivations of `w` from the start symbol.
    pub fn count(&self, w: &Word) -> Count {
        if self.left_recursive {
            self.count_spans(w.letters())
        } else {
            let letters = w.letters();
            let k = letters.len();
            // rev[r] is the letter read when r letters remain
            let mut rev = vec![Letter::generator(1); k + 1];
            for (i, &l) in letters.iter().enumerate() {
                rev[k - i] = l;
            }
            let mut memo = Memo::new(self.g.nonterminals, k);
            self.top_down(self.g.start, k, &rev, &mut memo);
            memo.get(self.g.start, k).unwrap()[0]
        }
    }

    /// Saturating count; an infinite count is an error.
    pub fn parse_count(&self, w: &Word, cap: u64) -> Result<u64, GrammarError> {
        match self.count(w) {
            Count::Inf => Err(GrammarError::DerivationCycle(self.g.start)),
            c => Ok(c.finite().unwrap().min(cap as u128) as u64),
        }
    }

    /// Counts derivations from `n` of the suffix with `k` letters left and
    /// stores them in the memo; entry `j` is the count that leaves `j` letters.
    fn top_down(&self, n: usize, k: usize, rev: &[Letter], memo: &mut Memo) {
        if memo.get(n, k).is_some() {
            return;
        }
        let mut out = vec![Count::Zero; k + 1];
        let mut cur = vec![Count::Zero; k + 1];
        let mut nxt = vec![Count::Zero; k + 1];
        for &pi in &self.by_head[n] {
            cur.iter_mut().for_each(|c| *c = Count::Zero);
            cur[k] = Count::ONE;
            let mut hi = k;
            let mut alive = true;
            for s in &self.g.productions[pi].body {
                nxt.iter_mut().for_each(|c| *c = Count::Zero);
                let mut any = false;
                match *s {
                    Symbol::T(l) => {
                        for r in 1..=hi {
                            if !cur[r].is_zero() && rev[r] == l {
                                nxt[r - 1] = nxt[r - 1].add(cur[r]);
                                any = true;
                            }
                        }
                    }
                    Symbol::N(m) => {
                        for r in 0..=hi {
                            if cur[r].is_zero() {
                                continue;
                            }
                            if (r as u64) < self.min_len[m] {
                                continue;
                            }
                            if r == 0 || !self.may_start(m, rev[r]) {
                                let e = self.eps[m];
                                if !e.is_zero() {
                                    nxt[r] = nxt[r].add(cur[r].mul(e));
                                    any = true;
                                }
                                continue;
                            }
                            self.top_down(m, r, rev, memo);
                            let sub = memo.get(m, r).unwrap();
                            for (j, &c) in sub.iter().enumerate() {
                                if !c.is_zero() {
                                    nxt[j] = nxt[j].add(cur[r].mul(c));
                                    any = true;
                                }
                            }
                        }
                    }
                }
                std::mem::swap(&mut cur, &mut nxt);
                if !any {
                    alive = false;
                    break;
                }
                hi = (0..=hi).rev().find(|&r| !cur[r].is_zero()).unwrap_or(0);
            }
            if alive {
                for (o, c) in out.iter_mut().zip(&cur) {
                    *o = o.add(*c);
                }
            }
        }
        memo.set(n, k, out);
    }

    /// Bottom-up span counting, valid for any grammar.
    fn count_spans(&self, w: &[Letter]) -> Count {
        let len = w.len();
        let nt = self.g.nonterminals;
        // table[n][i][j] for j > i; empty spans use eps
        let mut table = vec![vec![vec![Count::Zero; len + 1]; len + 1]; nt];
        let mut unit: Vec<Vec<(usize, Count)>> = vec![Vec::new(); nt];
        for p in &self.g.productions {
            let syms = &p.body;
            for (t, s) in syms.iter().enumerate() {
                if let Symbol::N(m) = *s {
                    let mut c = Count::ONE;
                    for (u, o) in syms.iter().enumerate() {
                        if u != t {
                            c = c.mul(match *o {
                                Symbol::T(_) => Count::Zero,
                                Symbol::N(x) => self.eps[x],
                            });
                        }
                    }
                    if !c.is_zero() {
                        unit[p.head].push((m, c));
                    }
                }
            }
        }
        let succ: Vec<Vec<usize>> = unit.iter().map(|v| v.iter().map(|&(m, _)| m).collect()).collect();
        let comps = scc(&succ);
        for span in 1..=len {
            for i in 0..=len - span {
                let j = i + span;
                // part that uses only strictly shorter spans (current entry is still zero)
                let mut c = vec![Count::Zero; nt];
                for p in &self.g.productions {
                    let v = self.body_count(&p.body, i, j, w, &table);
                    c[p.head] = c[p.head].add(v);
                }
                let mut x = vec![Count::Zero; nt];
                for comp in &comps {
                    let cyclic = comp.len() > 1 || succ[comp[0]].contains(&comp[0]);
                    let mut vals: Vec<Count> = comp
                        .iter()
                        .map(|&v| {
                            let mut s = c[v];
                            for &(m, k) in &unit[v] {
                                s = s.add(k.mul(x[m]));
                            }
                            s
                        })
                        .collect();
                    if cyclic && vals.iter().any(|v| !v.is_zero()) {
                        vals.iter_mut().for_each(|v| *v = Count::Inf);
                    }
                    for (&v, val) in comp.iter().zip(vals) {
                        x[v] = val;
                    }
                }
                for v in 0..nt {
                    table[v][i][j] = x[v];
                }
            }
        }
        if len == 0 {
            self.eps[self.g.start]
        } else {
            table[self.g.start][0][len]
        }
    }

    fn body_count(&self, body: &[Symbol], i: usize, j: usize, w: &[Letter], table: &[Vec<Vec<Count>>]) -> Count {
        // ways[k]: prefix of the body derives w[i..k]
        let mut ways = vec![Count::Zero; j + 1];
        ways[i] = Count::ONE;
        for s in body {
            let mut nxt = vec![Count::Zero; j + 1];
            for a in i..=j {
                if ways[a].is_zero() {
                    continue;
                }
                match *s {
                    Symbol::T(l) => {
                        if a < j && w[a] == l {
                            nxt[a + 1] = nxt[a + 1].add(ways[a]);
                        }
                    }
                    Symbol::N(m) => {
                        nxt[a] = nxt[a].add(ways[a].mul(self.eps[m]));
                        for b in a + 1..=j {
                            if a == i && b == j {
                                continue;
                            }
                            let t = table[m][a][b];
                            if !t.is_zero() {
                                nxt[b] = nxt[b].add(ways[a].mul(t));
                            }
                        }
                    }
                }
            }
            ways = nxt;
        }
        ways[j]
    }

    /// Counts derivations of every word of length `0..=max_len` over the
    /// grammar's alphabet. Words sharing a suffix share memo entries.
    pub fn sweep(&self, max_len: usize) -> SweepReport {
        use rayon::prelude::*;
        let letters: Vec<Letter> = Letter::alphabet(self.g.rank).collect();
        if self.left_recursive || max_len == 0 || letters.is_empty() {
            let mut rep = SweepReport::default();
            let mut stack = vec![Vec::new()];
            while let Some(w) = stack.pop() {
                let word = Word::new(w.clone());
                rep.record(&word, self.count(&word));
                if w.len() < max_len {
                    for &l in &letters {
                        let mut v = w.clone();
                        v.push(l);
                        stack.push(v);
                    }
                }
            }
            return rep;
        }
        let mut root = SweepReport::default();
        root.record(&Word::empty(), self.eps[self.g.start]);
        let parts: Vec<SweepReport> = letters
            .par_iter()
            .map(|&last| {
                let mut rep = SweepReport::default();
                let mut rev = vec![Letter::generator(1); max_len + 1];
                let mut memo = Memo::new(self.g.nonterminals, max_len);
                rev[1] = last;
                self.sweep_dfs(1, max_len, &letters, &mut rev, &mut memo, &mut rep);
                rep
            })
            .collect();
        for p in parts {
            root.merge(p);
        }
        root
    }

    fn sweep_dfs(
        &self,
        depth: usize,
        max_len: usize,
        letters: &[Letter],
        rev: &mut Vec<Letter>,
        memo: &mut Memo,
        rep: &mut SweepReport,
    ) {
        memo.clear_level(depth);
        self.top_down(self.g.start, depth, rev, memo);
        let c = memo.get(self.g.start, depth).unwrap()[0];
        if c != Count::Zero && c != Count::ONE {
            let w: Word = (1..=depth).rev().map(|r| rev[r]).collect();
            rep.record(&w, c);
        } else {
            rep.words += 1;
            rep.members += (c == Count::ONE) as u64;
        }
        if depth < max_len {
            for &l in letters {
                rev[depth + 1] = l;
                self.sweep_dfs(depth + 1, max_len, letters, rev, memo, rep);
            }
        }
    }
}

struct Memo {
    levels: Vec<Vec<Option<Vec<Count>>>>,
    touched: Vec<Vec<usize>>,
}

impl Memo {
    fn new(nonterminals: usize, max_len: usize) -> Memo {
        Memo { levels: vec![vec![None; nonterminals]; max_len + 1], touched: vec![Vec::new(); max_len + 1] }
    }

    fn get(&self, n: usize, k: usize) -> Option<&[Count]> {
        self.levels[k][n].as_deref()
    }

    fn set(&mut self, n: usize, k: usize, v: Vec<Count>) {
        self.levels[k][n] = Some(v);
        self.touched[k].push(n);
    }

    fn clear_level(&mut self, k: usize) {
        for n in self.touched[k].drain(..) {
            self.levels[k][n] = None;
        }
    }
}

fn min_lengths(g: &Grammar) -> Vec<u64> {
    let mut len = vec![u64::MAX; g.nonterminals];
    loop {
        let mut changed = false;
        for p in &g.productions {
            let mut total: u64 = 0;
            for s in &p.body {
                total = total.saturating_add(match *s {
                    Symbol::T(_) => 1,
                    Symbol::N(m) => len[m],
                });
            }
            if total < len[p.head] {
                len[p.head] = total;
                changed = true;
            }
        }
        if !changed {
            return len;
        }
    }
}

/// FIRST sets as bitmasks over letter codes.
fn first_sets(g: &Grammar, eps: &[Count]) -> Vec<u128> {
    let mut first = vec![0u128; g.nonterminals];
    loop {
        let mut changed = false;
        for p in &g.productions {
            let mut add = 0u128;
            for s in &p.body {
                match *s {
                    Symbol::T(l) => {
                        add |= 1 << l.code();
                        break;
                    }
                    Symbol::N(m) => {
                        add |= first[m];
                        if eps[m].is_zero() {
                            break;
                        }
                    }
                }
            }
            if first[p.head] | add != first[p.head] {
                first[p.head] |= add;
                changed = true;
            }
        }
        if !changed {
            return first;
        }
    }
}

/// Outcome of an exhaustive derivation-count sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub words: u64,
    pub members: u64,
    /// Words with two or more derivations (at most 16 kept).
    pub ambiguous: Vec<Word>,
    pub ambiguous_total: u64,
    pub infinite: u64,
}

impl SweepReport {
    fn record(&mut self, w: &Word, c: Count) {
        self.words += 1;
        match c {
            Count::Zero => {}
            Count::Fin(1) => self.members += 1,
            Count::Fin(_) => {
                self.members += 1;
                self.ambiguous_total += 1;
                if self.ambiguous.len() < 16 {
                    self.ambiguous.push(w.clone());
                }
            }
            Count::Inf => {
                self.members += 1;
                self.infinite += 1;
                self.ambiguous_total += 1;
                if self.ambiguous.len() < 16 {
                    self.ambiguous.push(w.clone());
                }
            }
        }
    }

    fn merge(&mut self, o: SweepReport) {
        self.words += o.words;
        self.members += o.members;
        self.ambiguous_total += o.ambiguous_total;
        self.infinite += o.infinite;
        for w in o.ambiguous {
            if self.ambiguous.len() < 16 {
                self.ambiguous.push(w);
            }
        }
    }

    pub fn violations(&self) -> u64 {
        self.ambiguous_total
    }
}

/// Number of leftmost derivations of `w`, saturating at `cap`.
pub fn parse_count(g: &Grammar, w: &Word, cap: u64) -> Result<u64, GrammarError> {
    Parser::new(g).parse_count(w, cap)
}
