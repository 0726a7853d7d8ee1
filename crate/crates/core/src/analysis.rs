//! Grammar algorithms: emptiness, witness plans, minimum-size plans,
//! bounded-length words, exact census and growth classification.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::freegroup::{Letter, Word};
use crate::grammar::{scc, Count, DerivationPlan, Grammar, GrammarError, PlanEntry, Symbol};

/// Per-letter weights σ, indexed by letter code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeFunction {
    weights: Vec<u64>,
}

impl SizeFunction {
    pub fn uniform(rank: usize, w: u64) -> SizeFunction {
        SizeFunction { weights: vec![w; 2 * rank] }
    }

    /// Weight `w` on both letters of each listed generator, 0 elsewhere.
    pub fn counting(rank: usize, gens: &[usize]) -> SizeFunction {
        let mut f = SizeFunction::uniform(rank, 0);
        for &g in gens {
            f.set(Letter::generator(g), 1);
            f.set(Letter::inverse_of(g), 1);
        }
        f
    }

    pub fn set(&mut self, l: Letter, w: u64) {
        self.weights[l.code()] = w;
    }

    pub fn of(&self, l: Letter) -> u64 {
        self.weights[l.code()]
    }

    pub fn of_word(&self, w: &Word) -> u64 {
        w.letters().iter().map(|&l| self.of(l)).sum()
    }
}

/// Asymptotic class of a language's cumulative census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GrowthClass {
    Finite { max_len: usize },
    Polynomial { k: usize },
    Exponential,
}

impl GrowthClass {
    /// Polynomial degree with finite languages read as degree 0.
    pub fn polynomial_degree(self) -> Option<usize> {
        match self {
            GrowthClass::Finite { .. } => Some(0),
            GrowthClass::Polynomial { k } => Some(k),
            GrowthClass::Exponential => None,
        }
    }
}

impl std::fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GrowthClass::Finite { max_len } => write!(f, "Finite (max length {max_len})"),
            GrowthClass::Polynomial { k } => write!(f, "Polynomial (degree {k})"),
            GrowthClass::Exponential => write!(f, "Exponential"),
        }
    }
}

/// Exact word counts per length `0..=M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub counts: Vec<BigUint>,
}

impl Census {
    pub fn zeros(max_len: usize) -> Census {
        Census { counts: vec![BigUint::zero(); max_len + 1] }
    }

    pub fn max_len(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn cumulative(&self) -> Vec<BigUint> {
        let mut acc = BigUint::zero();
        self.counts
            .iter()
            .map(|c| {
                acc += c;
                acc.clone()
            })
            .collect()
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Two-column `length count` text.
    pub fn to_text(&self) -> String {
        self.counts.iter().enumerate().map(|(l, c)| format!("{l} {c}\n")).collect()
    }

    pub fn from_text(s: &str) -> Option<Census> {
        let mut counts = Vec::new();
        for (i, line) in s.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            let mut it = line.split_whitespace();
            let l: usize = it.next()?.parse().ok()?;
            let c: BigUint = it.next()?.parse().ok()?;
            if l != i {
                return None;
            }
            counts.push(c);
        }
        if counts.is_empty() {
            None
        } else {
            Some(Census { counts })
        }
    }

    /// Cumulative counts as a JSON array of decimal strings.
    pub fn cumulative_json(&self) -> String {
        let v: Vec<String> = self.cumulative().iter().map(|c| c.to_string()).collect();
        serde_json::to_string(&v).expect("strings serialize")
    }
}

/// The occurrence lists and counters shared by the worklist algorithms.
struct Worklist {
    occurrences: Vec<Vec<(usize, usize)>>,
    terminates: Vec<bool>,
    remaining: Vec<usize>,
}

impl Worklist {
    fn new(g: &Grammar) -> Worklist {
        let mut occurrences = vec![Vec::new(); g.nonterminal_count()];
        let mut remaining = vec![0; g.productions().len()];
        for (c, p) in g.productions().iter().enumerate() {
            for (d, s) in p.body.iter().enumerate() {
                if let Symbol::N(i) = *s {
                    occurrences[i].push((c, d));
                    remaining[c] += 1;
                }
            }
        }
        Worklist { occurrences, terminates: vec![false; g.nonterminal_count()], remaining }
    }
}

/// FIFO fixed point; returns `terminates` and the list of productions in
/// the order that first proved their head productive.
fn run_fifo(g: &Grammar) -> (Vec<bool>, Vec<usize>) {
    let mut wl = Worklist::new(g);
    let mut queue: VecDeque<usize> =
        wl.remaining.iter().enumerate().filter(|(_, &r)| r == 0).map(|(j, _)| j).collect();
    let mut list = Vec::new();
    while let Some(j) = queue.pop_front() {
        let i = g.productions()[j].head;
        if wl.terminates[i] {
            continue;
        }
        wl.terminates[i] = true;
        list.push(j);
        for &(c, _) in &wl.occurrences[i] {
            wl.remaining[c] -= 1;
            if wl.remaining[c] == 0 {
                queue.push_back(c);
            }
        }
    }
    (wl.terminates, list)
}

/// Nonterminals that derive at least one terminal word.
pub fn productive(g: &Grammar) -> Vec<bool> {
    run_fifo(g).0
}

/// Whether `L(G)` is empty.
pub fn is_empty(g: &Grammar) -> bool {
    !run_fifo(g).0[g.start()]
}

fn truncate_at_start(g: &Grammar, list: Vec<PlanEntry>) -> DerivationPlan {
    let cut = list.iter().position(|e| g.productions()[e.production].head == g.start());
    let mut entries = list;
    match cut {
        Some(k) => entries.truncate(k + 1),
        None => entries.clear(),
    }
    DerivationPlan { entries }
}

/// A plan whose replay is a word of `L(G)`.
pub fn witness_plan(g: &Grammar) -> Result<DerivationPlan, GrammarError> {
    let (terminates, list) = run_fifo(g);
    if !terminates[g.start()] {
        return Err(GrammarError::EmptyLanguage);
    }
    let list = list.into_iter().map(|production| PlanEntry { production, tau: None }).collect();
    Ok(truncate_at_start(g, list))
}

/// A plan for a word of minimum σ-size, with that size.
pub fn min_size_plan(g: &Grammar, sigma: &SizeFunction) -> Result<(DerivationPlan, u64), GrammarError> {
    let mut wl = Worklist::new(g);
    let mut size: Vec<u64> = g
        .productions()
        .iter()
        .map(|p| {
            p.body
                .iter()
                .map(|s| match *s {
                    Symbol::T(l) => sigma.of(l),
                    Symbol::N(_) => 0,
                })
                .sum()
        })
        .collect();
    let mut queue: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    for (j, &r) in wl.remaining.iter().enumerate() {
        if r == 0 {
            queue.push(Reverse((size[j], j)));
        }
    }
    let mut list = Vec::new();
    while let Some(Reverse((tau, j))) = queue.pop() {
        let i = g.productions()[j].head;
        if wl.terminates[i] {
            continue;
        }
        wl.terminates[i] = true;
        list.push(PlanEntry { production: j, tau: Some(tau) });
        for &(c, _) in &wl.occurrences[i] {
            wl.remaining[c] -= 1;
            size[c] = size[c].saturating_add(tau);
            if wl.remaining[c] == 0 {
                queue.push(Reverse((size[c], c)));
            }
        }
    }
    if !wl.terminates[g.start()] {
        return Err(GrammarError::EmptyLanguage);
    }
    let plan = truncate_at_start(g, list);
    let tau = plan.entries.last().and_then(|e| e.tau).unwrap_or(0);
    Ok((plan, tau))
}

/// For every nonterminal deriving a word of length at most `r`: the
/// minimum length and a word of that length.
pub fn bounded_words(g: &Grammar, r: usize) -> BTreeMap<usize, (usize, Word)> {
    let mut wl = Worklist::new(g);
    let n = g.nonterminal_count();
    let mut length = vec![0usize; n];
    let mut word: Vec<Vec<Letter>> = vec![Vec::new(); n];
    let mut size: Vec<usize> = g
        .productions()
        .iter()
        .map(|p| p.body.iter().filter(|s| matches!(s, Symbol::T(_))).count())
        .collect();
    let mut queue = VecDeque::new();
    for s in 0..=r {
        for j in 0..g.productions().len() {
            if wl.remaining[j] == 0 && size[j] == s {
                queue.push_back(j);
            }
        }
        while let Some(j) = queue.pop_front() {
            let p = &g.productions()[j];
            let i = p.head;
            if wl.terminates[i] {
                continue;
            }
            wl.terminates[i] = true;
            length[i] = s;
            let mut w = Vec::with_capacity(s);
            for sym in &p.body {
                match *sym {
                    Symbol::T(l) => w.push(l),
                    Symbol::N(m) => w.extend_from_slice(&word[m]),
                }
            }
            word[i] = w;
            for &(c, _) in &wl.occurrences[i] {
                wl.remaining[c] -= 1;
                size[c] += length[i];
                if wl.remaining[c] == 0 && size[c] == s {
                    queue.push_back(c);
                }
            }
        }
    }
    (0..n)
        .filter(|&i| wl.terminates[i])
        .map(|i| (i, (length[i], Word::new(std::mem::take(&mut word[i])))))
        .collect()
}

/// A trimmed grammar with ε-counts in {0,1} and an acyclic unit graph,
/// the shape on which derivation counting is exact.
struct Prepared {
    g: Grammar,
    eps: Vec<bool>,
    /// Nonterminals ordered so that unit successors come first.
    unit_order: Vec<usize>,
}

fn prepare(g: &Grammar) -> Result<Prepared, GrammarError> {
    if !g.is_unambiguous() {
        return Err(GrammarError::NotUnambiguous);
    }
    let g = g.trim();
    let n = g.nonterminal_count();
    let mut eps = vec![false; n];
    for (i, c) in g.epsilon_counts().iter().enumerate() {
        match *c {
            Count::Zero => {}
            Count::Fin(1) => eps[i] = true,
            Count::Fin(_) => return Err(GrammarError::AmbiguousEpsilon(i)),
            Count::Inf => return Err(GrammarError::DerivationCycle(i)),
        }
    }
    let mut succ = vec![Vec::new(); n];
    for p in g.productions() {
        for (t, s) in p.body.iter().enumerate() {
            if let Symbol::N(m) = *s {
                let others = p
                    .body
                    .iter()
                    .enumerate()
                    .all(|(u, o)| u == t || matches!(o, Symbol::N(x) if eps[*x]));
                if others {
                    succ[p.head].push(m);
                }
            }
        }
    }
    let comps = scc(&succ);
    let mut unit_order = Vec::with_capacity(n);
    for c in comps {
        if c.len() > 1 || succ[c[0]].contains(&c[0]) {
            return Err(GrammarError::DerivationCycle(c[0]));
        }
        unit_order.push(c[0]);
    }
    Ok(Prepared { g, eps, unit_order })
}

/// Exact per-length word counts of an unambiguous grammar.
pub fn census(g: &Grammar, max_len: usize) -> Result<Census, GrammarError> {
    let pr = prepare(g)?;
    let g = &pr.g;
    let n = g.nonterminal_count();
    if g.productions().is_empty() {
        return Ok(Census::zeros(max_len));
    }
    // per nonterminal counts by length
    let mut cnt: Vec<Vec<BigUint>> = vec![Vec::with_capacity(max_len + 1); n];
    for (i, c) in cnt.iter_mut().enumerate() {
        c.push(if pr.eps[i] { BigUint::one() } else { BigUint::zero() });
    }
    // pref[j][t][l]: ways the first t+1 symbols of production j derive length l
    let mut pref: Vec<Vec<Vec<BigUint>>> = g
        .productions()
        .iter()
        .map(|p| {
            let mut rows = Vec::with_capacity(p.body.len());
            let mut acc = true;
            for s in &p.body {
                acc = acc && matches!(s, Symbol::N(m) if pr.eps[*m]);
                let mut row = Vec::with_capacity(max_len + 1);
                row.push(if acc { BigUint::one() } else { BigUint::zero() });
                rows.push(row);
            }
            rows
        })
        .collect();
    let sym_at = |s: Symbol, l: usize, cnt: &Vec<Vec<BigUint>>| -> BigUint {
        match s {
            Symbol::T(_) => {
                if l == 1 {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            }
            Symbol::N(m) => cnt[m][l].clone(),
        }
    };
    let by_head = g.productions_by_head();
    for l in 1..=max_len {
        // known part: every symbol takes fewer than l letters, or a terminal takes all
        let mut known: Vec<BigUint> = Vec::with_capacity(g.productions().len());
        for (j, p) in g.productions().iter().enumerate() {
            let rows = &mut pref[j];
            for t in 0..p.body.len() {
                let s = p.body[t];
                let mut v = BigUint::zero();
                if t == 0 {
                    if let Symbol::T(_) = s {
                        v = sym_at(s, l, &cnt);
                    }
                } else {
                    let (before, _) = rows.split_at_mut(t);
                    let prev = &before[t - 1];
                    for a in 0..l {
                        if prev[l - a].is_zero() {
                            continue;
                        }
                        let x = sym_at(s, a, &cnt);
                        if !x.is_zero() {
                            v += &prev[l - a] * x;
                        }
                    }
                    if let Symbol::T(_) = s {
                        if !prev[0].is_zero() {
                            v += &prev[0] * sym_at(s, l, &cnt);
                        }
                    }
                }
                rows[t].push(v);
            }
            known.push(rows.last().map(|r| r[l].clone()).unwrap_or_default());
        }
        // add single-nonterminal full-length terms in unit order
        for &v in &pr.unit_order {
            let mut total = BigUint::zero();
            for &j in &by_head[v] {
                let p = &g.productions()[j];
                total += &known[j];
                for (t, s) in p.body.iter().enumerate() {
                    if let Symbol::N(m) = *s {
                        let others = p
                            .body
                            .iter()
                            .enumerate()
                            .all(|(u, o)| u == t || matches!(o, Symbol::N(x) if pr.eps[*x]));
                        if others {
                            total += &cnt[m][l];
                        }
                    }
                }
            }
            cnt[v].push(total);
        }
        // finalize prefix rows with the deferred full-length terms
        for (j, p) in g.productions().iter().enumerate() {
            let rows = &mut pref[j];
            let mut full = BigUint::zero();
            for t in 0..p.body.len() {
                match p.body[t] {
                    Symbol::T(_) => full = BigUint::zero(),
                    Symbol::N(m) => {
                        if !pr.eps[m] {
                            full = BigUint::zero();
                        }
                        if t == 0 || !rows[t - 1][0].is_zero() {
                            full += &cnt[m][l];
                        }
                    }
                }
                if !full.is_zero() {
                    rows[t][l] += &full;
                }
            }
        }
    }
    let start = g.start();
    Ok(Census { counts: cnt[start].clone() })
}

/// Polynomial/exponential verdict for an unambiguous grammar.
pub fn classify_growth(g: &Grammar) -> Result<GrowthClass, GrammarError> {
    let pr = prepare(g)?;
    let g = &pr.g;
    let n = g.nonterminal_count();
    if g.productions().is_empty() {
        return Ok(GrowthClass::Finite { max_len: 0 });
    }
    let mut succ = vec![Vec::new(); n];
    for p in g.productions() {
        for m in p.nonterminals() {
            succ[p.head].push(m);
        }
    }
    let comps = scc(&succ);
    let mut comp_of = vec![0; n];
    for (ci, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = ci;
        }
    }
    let pumping: Vec<bool> =
        comps.iter().map(|c| c.len() > 1 || succ[c[0]].contains(&c[0])).collect();
    let by_head = g.productions_by_head();

    if !pumping.iter().any(|&b| b) {
        // longest word, sinks first
        let mut longest = vec![0usize; n];
        for c in &comps {
            let v = c[0];
            longest[v] = by_head[v]
                .iter()
                .map(|&j| {
                    g.productions()[j]
                        .body
                        .iter()
                        .map(|s| match *s {
                            Symbol::T(_) => 1,
                            Symbol::N(m) => longest[m],
                        })
                        .sum()
                })
                .max()
                .unwrap_or(0);
        }
        return Ok(GrowthClass::Finite { max_len: longest[g.start()] });
    }

    // derivation trees per nonterminal, capped at 2
    let mut trees = vec![0u8; n];
    for (ci, c) in comps.iter().enumerate() {
        if pumping[ci] {
            for &v in c {
                trees[v] = 2;
            }
            continue;
        }
        let v = c[0];
        let mut total = 0u8;
        for &j in &by_head[v] {
            let mut prod = 1u8;
            for m in g.productions()[j].nonterminals() {
                prod = prod.saturating_mul(trees[m]).min(2);
            }
            total = total.saturating_add(prod).min(2);
        }
        trees[v] = total;
    }

    let mut k = vec![0usize; comps.len()];
    for (ci, c) in comps.iter().enumerate() {
        if !pumping[ci] {
            let v = c[0];
            k[ci] = by_head[v]
                .iter()
                .map(|&j| g.productions()[j].nonterminals().map(|m| k[comp_of[m]]).sum::<usize>())
                .max()
                .unwrap_or(0);
            continue;
        }
        let mut exit = 0usize;
        for &v in c {
            let mut internal = 0;
            for &j in &by_head[v] {
                let p = &g.productions()[j];
                let inside = p.nonterminals().filter(|&m| comp_of[m] == ci).count();
                internal += inside;
                if inside == 0 {
                    exit = exit.max(p.nonterminals().map(|m| k[comp_of[m]]).sum());
                } else if p.nonterminals().any(|m| comp_of[m] != ci && trees[m] != 1) {
                    return Ok(GrowthClass::Exponential);
                }
            }
            if internal != 1 {
                return Ok(GrowthClass::Exponential);
            }
        }
        k[ci] = 1 + exit;
    }
    Ok(GrowthClass::Polynomial { k: k[comp_of[g.start()]] })
}
