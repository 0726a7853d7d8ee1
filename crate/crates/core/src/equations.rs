//! Equations in one variable over a finitely generated subgroup of a free
//! group: dependence, witnesses, degree strata, minimum degree and growth.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{self, GrowthClass, SizeFunction};
use crate::automata::{cyclically_reduced_degree_dfa, intersect, nonempty_reduced_dfa, reduced_dfa};
use crate::freegroup::{Homomorphism, Letter, Word, WordError};
use crate::grammar::{DerivationPlan, Grammar, GrammarError, Production, Symbol};
use crate::kernel_grammar::kernel_grammar;
use crate::oracle::{self, HardInstance};

/// Default cap on the length of witness words expanded from plans.
pub const DEFAULT_MAX_WITNESS_LEN: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquationError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("the subgroup needs at least one generator")]
    EmptyBasis,
    #[error("generator h{0} is trivial")]
    TrivialGenerator(usize),
    #[error("the {given} words generate a subgroup of rank {rank}, not a basis")]
    NotABasis { given: usize, rank: usize },
    #[error("the element is independent of the subgroup: no nontrivial equation exists")]
    Independent,
}

/// A subgroup basis `h_1..h_r` of `F_n` with an element `g`, and the
/// evaluation map `φ_g : F(h_1..h_r, x) → F_n`.
#[derive(Debug)]
pub struct Instance {
    n: usize,
    basis: Vec<Word>,
    element: Word,
    phi: Homomorphism,
    ideal: OnceLock<Grammar>,
    nonempty: OnceLock<Grammar>,
    strata: Mutex<HashMap<usize, Arc<Grammar>>>,
}

/// Validates the data and checks that `H` is a free basis.
pub fn build_instance(n: usize, basis: &[Word], element: &Word) -> Result<Instance, EquationError> {
    if basis.is_empty() {
        return Err(EquationError::EmptyBasis);
    }
    for w in basis.iter().chain(std::iter::once(element)) {
        w.check_rank(n)?;
    }
    let basis: Vec<Word> = basis.iter().map(Word::reduce).collect();
    if let Some(i) = basis.iter().position(Word::is_empty) {
        return Err(EquationError::TrivialGenerator(i + 1));
    }
    let rank = oracle::stallings_rank(n, &basis);
    if rank != basis.len() {
        return Err(EquationError::NotABasis { given: basis.len(), rank });
    }
    let element = element.reduce();
    let mut images = basis.clone();
    images.push(element.clone());
    let phi = Homomorphism::new(basis.len() + 1, n, images)?;
    Ok(Instance {
        n,
        basis,
        element,
        phi,
        ideal: OnceLock::new(),
        nonempty: OnceLock::new(),
        strata: Mutex::new(HashMap::new()),
    })
}

impl Instance {
    /// Parses ambient words (see [`Word::parse_ambient`]).
    pub fn parse(n: usize, basis: &[&str], element: &str) -> Result<Instance, EquationError> {
        let h = basis.iter().map(|s| Word::parse_ambient(s, n)).collect::<Result<Vec<_>, _>>()?;
        build_instance(n, &h, &Word::parse_ambient(element, n)?)
    }

    pub fn from_hard(h: &HardInstance) -> Result<Instance, EquationError> {
        build_instance(h.rank, &h.basis, &h.element)
    }

    pub fn ambient_rank(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn element(&self) -> &Word {
        &self.element
    }

    pub fn phi(&self) -> &Homomorphism {
        &self.phi
    }

    /// Number of subgroup generators `r`.
    pub fn r(&self) -> usize {
        self.basis.len()
    }

    /// Generator index of the variable in the equation alphabet.
    pub fn variable(&self) -> usize {
        self.r() + 1
    }

    /// Rank of the equation alphabet, `r + 1`.
    pub fn equation_rank(&self) -> usize {
        self.r() + 1
    }

    /// `L = ‖φ_g‖`.
    pub fn norm(&self) -> usize {
        self.phi.norm()
    }

    pub fn degree(&self, w: &Word) -> usize {
        w.degree(&[self.variable()])
    }

    pub fn parse_equation(&self, s: &str) -> Result<Word, WordError> {
        Word::parse_equation(s, self.r())
    }

    pub fn render(&self, w: &Word) -> String {
        w.to_equation_string(self.r())
    }

    pub fn evaluate(&self, w: &Word) -> Word {
        self.phi.evaluate_unchecked(w.letters())
    }

    fn nonempty_reduced(&self) -> Result<&Grammar, EquationError> {
        if let Some(g) = self.nonempty.get() {
            return Ok(g);
        }
        let g = intersect(ideal_grammar(self), &nonempty_reduced_dfa(self.equation_rank()))?;
        Ok(self.nonempty.get_or_init(|| g))
    }
}

/// Grammar of every word over `h_i, x` (and inverses) evaluating to 1.
pub fn ideal_grammar(inst: &Instance) -> &Grammar {
    inst.ideal.get_or_init(|| kernel_grammar(&inst.phi))
}

/// The ideal restricted to nonempty reduced words.
pub fn nonempty_reduced_ideal(inst: &Instance) -> Result<&Grammar, EquationError> {
    inst.nonempty_reduced()
}

/// Expands a plan when its word has at most `cap` letters.
pub fn expand_plan(g: &Grammar, plan: &DerivationPlan, cap: u64) -> Result<Option<Word>, GrammarError> {
    if g.plan_yield_len(plan)? > cap {
        return Ok(None);
    }
    g.replay(plan).map(Some)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationReport {
    pub dependent: bool,
    pub witness_plan: Option<DerivationPlan>,
    pub witness_word: Option<Word>,
    pub d_min: Option<usize>,
    /// Plan and word (when small) for an equation of degree `d_min`.
    pub d_min_plan: Option<DerivationPlan>,
    pub d_min_word: Option<Word>,
}

/// Decides whether `g` satisfies a nontrivial equation over `H`.
pub fn analyze_dependence(inst: &Instance, max_witness_len: u64) -> Result<EquationReport, EquationError> {
    let g = inst.nonempty_reduced()?;
    if analysis::is_empty(g) {
        return Ok(EquationReport {
            dependent: false,
            witness_plan: None,
            witness_word: None,
            d_min: None,
            d_min_plan: None,
            d_min_word: None,
        });
    }
    let plan = analysis::witness_plan(g)?;
    let word = expand_plan(g, &plan, max_witness_len)?;
    let (dplan, d) = min_degree_plan(inst)?;
    let dword = expand_plan(g, &dplan, max_witness_len)?;
    Ok(EquationReport {
        dependent: true,
        witness_plan: Some(plan),
        witness_word: word,
        d_min: Some(d),
        d_min_plan: Some(dplan),
        d_min_word: dword,
    })
}

fn min_degree_plan(inst: &Instance) -> Result<(DerivationPlan, usize), EquationError> {
    let g = inst.nonempty_reduced()?;
    let sigma = SizeFunction::counting(inst.equation_rank(), &[inst.variable()]);
    match analysis::min_size_plan(g, &sigma) {
        Ok((plan, tau)) => Ok((plan, tau as usize)),
        Err(GrammarError::EmptyLanguage) => Err(EquationError::Independent),
        Err(e) => Err(e.into()),
    }
}

/// Minimum degree of a nontrivial equation.
pub fn min_degree(inst: &Instance) -> Result<usize, EquationError> {
    min_degree_plan(inst).map(|(_, d)| d)
}

/// Cyclically reduced words of the ideal with exactly `d` variable
/// letters. For `d = 0` the empty word is excluded.
pub fn degree_stratum_grammar(inst: &Instance, d: usize) -> Result<Arc<Grammar>, EquationError> {
    if let Some(g) = inst.strata.lock().unwrap().get(&d) {
        return Ok(Arc::clone(g));
    }
    let mut dfa = cyclically_reduced_degree_dfa(inst.equation_rank(), inst.variable(), d);
    if d == 0 {
        dfa = dfa.reject_empty();
    }
    let g = Arc::new(intersect(ideal_grammar(inst), &dfa)?);
    inst.strata.lock().unwrap().insert(d, Arc::clone(&g));
    Ok(g)
}

/// Whether an equation of degree `d` exists, with a plan for one.
pub fn has_degree_d(inst: &Instance, d: usize) -> Result<(bool, Option<DerivationPlan>), EquationError> {
    let g = degree_stratum_grammar(inst, d)?;
    if analysis::is_empty(&g) {
        return Ok((false, None));
    }
    Ok((true, Some(analysis::witness_plan(&g)?)))
}

/// Growth class of the number of cyclically reduced degree-`d` equations.
pub fn growth_of_degree(inst: &Instance, d: usize) -> Result<GrowthClass, EquationError> {
    Ok(analysis::classify_growth(&*degree_stratum_grammar(inst, d)?)?)
}

/// Reduced words conjugate to words of `L(G)`, via
/// `S' → l S' l⁻¹ | S` intersected with reduced words.
pub fn saturate_conjugation(g: &Grammar, m: usize) -> Result<Grammar, GrammarError> {
    let s = g.nonterminal_count();
    let mut productions = g.productions().to_vec();
    for l in Letter::alphabet(m) {
        productions.push(Production::new(s, vec![Symbol::T(l), Symbol::N(s), Symbol::T(l.inverse())]));
    }
    productions.push(Production::new(s, vec![Symbol::N(g.start())]));
    let sat = Grammar::new(m, s + 1, productions, s, false)?;
    Ok(intersect(&sat, &reduced_dfa(m))?.with_unambiguous(false))
}

/// Classification of one degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DegreeClass {
    NotInDg,
    Finite { max_len: usize },
    Polynomial { k: usize },
    Exponential,
}

impl From<GrowthClass> for DegreeClass {
    fn from(g: GrowthClass) -> DegreeClass {
        match g {
            GrowthClass::Finite { max_len } => DegreeClass::Finite { max_len },
            GrowthClass::Polynomial { k } => DegreeClass::Polynomial { k },
            GrowthClass::Exponential => DegreeClass::Exponential,
        }
    }
}

/// All degrees `d ≥ from` with `d ≡ parity (mod 2)` have exponential growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailClass {
    pub parity: usize,
    pub from: usize,
}

/// Serializes a degree map as `[{"degree": d, "class": ...}, ...]`.
mod degree_entries {
    use super::DegreeClass;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        degree: usize,
        #[serde(flatten)]
        class: DegreeClass,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<usize, DegreeClass>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = map.iter().map(|(&degree, &class)| Entry { degree, class }).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, DegreeClass>, D::Error> {
        Ok(Vec::<Entry>::deserialize(d)?.into_iter().map(|e| (e.degree, e.class)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgPartitionReport {
    pub bound: usize,
    #[serde(with = "degree_entries")]
    pub per_degree: BTreeMap<usize, DegreeClass>,
    /// Present only when `r ≥ 2`.
    pub certified_tail: Option<Vec<TailClass>>,
    pub note: String,
}

impl DgPartitionReport {
    /// Whether `d` is certified exponential by the tail.
    pub fn tail_covers(&self, d: usize) -> bool {
        self.certified_tail
            .as_ref()
            .is_some_and(|t| t.iter().any(|c| d % 2 == c.parity && d >= c.from))
    }
}

/// Classifies degrees `1..=bound` and certifies exponential degrees beyond.
pub fn partition_dg(inst: &Instance, bound: usize) -> Result<DgPartitionReport, EquationError> {
    let per: Vec<(usize, DegreeClass)> = (1..=bound)
        .into_par_iter()
        .map(|d| {
            let g = degree_stratum_grammar(inst, d)?;
            if analysis::is_empty(&g) {
                return Ok((d, DegreeClass::NotInDg));
            }
            Ok((d, analysis::classify_growth(&g)?.into()))
        })
        .collect::<Result<_, EquationError>>()?;
    let per_degree: BTreeMap<usize, DegreeClass> = per.into_iter().collect();
    let found: Vec<usize> = per_degree.iter().filter(|(_, c)| **c != DegreeClass::NotInDg).map(|(d, _)| *d).collect();
    let (certified_tail, note) = if inst.r() >= 2 {
        let mut tail = Vec::new();
        for parity in 0..2 {
            let from = found
                .iter()
                .flat_map(|a| found.iter().map(move |b| a + b))
                .filter(|s| s % 2 == parity)
                .min();
            if let Some(from) = from {
                tail.push(TailClass { parity, from });
            }
        }
        let note = format!(
            "degrees above {bound} outside the certified tail are undecided; deciding them needs normal generators of the ideal"
        );
        (Some(tail), note)
    } else {
        (None, "rank-one subgroup: every nonempty stratum grows polynomially; no tail certificate".to_string())
    };
    Ok(DgPartitionReport { bound, per_degree, certified_tail, note })
}
