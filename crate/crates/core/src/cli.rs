//! Command-line front end. [`run`] never exits the process; it returns the
//! exit code and the rendered report.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{self, Census, GrowthClass};
use crate::equations::{
    self, analyze_dependence, degree_stratum_grammar, expand_plan, has_degree_d, DgPartitionReport,
    EquationError, Instance, DEFAULT_MAX_WITNESS_LEN,
};
use crate::freegroup::{Word, WordError};
use crate::grammar::{DerivationPlan, Grammar};
use crate::oracle::{self, Mode, OracleError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "eqfree", version, about = "Equations over free groups")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Read the instance from a JSON problem file.
    #[arg(long, global = true)]
    pub problem: Option<PathBuf>,
    /// Longest witness word printed in full; longer witnesses print as plans.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_WITNESS_LEN)]
    pub max_witness_len: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct InstanceArgs {
    /// Rank of the ambient free group.
    #[arg(short = 'n', long = "rank")]
    pub n: Option<usize>,
    /// Comma-separated subgroup basis.
    #[arg(short = 'H', long = "basis", allow_hyphen_values = true)]
    pub basis: Option<String>,
    /// The element g.
    #[arg(short = 'g', long = "element", allow_hyphen_values = true)]
    pub element: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusKind {
    /// All words evaluating to 1.
    Ideal,
    /// Cyclically reduced words evaluating to 1.
    Cyclic,
    /// Cyclically reduced equations of degree `--d`.
    Stratum,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dependence, a witness equation and the minimum degree.
    Analyze(InstanceArgs),
    /// Minimum degree of a nontrivial equation.
    Dmin(InstanceArgs),
    /// Whether an equation of degree d exists.
    Degree {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        d: usize,
    },
    /// Growth class of the number of degree-d equations.
    Growth {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        d: usize,
    },
    /// Classification of degrees up to a bound.
    Partition {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        bound: usize,
    },
    /// Exact counts by length.
    Census {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, value_enum)]
        kind: CensusKind,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        max_len: usize,
        /// Count by exhaustive enumeration instead of the grammar.
        #[arg(long)]
        oracle: bool,
        /// Enumeration budget for --oracle.
        #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
        budget: u128,
    },
    /// A member of the hard family with its known equation.
    Hard {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
    },
}

/// Instance description read by `--problem`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub basis: Vec<String>,
    pub element: String,
    /// Name printed for the variable (a single letter other than `h`).
    #[serde(default)]
    pub variable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessOut {
    /// Omitted when longer than the expansion cap.
    pub word: Option<String>,
    pub length: u64,
    pub degree: Option<usize>,
    /// Present when the word is omitted.
    pub plan: Option<DerivationPlan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub dependent: bool,
    pub witness: Option<WitnessOut>,
    pub d_min: Option<usize>,
    pub d_min_witness: Option<WitnessOut>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DminReport {
    pub dependent: bool,
    pub d_min: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub d: usize,
    pub nonempty: bool,
    pub witness: Option<WitnessOut>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub d: usize,
    pub growth: GrowthClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub kind: CensusKind,
    pub d: Option<usize>,
    pub max_len: usize,
    pub oracle: bool,
    pub counts: Vec<String>,
    pub cumulative: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardReport {
    pub n: usize,
    pub p: usize,
    pub rank: usize,
    pub basis: Vec<String>,
    pub element: String,
    pub equation: String,
    pub equation_degree: usize,
    pub dependent: bool,
    pub d_min: Option<usize>,
}

/// Every report the CLI can emit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Analyze(AnalyzeReport),
    Dmin(DminReport),
    Degree(DegreeReport),
    Growth(GrowthReport),
    Partition(DgPartitionReport),
    Census(CensusReport),
    Hard(HardReport),
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Equation(#[from] EquationError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl From<WordError> for CliError {
    fn from(e: WordError) -> CliError {
        CliError::Equation(e.into())
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Equation(
                EquationError::Word(_)
                | EquationError::EmptyBasis
                | EquationError::TrivialGenerator(_)
                | EquationError::NotABasis { .. },
            ) => EXIT_INVALID,
            CliError::Oracle(OracleError::BudgetExceeded { .. } | OracleError::AlphabetTooLarge(_)) => EXIT_BUDGET,
            CliError::Equation(_) => EXIT_ERROR,
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            return (code, e.to_string());
        }
    };
    let json = cli.json;
    match execute(&cli) {
        Ok((report, text)) => {
            if json {
                (EXIT_OK, serde_json::to_string_pretty(&report).expect("reports serialize") + "\n")
            } else {
                (EXIT_OK, text)
            }
        }
        Err(e) => {
            let code = e.code();
            if json {
                let v = serde_json::json!({ "error": e.to_string(), "exit_code": code });
                (code, v.to_string() + "\n")
            } else {
                (code, format!("error: {e}\n"))
            }
        }
    }
}

struct Ctx {
    inst: Instance,
    variable: char,
}

impl Ctx {
    fn render(&self, w: &Word) -> String {
        let s = self.inst.render(w);
        if self.variable == 'x' {
            return s;
        }
        s.chars()
            .map(|c| match c {
                'x' => self.variable,
                'X' => self.variable.to_ascii_uppercase(),
                c => c,
            })
            .collect()
    }

    fn witness(&self, g: &Grammar, plan: DerivationPlan, cap: u64) -> Result<WitnessOut, CliError> {
        let length = g.plan_yield_len(&plan).map_err(EquationError::from)?;
        let word = expand_plan(g, &plan, cap).map_err(EquationError::from)?;
        Ok(match word {
            Some(w) => WitnessOut {
                word: Some(self.render(&w)),
                length,
                degree: Some(self.inst.degree(&w)),
                plan: None,
            },
            None => WitnessOut { word: None, length, degree: None, plan: Some(plan) },
        })
    }
}

fn load(cli: &Cli, args: &InstanceArgs) -> Result<Ctx, CliError> {
    let pf = match &cli.problem {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<ProblemFile>(&text)
                .map_err(|e| CliError::Invalid(format!("bad problem file {}: {e}", path.display())))?
        }
        None => {
            let missing = |f: &str| CliError::Invalid(format!("missing {f} (or --problem)"));
            ProblemFile {
                n: args.n.ok_or_else(|| missing("-n"))?,
                basis: args
                    .basis
                    .as_deref()
                    .ok_or_else(|| missing("-H"))?
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .collect(),
                element: args.element.clone().ok_or_else(|| missing("-g"))?,
                variable: None,
            }
        }
    };
    let variable = match pf.variable.as_deref() {
        None => 'x',
        Some(v) => {
            let mut cs = v.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) if c.is_ascii_lowercase() && c != 'h' => c,
                _ => return Err(CliError::Invalid(format!("variable name {v:?} must be one lowercase letter other than h"))),
            }
        }
    };
    let basis: Vec<&str> = pf.basis.iter().map(String::as_str).collect();
    Ok(Ctx { inst: Instance::parse(pf.n, &basis, &pf.element)?, variable })
}

fn cumulative_strings(c: &Census) -> (Vec<String>, Vec<String>) {
    (
        c.counts.iter().map(|x| x.to_string()).collect(),
        c.cumulative().iter().map(|x| x.to_string()).collect(),
    )
}

fn witness_text(out: &mut String, label: &str, w: &WitnessOut) {
    match &w.word {
        Some(word) => {
            let _ = writeln!(out, "{label}: {word} (length {}, degree {})", w.length, w.degree.unwrap_or(0));
        }
        None => {
            let plan = w.plan.as_ref().map(|p| p.len()).unwrap_or(0);
            let _ = writeln!(out, "{label}: length {} exceeds the expansion cap; plan with {plan} steps", w.length);
        }
    }
}

fn execute(cli: &Cli) -> Result<(Report, String), CliError> {
    let cap = cli.max_witness_len;
    let mut out = String::new();
    let report = match &cli.command {
        Command::Analyze(args) => {
            let ctx = load(cli, args)?;
            let rep = analyze_dependence(&ctx.inst, cap)?;
            let g = equations::nonempty_reduced_ideal(&ctx.inst)?;
            let witness = rep.witness_plan.map(|p| ctx.witness(g, p, cap)).transpose()?;
            let d_min_witness = rep.d_min_plan.map(|p| ctx.witness(g, p, cap)).transpose()?;
            if rep.dependent {
                out.push_str("dependent\n");
                if let Some(w) = &witness {
                    witness_text(&mut out, "witness", w);
                }
                if let Some(d) = rep.d_min {
                    let _ = writeln!(out, "d_min: {d}");
                }
                if let Some(w) = &d_min_witness {
                    witness_text(&mut out, "d_min witness", w);
                }
            } else {
                out.push_str("independent\n");
            }
            Report::Analyze(AnalyzeReport { dependent: rep.dependent, witness, d_min: rep.d_min, d_min_witness })
        }
        Command::Dmin(args) => {
            let ctx = load(cli, args)?;
            match equations::min_degree(&ctx.inst) {
                Ok(d) => {
                    let _ = writeln!(out, "d_min: {d}");
                    Report::Dmin(DminReport { dependent: true, d_min: Some(d) })
                }
                Err(EquationError::Independent) => {
                    out.push_str("independent\n");
                    Report::Dmin(DminReport { dependent: false, d_min: None })
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Degree { inst, d } => {
            let ctx = load(cli, inst)?;
            let (nonempty, plan) = has_degree_d(&ctx.inst, *d)?;
            let g = degree_stratum_grammar(&ctx.inst, *d)?;
            let witness = plan.map(|p| ctx.witness(&g, p, cap)).transpose()?;
            if nonempty {
                let _ = writeln!(out, "degree {d}: nonempty");
                if let Some(w) = &witness {
                    witness_text(&mut out, "witness", w);
                }
            } else {
                let _ = writeln!(out, "degree {d}: empty");
            }
            Report::Degree(DegreeReport { d: *d, nonempty, witness })
        }
        Command::Growth { inst, d } => {
            let ctx = load(cli, inst)?;
            let growth = equations::growth_of_degree(&ctx.inst, *d)?;
            let _ = writeln!(out, "{growth}");
            Report::Growth(GrowthReport { d: *d, growth })
        }
        Command::Partition { inst, bound } => {
            let ctx = load(cli, inst)?;
            if *bound == 0 {
                return Err(CliError::Invalid("--bound must be at least 1".into()));
            }
            let rep = equations::partition_dg(&ctx.inst, *bound)?;
            for (d, c) in &rep.per_degree {
                let text = match c {
                    equations::DegreeClass::NotInDg => "no equations".to_string(),
                    equations::DegreeClass::Finite { max_len } => GrowthClass::Finite { max_len: *max_len }.to_string(),
                    equations::DegreeClass::Polynomial { k } => GrowthClass::Polynomial { k: *k }.to_string(),
                    equations::DegreeClass::Exponential => GrowthClass::Exponential.to_string(),
                };
                let _ = writeln!(out, "{d}: {text}");
            }
            if let Some(tail) = &rep.certified_tail {
                for t in tail {
                    let parity = if t.parity == 0 { "even" } else { "odd" };
                    let _ = writeln!(out, "certified exponential: every {parity} d >= {}", t.from);
                }
            }
            let _ = writeln!(out, "note: {}", rep.note);
            Report::Partition(rep)
        }
        Command::Census { inst, kind, d, max_len, oracle: use_oracle, budget } => {
            let ctx = load(cli, inst)?;
            if *kind == CensusKind::Stratum && d.is_none() {
                return Err(CliError::Invalid("--kind stratum needs --d".into()));
            }
            let census = if *use_oracle {
                let (mode, deg) = match kind {
                    CensusKind::Ideal => (Mode::AllWords, None),
                    CensusKind::Cyclic => (Mode::CyclicallyReduced, None),
                    CensusKind::Stratum => (Mode::CyclicallyReduced, *d),
                };
                let mut c = oracle::brute_census(ctx.inst.phi(), *max_len, mode, deg, *budget)?;
                if deg == Some(0) {
                    c.counts[0] = 0u32.into();
                }
                c
            } else {
                let g = match kind {
                    CensusKind::Ideal => equations::ideal_grammar(&ctx.inst).clone(),
                    CensusKind::Cyclic => crate::automata::intersect(
                        equations::ideal_grammar(&ctx.inst),
                        &crate::automata::cyclically_reduced_dfa(ctx.inst.equation_rank()),
                    )
                    .map_err(EquationError::from)?,
                    CensusKind::Stratum => (*degree_stratum_grammar(&ctx.inst, d.unwrap())?).clone(),
                };
                analysis::census(&g, *max_len).map_err(EquationError::from)?
            };
            out.push_str(&census.to_text());
            let (counts, cumulative) = cumulative_strings(&census);
            Report::Census(CensusReport {
                kind: *kind,
                d: *d,
                max_len: *max_len,
                oracle: *use_oracle,
                counts,
                cumulative,
            })
        }
        Command::Hard { n, p } => {
            if *n < 2 || *p < 1 {
                return Err(CliError::Invalid("hard instances need n >= 2 and p >= 1".into()));
            }
            let h = oracle::hard_instance(*n, *p);
            let inst = Instance::from_hard(&h)?;
            let d_min = match equations::min_degree(&inst) {
                Ok(d) => Some(d),
                Err(EquationError::Independent) => None,
                Err(e) => return Err(e.into()),
            };
            let rep = HardReport {
                n: *n,
                p: *p,
                rank: h.rank,
                basis: h.basis.iter().map(|w| w.to_ambient_string(h.rank)).collect(),
                element: h.element.to_ambient_string(h.rank),
                equation: inst.render(&h.equation),
                equation_degree: inst.degree(&h.equation),
                dependent: d_min.is_some(),
                d_min,
            };
            let _ = writeln!(out, "ambient rank: {}", rep.rank);
            for (i, b) in rep.basis.iter().enumerate() {
                let _ = writeln!(out, "h{}: {b}", i + 1);
            }
            let _ = writeln!(out, "g: {}", rep.element);
            let _ = writeln!(out, "equation: {} (degree {})", rep.equation, rep.equation_degree);
            match d_min {
                Some(d) => {
                    let _ = writeln!(out, "dependent, d_min: {d}");
                }
                None => out.push_str("independent\n"),
            }
            Report::Hard(rep)
        }
    };
    Ok((report, out))
}
