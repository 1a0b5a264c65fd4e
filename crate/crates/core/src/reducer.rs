//! The reduction `ρ_z` and the decision loop built on it.
//!
//! `decide` repeatedly picks a redundant literal, applies `ρ_z`, drops prefix
//! entries of variables that no longer occur, and stops once the formula is
//! reduced. The verdict is TRUE iff no clause is left.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closure::ClosureEngine;
use crate::error::{Error, Result};
use crate::formula::{ClauseId, Formula, Literal, Quantifier};
use crate::Verdict;

/// Order in which candidate literals are scanned for redundancy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanPolicy {
    #[default]
    Ascending,
    Descending,
    SeededRandom(u64),
}

impl ScanPolicy {
    /// ASCENDING, DESCENDING and three seeded shuffles.
    pub fn standard_set() -> [ScanPolicy; 5] {
        [
            ScanPolicy::Ascending,
            ScanPolicy::Descending,
            ScanPolicy::SeededRandom(1),
            ScanPolicy::SeededRandom(2),
            ScanPolicy::SeededRandom(3),
        ]
    }
}

impl fmt::Display for ScanPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanPolicy::Ascending => f.write_str("ascending"),
            ScanPolicy::Descending => f.write_str("descending"),
            ScanPolicy::SeededRandom(s) => write!(f, "random:{s}"),
        }
    }
}

impl std::str::FromStr for ScanPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascending" | "asc" => Ok(ScanPolicy::Ascending),
            "descending" | "desc" => Ok(ScanPolicy::Descending),
            _ => s
                .strip_prefix("random:")
                .and_then(|seed| seed.parse().ok())
                .map(ScanPolicy::SeededRandom)
                .ok_or_else(|| Error::InvalidParams(format!("unknown scan policy {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub chosen: Literal,
    pub quantifier: Quantifier,
    /// Closure whose clauses were removed: `S(z)` for existential `z`, `S(¬z)` otherwise.
    pub s_set: BTreeSet<Literal>,
    /// Ids of the clauses removed by this step.
    pub covered: BTreeSet<ClauseId>,
    /// Occurrences of `z` deleted from surviving clauses (universal case only).
    pub literal_deletions: usize,
    pub size_before: usize,
    pub size_after: usize,
    /// Universal step after which some clause still contains `¬z`.
    pub complement_survives: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideStats {
    pub initial_size: usize,
    pub initial_vars: usize,
    pub steps: usize,
    pub closures: usize,
    pub closure_iterations: usize,
    pub max_closure_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub verdict: Verdict,
    pub final_clause_count: usize,
    pub stats: DecideStats,
    /// The reduced formula the loop stopped on.
    pub residue: Formula,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DecideOptions {
    pub policy: ScanPolicy,
    /// Stop with FALSE as soon as an empty clause appears.
    pub early_exit: bool,
}

/// Candidate literals in scan order: occurring variables, positive literal first.
fn scan_order(f: &Formula, policy: ScanPolicy, step: usize) -> Vec<Literal> {
    let mut vars = f.occurring_vars();
    match policy {
        ScanPolicy::Ascending => {}
        ScanPolicy::Descending => vars.reverse(),
        ScanPolicy::SeededRandom(seed) => {
            let mixed = seed ^ (step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            vars.shuffle(&mut ChaCha8Rng::seed_from_u64(mixed));
        }
    }
    vars.into_iter()
        .flat_map(|v| [Literal::positive(v), Literal::negative(v)])
        .collect()
}

fn record_closure(stats: &mut DecideStats, engine: &ClosureEngine<'_>) {
    stats.closures += 1;
    stats.closure_iterations += engine.iterations();
    stats.max_closure_iterations = stats.max_closure_iterations.max(engine.iterations());
}

fn find_with(
    engine: &mut ClosureEngine<'_>,
    order: &[Literal],
    stats: &mut DecideStats,
) -> Result<Option<Literal>> {
    for &z in order {
        engine.run(z)?;
        record_closure(stats, engine);
        if engine.covers_negation() {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

/// First redundant literal in `policy` order, or `None` when `f` is reduced.
pub fn find_redundant(f: &Formula, policy: ScanPolicy) -> Result<Option<Literal>> {
    let mut engine = ClosureEngine::new(f);
    find_with(&mut engine, &scan_order(f, policy, 0), &mut DecideStats::default())
}

pub fn is_reduced(f: &Formula) -> Result<bool> {
    Ok(find_redundant(f, ScanPolicy::Ascending)?.is_none())
}

/// Drops prefix entries of variables without occurrences.
pub fn prune_prefix(f: &Formula) -> Formula {
    f.prune_prefix()
}

/// `ρ_z(Φ)`. Requires `z` to be redundant. The prefix is left untouched.
pub fn apply_rho(f: &Formula, z: Literal) -> Result<Formula> {
    let mut engine = ClosureEngine::new(f);
    rho_with(&mut engine, z, &mut DecideStats::default()).map(|(g, _)| g)
}

fn rho_with(
    engine: &mut ClosureEngine<'_>,
    z: Literal,
    stats: &mut DecideStats,
) -> Result<(Formula, ReductionStep)> {
    let f = engine.formula();
    let quantifier = f
        .quantifier(z.var())
        .ok_or_else(|| Error::Malformed(format!("variable {} is not bound", z.var())))?;
    if !f.occurs(z.var()) {
        return Err(Error::Precondition(format!(
            "variable {} does not occur in any clause",
            z.var()
        )));
    }
    if engine.pivot() != Some(z) {
        engine.run(z)?;
        record_closure(stats, engine);
    }
    if !engine.covers_negation() {
        return Err(Error::Precondition(format!("literal {z:?} is not redundant")));
    }
    let universal = quantifier == Quantifier::Universal;
    if universal {
        engine.run(!z)?;
        record_closure(stats, engine);
    }

    let result = engine.result();
    let g = f.derive(
        f.prefix().clone(),
        |p, _| !engine.is_covered(p),
        |c| {
            if universal {
                c.literals().iter().copied().filter(|&l| l != z).collect()
            } else {
                c.literals().to_vec()
            }
        },
    );
    let literal_deletions = if universal {
        f.occurrences(z)
            .iter()
            .filter(|&&p| !engine.is_covered(p as usize))
            .count()
    } else {
        0
    };
    let complement_survives = universal && !g.occurrences(!z).is_empty();
    let step = ReductionStep {
        chosen: z,
        quantifier,
        s_set: result.s_set,
        covered: result.covered,
        literal_deletions,
        size_before: f.size(),
        size_after: g.size(),
        complement_survives,
    };
    if step.size_after >= step.size_before {
        return Err(Error::Internal(format!(
            "reduction by {z:?} did not shrink the formula ({} -> {})",
            step.size_before, step.size_after
        )));
    }
    Ok((g, step))
}

pub fn decide(f: &Formula, policy: ScanPolicy) -> Result<ReductionTrace> {
    decide_with(
        f,
        DecideOptions {
            policy,
            early_exit: false,
        },
    )
}

/// Runs the reduction loop to a reduced formula.
///
/// The structural bounds (strict size decrease, step count at most the
/// initial size, closure convergence, FALSE after any empty clause) are
/// checked on every run and reported as [`Error::Internal`].
pub fn decide_with(f: &Formula, options: DecideOptions) -> Result<ReductionTrace> {
    f.ensure_valid()?;
    let mut stats = DecideStats {
        initial_size: f.size(),
        initial_vars: f.num_vars(),
        ..DecideStats::default()
    };
    let mut current = f.clone();
    let mut steps = Vec::new();
    let mut saw_empty = current.has_empty_clause();

    loop {
        if options.early_exit && current.has_empty_clause() {
            break;
        }
        let order = scan_order(&current, options.policy, steps.len());
        let mut engine = ClosureEngine::new(&current);
        let Some(z) = find_with(&mut engine, &order, &mut stats)? else {
            break;
        };
        let (next, mut step) = rho_with(&mut engine, z, &mut stats)?;
        drop(engine);
        let next = next.prune_prefix();
        step.size_after = next.size();
        if step.size_after >= step.size_before {
            return Err(Error::Internal(format!(
                "step {} did not shrink the formula",
                steps.len() + 1
            )));
        }
        steps.push(step);
        if steps.len() > stats.initial_size {
            return Err(Error::Internal(format!(
                "{} steps exceed the initial size {}",
                steps.len(),
                stats.initial_size
            )));
        }
        saw_empty |= next.has_empty_clause();
        current = next;
    }

    if stats.max_closure_iterations > 2 * stats.initial_vars + 1 {
        return Err(Error::Internal(format!(
            "closure needed {} iterations with {} variables",
            stats.max_closure_iterations, stats.initial_vars
        )));
    }
    let final_clause_count = current.num_clauses();
    let verdict = Verdict::from_bool(final_clause_count == 0);
    if saw_empty && verdict == Verdict::True {
        return Err(Error::Internal(
            "an empty clause disappeared during reduction".into(),
        ));
    }
    stats.steps = steps.len();
    Ok(ReductionTrace {
        steps,
        verdict,
        final_clause_count,
        stats,
        residue: current,
    })
}
