//! Exact, exponential-time QBF evaluation used as ground truth.
//!
//! Two methods with different failure modes: [`eval_recursive`] expands the
//! prefix outermost-first (bounded by the number of variables), and
//! [`eval_elimination`] eliminates innermost variables by resolution and
//! universal literal deletion (bounded by clause growth). Both refuse rather
//! than guess when a limit is hit.

mod psi;

pub use psi::{build_psi, check_psi_lemma, AddedClause, PsiLemmaReport, PsiResult};

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, Literal, Quantifier};
use crate::Verdict;

/// Name of the environment variable holding `"<vars>,<literals>"`.
pub const LIMITS_ENV: &str = "QRL_ORACLE_LIMITS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    /// Most prefix variables the recursive oracle will expand.
    pub max_vars: usize,
    /// Most literal occurrences the elimination oracle lets the matrix grow to.
    pub max_literals: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vars: 30,
            max_literals: 1_000_000,
        }
    }
}

impl OracleLimits {
    /// Parses `"<vars>,<literals>"`.
    pub fn parse(s: &str) -> Result<OracleLimits> {
        let bad = || Error::InvalidParams(format!("oracle limits must be \"<vars>,<literals>\", got {s:?}"));
        let (v, l) = s.split_once(',').ok_or_else(bad)?;
        Ok(OracleLimits {
            max_vars: v.trim().parse().map_err(|_| bad())?,
            max_literals: l.trim().parse().map_err(|_| bad())?,
        })
    }

    /// Defaults overridden by [`LIMITS_ENV`] when it is set.
    pub fn from_env() -> Result<OracleLimits> {
        match std::env::var(LIMITS_ENV) {
            Ok(s) => OracleLimits::parse(&s),
            Err(_) => Ok(OracleLimits::default()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OracleMethod {
    Recursive,
    Elimination,
}

impl fmt::Display for OracleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleMethod::Recursive => f.write_str("recursive"),
            OracleMethod::Elimination => f.write_str("elimination"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub value: Verdict,
    pub method: OracleMethod,
    /// Search nodes (recursive) or eliminations plus resolvents (elimination).
    pub work: u64,
}

// Clause as (positive, negative) bitmasks over prefix positions.
type Masks = (u64, u64);

/// Evaluates by Shannon expansion along the prefix.
pub fn eval_recursive(f: &Formula, limits: &OracleLimits) -> Result<OracleVerdict> {
    f.ensure_valid()?;
    let n = f.num_vars();
    if n > limits.max_vars || n > 64 {
        return Err(Error::Refused(format!(
            "{n} variables exceed the recursive oracle limit of {}",
            limits.max_vars.min(64)
        )));
    }
    let prefix = f.prefix();
    let quantifiers: Vec<Quantifier> = prefix.entries().iter().map(|e| e.1).collect();
    let mut buf: Vec<Masks> = f
        .clauses()
        .iter()
        .map(|c| {
            c.literals().iter().fold((0, 0), |(p, q), l| {
                let bit = 1u64 << (prefix.position(l.var()).expect("validated") - 1);
                if l.is_positive() {
                    (p | bit, q)
                } else {
                    (p, q | bit)
                }
            })
        })
        .collect();
    let len = buf.len();
    let mut nodes = 0;
    let value = expand(&mut buf, 0, len, 0, &quantifiers, &mut nodes);
    Ok(OracleVerdict {
        value: Verdict::from_bool(value),
        method: OracleMethod::Recursive,
        work: nodes,
    })
}

fn expand(
    buf: &mut Vec<Masks>,
    start: usize,
    end: usize,
    depth: usize,
    quantifiers: &[Quantifier],
    nodes: &mut u64,
) -> bool {
    *nodes += 1;
    if start == end {
        return true;
    }
    if buf[start..end].iter().any(|&(p, q)| p | q == 0) {
        return false;
    }
    // every clause is nonempty, so some variable at or after `depth` is unassigned
    let bit = 1u64 << depth;
    let existential = quantifiers[depth].is_existential();
    for value in [false, true] {
        let child = buf.len();
        for i in start..end {
            let (p, q) = buf[i];
            let satisfied = if value { p & bit != 0 } else { q & bit != 0 };
            if !satisfied {
                buf.push((p & !bit, q & !bit));
            }
        }
        let child_end = buf.len();
        let result = expand(buf, child, child_end, depth + 1, quantifiers, nodes);
        buf.truncate(child);
        if result == existential {
            return result;
        }
    }
    !existential
}

type RawClause = Vec<Literal>;

fn is_tautology(c: &[Literal]) -> bool {
    c.windows(2).any(|w| w[0].var() == w[1].var())
}

/// Eliminates the innermost prefix variable on raw sorted clauses.
/// Returns the number of resolvents produced.
fn eliminate_raw(
    entries: &mut Vec<(u32, Quantifier)>,
    clauses: &mut Vec<RawClause>,
) -> Result<u64> {
    let (x, q) = entries
        .pop()
        .ok_or_else(|| Error::Precondition("cannot eliminate from an empty prefix".into()))?;
    let (pos, neg) = (Literal::positive(x), Literal::negative(x));
    let mut seen: HashSet<RawClause> = HashSet::with_capacity(clauses.len());
    let mut out: Vec<RawClause> = Vec::with_capacity(clauses.len());
    let mut push = |c: RawClause, out: &mut Vec<RawClause>| {
        if seen.insert(c.clone()) {
            out.push(c);
        }
    };
    let mut resolvents = 0;
    match q {
        Quantifier::Universal => {
            for c in clauses.drain(..) {
                let has_pos = c.binary_search(&pos).is_ok();
                let has_neg = c.binary_search(&neg).is_ok();
                if has_pos && has_neg {
                    continue;
                }
                let reduced: RawClause = c.into_iter().filter(|l| l.var() != x).collect();
                push(reduced, &mut out);
            }
        }
        Quantifier::Existential => {
            let mut with_pos = Vec::new();
            let mut with_neg = Vec::new();
            for c in clauses.drain(..) {
                let has_pos = c.binary_search(&pos).is_ok();
                let has_neg = c.binary_search(&neg).is_ok();
                match (has_pos, has_neg) {
                    (true, true) => {}
                    (true, false) => with_pos.push(c),
                    (false, true) => with_neg.push(c),
                    (false, false) => push(c, &mut out),
                }
            }
            for a in &with_pos {
                for b in &with_neg {
                    let mut r: RawClause = a
                        .iter()
                        .chain(b.iter())
                        .copied()
                        .filter(|l| l.var() != x)
                        .collect();
                    r.sort_unstable();
                    r.dedup();
                    if !is_tautology(&r) {
                        resolvents += 1;
                        push(r, &mut out);
                    }
                }
            }
        }
    }
    *clauses = out;
    Ok(resolvents)
}

/// Exact elimination of the innermost variable: resolution for an
/// existential, literal deletion for a universal. Clauses tautological on the
/// variable are dropped and identical clauses merged; ids are renumbered.
pub fn eliminate_innermost(f: &Formula) -> Result<Formula> {
    let mut entries = f.prefix().entries().to_vec();
    let mut clauses: Vec<RawClause> = f.clauses().iter().map(|c| c.literals().to_vec()).collect();
    eliminate_raw(&mut entries, &mut clauses)?;
    Ok(Formula::new(crate::formula::Prefix::new(entries), clauses))
}

/// Evaluates by eliminating variables innermost-first until the prefix is empty.
pub fn eval_elimination(f: &Formula, limits: &OracleLimits) -> Result<OracleVerdict> {
    f.ensure_valid()?;
    let mut entries = f.prefix().entries().to_vec();
    let mut clauses: Vec<RawClause> = f.clauses().iter().map(|c| c.literals().to_vec()).collect();
    let mut work = 0;
    let verdict = |value: bool, work| OracleVerdict {
        value: Verdict::from_bool(value),
        method: OracleMethod::Elimination,
        work,
    };
    loop {
        if clauses.iter().any(Vec::is_empty) {
            return Ok(verdict(false, work));
        }
        if clauses.is_empty() {
            return Ok(verdict(true, work));
        }
        if entries.is_empty() {
            return Err(Error::Internal(
                "nonempty clauses left after eliminating every variable".into(),
            ));
        }
        work += 1 + eliminate_raw(&mut entries, &mut clauses)?;
        let literals: usize = clauses.iter().map(Vec::len).sum();
        if literals > limits.max_literals {
            return Err(Error::Refused(format!(
                "matrix grew to {literals} literals, above the limit of {}",
                limits.max_literals
            )));
        }
    }
}

/// Outcome of running both oracles on one formula.
#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub recursive: std::result::Result<OracleVerdict, String>,
    pub elimination: std::result::Result<OracleVerdict, String>,
}

impl OracleOutcome {
    /// The agreed verdict, or the single available one. `None` when both refused.
    pub fn verdict(&self) -> Option<Verdict> {
        match (&self.recursive, &self.elimination) {
            (Ok(a), _) => Some(a.value),
            (Err(_), Ok(b)) => Some(b.value),
            _ => None,
        }
    }

    /// Both oracles answered and the answers differ.
    pub fn disagree(&self) -> bool {
        matches!((&self.recursive, &self.elimination), (Ok(a), Ok(b)) if a.value != b.value)
    }

    /// Both oracles answered and agree.
    pub fn confirmed(&self) -> Option<Verdict> {
        match (&self.recursive, &self.elimination) {
            (Ok(a), Ok(b)) if a.value == b.value => Some(a.value),
            _ => None,
        }
    }
}

/// Runs both oracles. Malformed input and internal errors propagate;
/// refusals are recorded in the outcome.
pub fn evaluate_both(f: &Formula, limits: &OracleLimits) -> Result<OracleOutcome> {
    let keep = |r: Result<OracleVerdict>| match r {
        Ok(v) => Ok(Ok(v)),
        Err(Error::Refused(msg)) => Ok(Err(msg)),
        Err(e) => Err(e),
    };
    Ok(OracleOutcome {
        recursive: keep(eval_recursive(f, limits))?,
        elimination: keep(eval_elimination(f, limits))?,
    })
}
