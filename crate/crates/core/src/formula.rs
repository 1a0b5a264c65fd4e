//! Prenex CNF formulas: literals, the quantifier prefix, clauses and the
//! literal-occurrence index.
//!
//! A [`Formula`] is immutable once built. Every transformation in the crate
//! produces a new value; surviving clauses keep their [`ClauseId`] so that
//! traces can refer back to clauses of the original input.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest variable index accepted anywhere in the crate.
///
/// Per-literal tables are dense, so the bound keeps a hostile header from
/// turning into a multi-gigabyte allocation.
pub const MAX_VAR: u32 = 1 << 20;

/// A literal `x^a`: variable index plus polarity (`a = 1` is `x`, `a = 0` is `¬x`).
///
/// Encoded as `2·var + a`, so ordering is by variable first and the negative
/// literal sorts before the positive one.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(u32);

impl Literal {
    pub fn new(var: u32, positive: bool) -> Literal {
        assert!((1..=MAX_VAR).contains(&var), "variable index {var} out of range");
        Literal(var << 1 | positive as u32)
    }

    pub fn positive(var: u32) -> Literal {
        Literal::new(var, true)
    }

    pub fn negative(var: u32) -> Literal {
        Literal::new(var, false)
    }

    /// Parses a signed DIMACS integer. Returns `None` for `0` and out-of-range indices.
    pub fn from_dimacs(value: i64) -> Option<Literal> {
        let var = value.unsigned_abs();
        if var == 0 || var > MAX_VAR as u64 {
            return None;
        }
        Some(Literal::new(var as u32, value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.is_positive() {
            self.var() as i64
        } else {
            -(self.var() as i64)
        }
    }

    #[inline]
    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 1
    }

    /// The polarity bit `a` of `x^a`.
    #[inline]
    pub fn polarity(self) -> u8 {
        (self.0 & 1) as u8
    }

    #[inline]
    pub fn negate(self) -> Literal {
        Literal(self.0 ^ 1)
    }

    /// Dense index usable for per-literal tables.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub(crate) fn from_code(code: usize) -> Literal {
        Literal(code as u32)
    }
}

/// Free-function form of [`Literal::negate`].
pub fn negate(u: Literal) -> Literal {
    u.negate()
}

impl std::ops::Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        self.negate()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "¬x{}", self.var())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quantifier {
    #[serde(rename = "a")]
    Universal,
    #[serde(rename = "e")]
    Existential,
}

impl Quantifier {
    /// QDIMACS letter: `a` or `e`.
    pub fn letter(self) -> char {
        match self {
            Quantifier::Universal => 'a',
            Quantifier::Existential => 'e',
        }
    }

    pub fn from_letter(c: char) -> Option<Quantifier> {
        match c {
            'a' => Some(Quantifier::Universal),
            'e' => Some(Quantifier::Existential),
            _ => None,
        }
    }

    pub fn is_existential(self) -> bool {
        self == Quantifier::Existential
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Universal => f.write_str("∀"),
            Quantifier::Existential => f.write_str("∃"),
        }
    }
}

/// Quantifier prefix, outermost entry first. Positions are 1-based.
#[derive(Clone, Debug, Default)]
pub struct Prefix {
    entries: Vec<(u32, Quantifier)>,
    // var -> 1-based position of its first entry, 0 when unbound
    index: Vec<u32>,
}

impl PartialEq for Prefix {
    fn eq(&self, other: &Prefix) -> bool {
        self.entries == other.entries
    }
}

impl Eq for Prefix {}

impl Prefix {
    /// Builds a prefix without checking for duplicates; see [`Formula::validate`].
    pub fn new(entries: Vec<(u32, Quantifier)>) -> Prefix {
        let max_var = entries.iter().map(|&(v, _)| v).max().unwrap_or(0);
        let mut index = vec![0u32; max_var as usize + 1];
        for (i, &(var, _)) in entries.iter().enumerate() {
            if index[var as usize] == 0 {
                index[var as usize] = i as u32 + 1;
            }
        }
        Prefix { entries, index }
    }

    pub fn entries(&self) -> &[(u32, Quantifier)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based position of `var`, if bound.
    #[inline]
    pub fn position(&self, var: u32) -> Option<usize> {
        match self.index.get(var as usize) {
            Some(&p) if p > 0 => Some(p as usize),
            _ => None,
        }
    }

    #[inline]
    pub fn quantifier(&self, var: u32) -> Option<Quantifier> {
        self.position(var).map(|p| self.entries[p - 1].1)
    }

    pub fn contains(&self, var: u32) -> bool {
        self.position(var).is_some()
    }

    /// The innermost (maximal position) entry.
    pub fn innermost(&self) -> Option<(u32, Quantifier)> {
        self.entries.last().copied()
    }

    /// Keeps the entries accepted by `keep`; positions are recompacted to `1..n`.
    pub fn retain(&self, mut keep: impl FnMut(u32, Quantifier) -> bool) -> Prefix {
        Prefix::new(
            self.entries
                .iter()
                .copied()
                .filter(|&(v, q)| keep(v, q))
                .collect(),
        )
    }

    pub(crate) fn max_var(&self) -> u32 {
        self.index.len().saturating_sub(1) as u32
    }
}

/// `u ⩽ v` holds when `u`'s variable is existential or its position is not
/// after `v`'s. Polarities play no role.
pub fn literal_leq(u: Literal, v: Literal, prefix: &Prefix) -> Result<bool> {
    let pu = prefix
        .position(u.var())
        .ok_or_else(|| Error::Malformed(format!("variable {} is not bound", u.var())))?;
    let pv = prefix
        .position(v.var())
        .ok_or_else(|| Error::Malformed(format!("variable {} is not bound", v.var())))?;
    Ok(prefix.entries[pu - 1].1.is_existential() || pu <= pv)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClauseId(pub u32);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    id: ClauseId,
    lits: Vec<Literal>,
}

impl Clause {
    /// Sorts and deduplicates `lits`.
    pub fn new(id: ClauseId, mut lits: Vec<Literal>) -> Clause {
        lits.sort_unstable();
        lits.dedup();
        Clause { id, lits }
    }

    pub fn id(&self) -> ClauseId {
        self.id
    }

    /// Literals in ascending `(var, polarity)` order.
    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, u: Literal) -> bool {
        self.lits.binary_search(&u).is_ok()
    }

    /// Contains both polarities of some variable.
    pub fn is_tautology(&self) -> bool {
        self.lits.windows(2).any(|w| w[0].var() == w[1].var())
    }

    pub fn is_tautological_on(&self, var: u32) -> bool {
        self.contains(Literal::positive(var)) && self.contains(Literal::negative(var))
    }
}

/// A structural problem found by [`Formula::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnboundVariable(u32),
    DuplicatePrefixVariable(u32),
    OccMismatch,
    DuplicateLiteral { clause: ClauseId, literal: Literal },
    DuplicateClauseId(ClauseId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnboundVariable(v) => write!(f, "unbound-variable(x{v})"),
            Violation::DuplicatePrefixVariable(v) => write!(f, "duplicate-prefix-variable(x{v})"),
            Violation::OccMismatch => f.write_str("occ-mismatch"),
            Violation::DuplicateLiteral { clause, literal } => {
                write!(f, "duplicate-literal({clause}, {literal:?})")
            }
            Violation::DuplicateClauseId(id) => write!(f, "duplicate-clause-id({id})"),
        }
    }
}

/// A prefixed CNF formula `Q1 x1 ... Qn xn F` with its occurrence index.
#[derive(Clone, Debug)]
pub struct Formula {
    prefix: Prefix,
    clauses: Vec<Clause>,
    // literal code -> ascending clause positions
    occ: Vec<Vec<u32>>,
    next_id: u32,
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        self.prefix == other.prefix && self.clauses == other.clauses
    }
}

impl Eq for Formula {}

impl Formula {
    /// Builds a formula from clause literal lists, assigning ids `1..=m`.
    /// No validation is performed.
    pub fn new(prefix: Prefix, clauses: Vec<Vec<Literal>>) -> Formula {
        let clauses = clauses
            .into_iter()
            .enumerate()
            .map(|(i, lits)| Clause::new(ClauseId(i as u32 + 1), lits))
            .collect();
        Formula::from_clauses(prefix, clauses)
    }

    /// Like [`Formula::new`] but rejects formulas with any [`Violation`].
    pub fn strict(prefix: Prefix, clauses: Vec<Vec<Literal>>) -> Result<Formula> {
        let f = Formula::new(prefix, clauses);
        f.ensure_valid()?;
        Ok(f)
    }

    /// Builds a formula from clauses that already carry ids.
    pub fn from_clauses(prefix: Prefix, clauses: Vec<Clause>) -> Formula {
        let next_id = clauses.iter().map(|c| c.id.0).max().unwrap_or(0) + 1;
        let occ = build_occ(&prefix, &clauses);
        Formula {
            prefix,
            clauses,
            occ,
            next_id,
        }
    }

    /// Convenience constructor from DIMACS-style signed integers. Panics on `0`.
    pub fn from_dimacs(prefix: &[(u32, Quantifier)], clauses: &[&[i64]]) -> Formula {
        let clauses = clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| Literal::from_dimacs(l).expect("nonzero literal"))
                    .collect()
            })
            .collect();
        Formula::new(Prefix::new(prefix.to_vec()), clauses)
    }

    pub fn prefix(&self) -> &Prefix {
        &self.prefix
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_vars(&self) -> usize {
        self.prefix.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn num_occurrences(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    /// Size measure `|Φ|`: prefix variables + clauses + literal occurrences.
    pub fn size(&self) -> usize {
        self.num_vars() + self.num_clauses() + self.num_occurrences()
    }

    /// Next unused clause id.
    pub fn next_id(&self) -> ClauseId {
        ClauseId(self.next_id)
    }

    /// Largest variable index mentioned in the prefix or any clause.
    pub fn max_var(&self) -> u32 {
        let in_clauses = self
            .clauses
            .iter()
            .filter_map(|c| c.lits.last())
            .map(|l| l.var())
            .max()
            .unwrap_or(0);
        let in_prefix = self.prefix.entries.iter().map(|e| e.0).max().unwrap_or(0);
        in_clauses.max(in_prefix)
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    pub fn quantifier(&self, var: u32) -> Option<Quantifier> {
        self.prefix.quantifier(var)
    }

    pub fn literal_leq(&self, u: Literal, v: Literal) -> Result<bool> {
        literal_leq(u, v, &self.prefix)
    }

    /// Positions (indices into [`Formula::clauses`]) of clauses containing `u`.
    #[inline]
    pub fn occurrences(&self, u: Literal) -> &[u32] {
        self.occ.get(u.code()).map_or(&[], Vec::as_slice)
    }

    pub fn occurs(&self, var: u32) -> bool {
        !self.occurrences(Literal::positive(var)).is_empty()
            || !self.occurrences(Literal::negative(var)).is_empty()
    }

    /// `[{u}]`: ids of the clauses containing `u`.
    pub fn clauses_with_literal(&self, u: Literal) -> BTreeSet<ClauseId> {
        self.occurrences(u)
            .iter()
            .map(|&p| self.clauses[p as usize].id)
            .collect()
    }

    /// `[S]`: ids of the clauses containing some literal of `lits`.
    pub fn clauses_with_any<'a>(
        &self,
        lits: impl IntoIterator<Item = &'a Literal>,
    ) -> BTreeSet<ClauseId> {
        lits.into_iter()
            .flat_map(|&u| self.occurrences(u))
            .map(|&p| self.clauses[p as usize].id)
            .collect()
    }

    /// Prefix variables that occur in at least one clause, ascending by index.
    pub fn occurring_vars(&self) -> Vec<u32> {
        let mut vars: Vec<u32> = self
            .prefix
            .entries
            .iter()
            .map(|e| e.0)
            .filter(|&v| self.occurs(v))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn clause_by_id(&self, id: ClauseId) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.id == id)
    }

    /// Equality of prefix and clause literal sequences, ignoring clause ids.
    pub fn structurally_eq(&self, other: &Formula) -> bool {
        self.prefix == other.prefix
            && self.clauses.len() == other.clauses.len()
            && self
                .clauses
                .iter()
                .zip(&other.clauses)
                .all(|(a, b)| a.lits == b.lits)
    }

    /// The same formula with ids renumbered `1..=m` in clause order.
    pub fn renumbered(&self) -> Formula {
        Formula::new(
            self.prefix.clone(),
            self.clauses.iter().map(|c| c.lits.clone()).collect(),
        )
    }

    /// Keeps the clauses accepted by `keep` and rewrites the survivors with
    /// `edit`. Ids are preserved; the prefix is replaced by `prefix`.
    pub(crate) fn derive(
        &self,
        prefix: Prefix,
        mut keep: impl FnMut(usize, &Clause) -> bool,
        mut edit: impl FnMut(&Clause) -> Vec<Literal>,
    ) -> Formula {
        let clauses = self
            .clauses
            .iter()
            .enumerate()
            .filter(|(p, c)| keep(*p, c))
            .map(|(_, c)| Clause {
                id: c.id,
                lits: edit(c),
            })
            .collect();
        let mut f = Formula::from_clauses(prefix, clauses);
        f.next_id = f.next_id.max(self.next_id);
        f
    }

    /// Drops prefix entries of variables that occur in no clause.
    pub fn prune_prefix(&self) -> Formula {
        let prefix = self.prefix.retain(|v, _| self.occurs(v));
        self.derive(prefix, |_, _| true, |c| c.lits.clone())
    }

    /// Lists every violated invariant; empty iff the formula is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for &(v, _) in &self.prefix.entries {
            if !seen.insert(v) {
                out.push(Violation::DuplicatePrefixVariable(v));
            }
        }
        let mut unbound = BTreeSet::new();
        let mut ids = BTreeSet::new();
        for c in &self.clauses {
            if !ids.insert(c.id) {
                out.push(Violation::DuplicateClauseId(c.id));
            }
            for w in c.lits.windows(2) {
                if w[0] == w[1] {
                    out.push(Violation::DuplicateLiteral {
                        clause: c.id,
                        literal: w[0],
                    });
                }
            }
            for l in &c.lits {
                if !self.prefix.contains(l.var()) {
                    unbound.insert(l.var());
                }
            }
        }
        out.extend(unbound.into_iter().map(Violation::UnboundVariable));
        if !occ_matches(&self.occ, &build_occ(&self.prefix, &self.clauses)) {
            out.push(Violation::OccMismatch);
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            Err(Error::Malformed(msg.join(", ")))
        }
    }
}

fn build_occ(prefix: &Prefix, clauses: &[Clause]) -> Vec<Vec<u32>> {
    let max_var = clauses
        .iter()
        .filter_map(|c| c.lits.last())
        .map(|l| l.var())
        .max()
        .unwrap_or(0)
        .max(prefix.max_var());
    let mut occ = vec![Vec::new(); 2 * (max_var as usize + 1)];
    for (p, c) in clauses.iter().enumerate() {
        for l in &c.lits {
            let list: &mut Vec<u32> = &mut occ[l.code()];
            // a clause with a repeated literal is listed once
            if list.last() != Some(&(p as u32)) {
                list.push(p as u32);
            }
        }
    }
    occ
}

// Trailing empty lists are insignificant.
fn occ_matches(a: &[Vec<u32>], b: &[Vec<u32>]) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|i| {
        let x = a.get(i).map_or(&[][..], Vec::as_slice);
        let y = b.get(i).map_or(&[][..], Vec::as_slice);
        x == y
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use Quantifier::*;

    /// `∃x1 : (x1)`
    pub fn f_a() -> Formula {
        Formula::from_dimacs(&[(1, Existential)], &[&[1]])
    }

    /// `∀x1 : (x1)`
    pub fn f_b() -> Formula {
        Formula::from_dimacs(&[(1, Universal)], &[&[1]])
    }

    /// `∃x1 : (x1)(¬x1)`
    pub fn f_c() -> Formula {
        Formula::from_dimacs(&[(1, Existential)], &[&[1], &[-1]])
    }

    /// `∀x1 ∃x2 : (x1 ∨ x2)(¬x1 ∨ ¬x2)`
    pub fn f_d() -> Formula {
        Formula::from_dimacs(&[(1, Universal), (2, Existential)], &[&[1, 2], &[-1, -2]])
    }

    /// `∀x1 ∃x2 : (x1 ∨ x2)(¬x1 ∨ ¬x2)(x1 ∨ ¬x2)`
    pub fn f_e() -> Formula {
        Formula::from_dimacs(
            &[(1, Universal), (2, Existential)],
            &[&[1, 2], &[-1, -2], &[1, -2]],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;
    use Quantifier::*;

    fn ids(xs: &[u32]) -> BTreeSet<ClauseId> {
        xs.iter().map(|&x| ClauseId(x)).collect()
    }

    #[test]
    fn negate_flips_polarity_only() {
        let x3 = Literal::positive(3);
        assert_eq!(negate(x3), Literal::negative(3));
        assert_eq!(negate(Literal::negative(3)), x3);
        assert_eq!(negate(negate(Literal::positive(7))), Literal::positive(7));
        assert_eq!(x3.negate().var(), 3);
        assert_eq!(x3.polarity(), 1);
        assert_eq!((!x3).polarity(), 0);
    }

    #[test]
    fn dimacs_conversion() {
        assert_eq!(Literal::from_dimacs(-4), Some(Literal::negative(4)));
        assert_eq!(Literal::from_dimacs(0), None);
        assert_eq!(Literal::from_dimacs(i64::from(MAX_VAR) + 1), None);
        assert_eq!(Literal::negative(4).to_dimacs(), -4);
    }

    #[test]
    fn leq_examples() {
        let p = Prefix::new(vec![(1, Universal), (2, Existential)]);
        let (x1, x2) = (Literal::positive(1), Literal::positive(2));
        assert!(literal_leq(x1, x2, &p).unwrap());
        assert!(literal_leq(x2, x1, &p).unwrap());
        let q = Prefix::new(vec![(1, Existential), (2, Universal)]);
        assert!(!literal_leq(x2, x1, &q).unwrap());
        assert!(literal_leq(!x2, !x2, &q).unwrap());
        assert!(matches!(
            literal_leq(Literal::positive(9), x1, &p),
            Err(Error::Malformed(_))
        ));
    }

    #[test]
    fn occurrence_queries() {
        let f = f_d();
        assert_eq!(f.clauses_with_literal(Literal::positive(1)), ids(&[1]));
        assert_eq!(f.clauses_with_literal(Literal::negative(2)), ids(&[2]));
        assert_eq!(f.clauses_with_literal(Literal::positive(9)), ids(&[]));
        let s = [Literal::positive(1), Literal::negative(2)];
        assert_eq!(f.clauses_with_any(&s), ids(&[1, 2]));
        assert_eq!(f.clauses_with_any(&[]), ids(&[]));
        assert_eq!(f.clauses_with_any(&[Literal::positive(2)]), ids(&[1]));
    }

    #[test]
    fn size_proxy() {
        assert_eq!(f_d().size(), 8);
        assert_eq!(Formula::new(Prefix::default(), vec![]).size(), 0);
        assert_eq!(f_a().size(), 3);
    }

    #[test]
    fn validate_reports_violations() {
        assert!(f_d().validate().is_empty());

        let mut lits: Vec<Vec<Literal>> =
            f_d().clauses().iter().map(|c| c.literals().to_vec()).collect();
        lits.push(vec![Literal::positive(5)]);
        let f = Formula::new(f_d().prefix().clone(), lits);
        assert_eq!(f.validate(), vec![Violation::UnboundVariable(5)]);
        assert_eq!(f.validate()[0].to_string(), "unbound-variable(x5)");

        let mut f = f_d();
        f.occ[Literal::positive(1).code()].clear();
        assert_eq!(f.validate(), vec![Violation::OccMismatch]);

        let mut f = f_d();
        f.clauses[0].lits.push(Literal::positive(2));
        f.occ = build_occ(&f.prefix, &f.clauses);
        assert!(f
            .validate()
            .contains(&Violation::DuplicateLiteral { clause: ClauseId(1), literal: Literal::positive(2) }));

        let f = Formula::new(Prefix::new(vec![(1, Universal), (1, Existential)]), vec![]);
        assert_eq!(f.validate(), vec![Violation::DuplicatePrefixVariable(1)]);
    }

    #[test]
    fn clause_dedups_and_flags_tautologies() {
        let c = Clause::new(
            ClauseId(1),
            vec![Literal::positive(2), Literal::negative(1), Literal::positive(2)],
        );
        assert_eq!(c.literals(), &[Literal::negative(1), Literal::positive(2)]);
        assert!(!c.is_tautology());
        let t = Clause::new(ClauseId(2), vec![Literal::positive(3), Literal::negative(3)]);
        assert!(t.is_tautology());
        assert!(t.is_tautological_on(3));
        assert!(Clause::new(ClauseId(3), vec![]).is_empty());
    }

    #[test]
    fn prune_recompacts_positions() {
        let f = Formula::from_dimacs(
            &[(1, Universal), (2, Existential), (3, Universal)],
            &[&[3, 2]],
        );
        let g = f.prune_prefix();
        assert_eq!(g.prefix().entries(), &[(2, Existential), (3, Universal)]);
        assert_eq!(g.prefix().position(3), Some(2));
        assert!(g.validate().is_empty());
        assert_eq!(f_d().prune_prefix(), f_d());
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        (1u32..6, prop::collection::vec(prop::collection::vec((1u32..6, any::<bool>()), 0..4), 0..6), any::<u8>())
            .prop_map(|(n, clauses, qbits)| {
                let prefix = (1..=n)
                    .map(|v| (v, if qbits >> (v % 8) & 1 == 1 { Universal } else { Existential }))
                    .collect();
                let clauses = clauses
                    .into_iter()
                    .map(|c| c.into_iter().map(|(v, s)| Literal::new((v - 1) % n + 1, s)).collect())
                    .collect();
                Formula::new(Prefix::new(prefix), clauses)
            })
    }

    proptest! {
        #[test]
        fn leq_existential_is_top(f in arb_formula(), a in 1u32..6, b in 1u32..6, sa: bool, sb: bool) {
            let n = f.num_vars() as u32;
            let u = Literal::new((a - 1) % n + 1, sa);
            let v = Literal::new((b - 1) % n + 1, sb);
            let leq = f.literal_leq(u, v).unwrap();
            if f.quantifier(u.var()).unwrap().is_existential() {
                prop_assert!(leq);
            }
            prop_assert_eq!(leq, f.literal_leq(!u, !v).unwrap());
        }

        #[test]
        fn union_homomorphism(f in arb_formula(), s1 in prop::collection::vec((1u32..6, any::<bool>()), 0..4),
                              s2 in prop::collection::vec((1u32..6, any::<bool>()), 0..4)) {
            let s1: Vec<Literal> = s1.into_iter().map(|(v, p)| Literal::new(v, p)).collect();
            let s2: Vec<Literal> = s2.into_iter().map(|(v, p)| Literal::new(v, p)).collect();
            let both: Vec<Literal> = s1.iter().chain(&s2).copied().collect();
            let mut expect = f.clauses_with_any(&s1);
            expect.extend(f.clauses_with_any(&s2));
            prop_assert_eq!(f.clauses_with_any(&both), expect);
        }

        #[test]
        fn size_drops_on_deletion(f in arb_formula(), pick: usize) {
            prop_assume!(f.num_clauses() > 0);
            let p = pick % f.num_clauses();
            let dropped = f.derive(f.prefix().clone(), |q, _| q != p, |c| c.literals().to_vec());
            prop_assert!(dropped.size() < f.size());
            prop_assert!(dropped.validate().is_empty());
            if !f.clauses()[p].is_empty() {
                let shaved = f.derive(f.prefix().clone(), |_, _| true, |c| {
                    if c.id() == f.clauses()[p].id() { c.literals()[1..].to_vec() } else { c.literals().to_vec() }
                });
                prop_assert!(shaved.size() < f.size());
                prop_assert!(shaved.validate().is_empty());
            }
        }
    }
}
