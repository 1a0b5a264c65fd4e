//! Literal closure `S(z)`, the covered clause set `C(z)`, the redundancy test,
//! and checkers for the two closure properties.
//!
//! One closure step from a literal set `S` adds every existential literal `u`
//! with `u ≠ ¬z`, `z ⩽ u`, `[{u}] ⊄ [S]` and `[{¬u}] ⊆ [S]`. Because the
//! non-subset condition can be destroyed by growing `S`, rounds are
//! synchronous: every candidate of a round is judged against the same `S`.
//!
//! [`closure_step`] evaluates that definition directly on clause-id sets.
//! [`ClosureEngine`] computes the same fixpoint incrementally, keeping a
//! per-literal count of clauses not yet covered, so a full closure costs
//! time proportional to the clauses it touches.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{ClauseId, Formula, Literal, Quantifier};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureResult {
    pub pivot: Literal,
    /// `S(z)`
    pub s_set: BTreeSet<Literal>,
    /// `C(z) = [S(z)]`
    pub covered: BTreeSet<ClauseId>,
    /// Literals added by each productive round, in round order.
    pub rounds: Vec<BTreeSet<Literal>>,
    /// Closure steps evaluated, including the final unproductive one.
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Property {
    /// `u ∈ S(z) ⟹ ¬u ∉ S(z)`
    #[serde(rename = "P1")]
    P1,
    /// `u ≠ z, z ⩽ u, [{u}] ⊆ C(z) ⟹ [{¬u}] ⊆ C(z)`
    #[serde(rename = "P2")]
    P2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: Property,
    pub pivot: Literal,
    pub holds: bool,
    pub witness: Option<Literal>,
    /// Quantifier of the witness variable, when there is a witness.
    pub witness_quantifier: Option<Quantifier>,
}

impl PropertyReport {
    fn new(property: Property, pivot: Literal, witness: Option<(Literal, Quantifier)>) -> Self {
        PropertyReport {
            property,
            pivot,
            holds: witness.is_none(),
            witness: witness.map(|w| w.0),
            witness_quantifier: witness.map(|w| w.1),
        }
    }
}

fn ensure_bound(f: &Formula, z: Literal) -> Result<()> {
    if f.prefix().contains(z.var()) {
        Ok(())
    } else {
        Err(Error::Malformed(format!(
            "pivot variable {} is not bound",
            z.var()
        )))
    }
}

/// One closure step `⟨S⟩_z`, evaluated straight from the definition.
///
/// Literals already in `s` can appear in the output; callers take the union.
pub fn closure_step(f: &Formula, s: &BTreeSet<Literal>, z: Literal) -> Result<BTreeSet<Literal>> {
    ensure_bound(f, z)?;
    let covered = f.clauses_with_any(s);
    let mut out = BTreeSet::new();
    for &(var, q) in f.prefix().entries() {
        if !q.is_existential() {
            continue;
        }
        for u in [Literal::positive(var), Literal::negative(var)] {
            if u == !z || !f.literal_leq(z, u)? {
                continue;
            }
            let own = f.clauses_with_literal(u);
            let comp = f.clauses_with_literal(!u);
            if !own.is_subset(&covered) && comp.is_subset(&covered) {
                out.insert(u);
            }
        }
    }
    Ok(out)
}

/// Computes `S(z)` and `C(z)`.
pub fn closure(f: &Formula, z: Literal) -> Result<ClosureResult> {
    let mut engine = ClosureEngine::new(f);
    engine.run(z)?;
    Ok(engine.result())
}

/// `z` is redundant when every clause containing `¬z` lies in `C(z)`.
///
/// Only literals of variables that occur in the matrix qualify.
pub fn is_redundant(f: &Formula, z: Literal) -> Result<bool> {
    ensure_bound(f, z)?;
    if !f.occurs(z.var()) {
        return Err(Error::Precondition(format!(
            "variable {} does not occur in any clause",
            z.var()
        )));
    }
    let mut engine = ClosureEngine::new(f);
    engine.run(z)?;
    Ok(engine.covers_negation())
}

pub fn check_property_1(f: &Formula, z: Literal) -> Result<PropertyReport> {
    let mut engine = ClosureEngine::new(f);
    engine.run(z)?;
    Ok(engine.property_1())
}

pub fn check_property_2(f: &Formula, z: Literal) -> Result<PropertyReport> {
    let mut engine = ClosureEngine::new(f);
    engine.run(z)?;
    Ok(engine.property_2())
}

/// Reusable scratch space for many closures over one formula.
pub struct ClosureEngine<'f> {
    f: &'f Formula,
    // per literal code: clauses containing it that are not yet covered
    uncovered: Vec<u32>,
    in_set: Vec<bool>,
    // per clause position
    covered: Vec<bool>,
    covered_list: Vec<u32>,
    touched_lits: Vec<u32>,
    members: Vec<Literal>,
    // end offsets into `members` of each productive round
    round_ends: Vec<usize>,
    // literals that occur while their complement never does
    pure: Vec<Literal>,
    pivot: Option<Literal>,
    iterations: usize,
    zeroed: Vec<Literal>,
}

impl<'f> ClosureEngine<'f> {
    pub fn new(f: &'f Formula) -> Self {
        let n_codes = 2 * (f.max_var() as usize + 1);
        let uncovered: Vec<u32> = (0..n_codes)
            .map(|c| f.occurrences(Literal::from_code(c)).len() as u32)
            .collect();
        let pure = (2..n_codes)
            .map(Literal::from_code)
            .filter(|&u| uncovered[u.code()] > 0 && uncovered[u.negate().code()] == 0)
            .collect();
        ClosureEngine {
            f,
            uncovered,
            in_set: vec![false; n_codes],
            covered: vec![false; f.num_clauses()],
            covered_list: Vec::new(),
            touched_lits: Vec::new(),
            members: Vec::new(),
            round_ends: Vec::new(),
            pure,
            pivot: None,
            iterations: 0,
            zeroed: Vec::new(),
        }
    }

    pub fn formula(&self) -> &'f Formula {
        self.f
    }

    fn reset(&mut self) {
        for &c in &self.touched_lits {
            let u = Literal::from_code(c as usize);
            self.uncovered[c as usize] = self.f.occurrences(u).len() as u32;
        }
        self.touched_lits.clear();
        for &p in &self.covered_list {
            self.covered[p as usize] = false;
        }
        self.covered_list.clear();
        for u in self.members.drain(..) {
            self.in_set[u.code()] = false;
        }
        self.round_ends.clear();
        self.zeroed.clear();
        self.iterations = 0;
        self.pivot = None;
    }

    fn cover_literal(&mut self, u: Literal) {
        let f = self.f;
        for &p in f.occurrences(u) {
            if self.covered[p as usize] {
                continue;
            }
            self.covered[p as usize] = true;
            self.covered_list.push(p);
            for &l in f.clauses()[p as usize].literals() {
                let slot = &mut self.uncovered[l.code()];
                if *slot == f.occurrences(l).len() as u32 {
                    self.touched_lits.push(l.code() as u32);
                }
                *slot -= 1;
                if *slot == 0 {
                    self.zeroed.push(l);
                }
            }
        }
    }

    #[inline]
    fn eligible(&self, z: Literal, z_pos: usize, z_exists: bool, u: Literal) -> bool {
        if u == !z || self.in_set[u.code()] {
            return false;
        }
        let prefix = self.f.prefix();
        let Some(pos) = prefix.position(u.var()) else {
            return false;
        };
        if !prefix.entries()[pos - 1].1.is_existential() {
            return false;
        }
        if !z_exists && z_pos > pos {
            return false;
        }
        self.uncovered[u.code()] > 0 && self.uncovered[u.negate().code()] == 0
    }

    /// Runs the closure from pivot `z`, replacing any previous state.
    pub fn run(&mut self, z: Literal) -> Result<()> {
        self.reset();
        let prefix = self.f.prefix();
        let z_pos = prefix.position(z.var()).ok_or_else(|| {
            Error::Malformed(format!("pivot variable {} is not bound", z.var()))
        })?;
        let z_exists = prefix.entries()[z_pos - 1].1.is_existential();
        let cap = 2 * self.f.num_vars() + 1;

        self.pivot = Some(z);
        self.members.push(z);
        self.in_set[z.code()] = true;
        self.cover_literal(z);

        let mut candidates: Vec<Literal> = self.pure.clone();
        loop {
            candidates.extend(self.zeroed.drain(..).map(Literal::negate));
            let mut added: Vec<Literal> = candidates
                .drain(..)
                .filter(|&u| self.eligible(z, z_pos, z_exists, u))
                .collect();
            self.iterations += 1;
            if self.iterations > cap {
                return Err(Error::Internal(format!(
                    "closure of {z:?} did not converge within {cap} steps"
                )));
            }
            if added.is_empty() {
                break;
            }
            added.sort_unstable();
            added.dedup();
            for &u in &added {
                self.in_set[u.code()] = true;
                self.members.push(u);
            }
            self.round_ends.push(self.members.len());
            for u in added {
                self.cover_literal(u);
            }
        }
        Ok(())
    }

    pub fn pivot(&self) -> Option<Literal> {
        self.pivot
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Members of `S(z)` in insertion order, pivot first.
    pub fn members(&self) -> &[Literal] {
        &self.members
    }

    pub fn contains(&self, u: Literal) -> bool {
        self.in_set.get(u.code()).copied().unwrap_or(false)
    }

    /// Positions of the covered clauses, in covering order.
    pub fn covered_positions(&self) -> &[u32] {
        &self.covered_list
    }

    pub fn is_covered(&self, position: usize) -> bool {
        self.covered[position]
    }

    /// `[{u}] ⊆ C(z)`
    pub fn covers(&self, u: Literal) -> bool {
        self.f
            .occurrences(u)
            .iter()
            .all(|&p| self.covered[p as usize])
    }

    /// Redundancy of the last pivot: `[{¬z}] ⊆ C(z)`.
    pub fn covers_negation(&self) -> bool {
        self.pivot.is_some_and(|z| self.covers(!z))
    }

    pub fn result(&self) -> ClosureResult {
        let pivot = self.pivot.expect("closure has been run");
        let mut rounds = Vec::with_capacity(self.round_ends.len());
        let mut start = 1;
        for &end in &self.round_ends {
            rounds.push(self.members[start..end].iter().copied().collect());
            start = end;
        }
        ClosureResult {
            pivot,
            s_set: self.members.iter().copied().collect(),
            covered: self
                .covered_list
                .iter()
                .map(|&p| self.f.clauses()[p as usize].id())
                .collect(),
            rounds,
            iterations: self.iterations,
        }
    }

    pub fn property_1(&self) -> PropertyReport {
        let pivot = self.pivot.expect("closure has been run");
        let witness = self
            .members
            .iter()
            .copied()
            .filter(|&u| self.contains(!u))
            .min()
            .map(|u| (u, self.f.quantifier(u.var()).expect("members are bound")));
        PropertyReport::new(Property::P1, pivot, witness)
    }

    pub fn property_2(&self) -> PropertyReport {
        let z = self.pivot.expect("closure has been run");
        let prefix = self.f.prefix();
        let z_pos = prefix.position(z.var()).expect("pivot is bound");
        let z_exists = prefix.entries()[z_pos - 1].1.is_existential();
        let mut witness: Option<(Literal, Quantifier)> = None;
        for (i, &(var, q)) in prefix.entries().iter().enumerate() {
            if !z_exists && z_pos > i + 1 {
                continue;
            }
            for u in [Literal::negative(var), Literal::positive(var)] {
                if u != z && self.covers(u) && !self.covers(!u) && witness.is_none_or(|w| u < w.0) {
                    witness = Some((u, q));
                }
            }
        }
        PropertyReport::new(Property::P2, z, witness)
    }
}
