//! The innermost-variable resolvent formula `Ψ` and checks of the claims
//! made about it: truth transfers from `Φ` to `Ψ`, closures in `Ψ` stay
//! inside the corresponding closures in `Φ`, and reducedness carries over.

use std::collections::{BTreeSet, HashMap};

use crate::closure::ClosureEngine;
use crate::error::{Error, Result};
use crate::formula::{Clause, ClauseId, Formula, Literal, Quantifier};
use crate::oracle::{eval_recursive, OracleLimits};
use crate::reducer::is_reduced;
use crate::Verdict;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddedClause {
    pub id: ClauseId,
    pub literals: Vec<Literal>,
    /// `(C^0_i ∨ ¬x, C^1_j ∨ x)` pairs that produced this clause.
    pub parents: Vec<(ClauseId, ClauseId)>,
}

#[derive(Clone, Debug)]
pub struct PsiResult {
    pub psi: Formula,
    pub pivot_var: u32,
    pub pivot_quantifier: Quantifier,
    /// Clauses of the form `C^a_i ∨ x^a`.
    pub removed: BTreeSet<ClauseId>,
    pub added: Vec<AddedClause>,
}

/// Removes every clause containing the innermost variable `x`, adds
/// `C^0_i ∨ C^1_j` for all pairs, and drops `x` from the prefix. The
/// construction is the same for both quantifiers.
pub fn build_psi(f: &Formula) -> Result<PsiResult> {
    let (x, q) = f
        .prefix()
        .innermost()
        .ok_or_else(|| Error::Precondition("empty prefix has no pivot variable".into()))?;
    if !f.occurs(x) {
        return Err(Error::Precondition(format!(
            "innermost variable {x} occurs in no clause"
        )));
    }
    if let Some(c) = f.clauses().iter().find(|c| c.is_tautological_on(x)) {
        return Err(Error::Precondition(format!(
            "clause {} is tautological on the pivot {x}",
            c.id()
        )));
    }
    let (pos, neg) = (Literal::positive(x), Literal::negative(x));
    let with = |u: Literal| -> Vec<&Clause> {
        f.occurrences(u)
            .iter()
            .map(|&p| &f.clauses()[p as usize])
            .collect()
    };
    let (negatives, positives) = (with(neg), with(pos));

    let mut added: Vec<AddedClause> = Vec::new();
    let mut by_lits: HashMap<Vec<Literal>, usize> = HashMap::new();
    let mut next_id = f.next_id().0;
    for c0 in &negatives {
        for c1 in &positives {
            let mut lits: Vec<Literal> = c0
                .literals()
                .iter()
                .chain(c1.literals())
                .copied()
                .filter(|l| l.var() != x)
                .collect();
            lits.sort_unstable();
            lits.dedup();
            let parents = (c0.id(), c1.id());
            match by_lits.get(&lits) {
                Some(&i) => added[i].parents.push(parents),
                None => {
                    by_lits.insert(lits.clone(), added.len());
                    added.push(AddedClause {
                        id: ClauseId(next_id),
                        literals: lits,
                        parents: vec![parents],
                    });
                    next_id += 1;
                }
            }
        }
    }

    let removed: BTreeSet<ClauseId> = negatives.iter().chain(&positives).map(|c| c.id()).collect();
    let mut clauses: Vec<Clause> = f
        .clauses()
        .iter()
        .filter(|c| !removed.contains(&c.id()))
        .cloned()
        .collect();
    clauses.extend(added.iter().map(|a| Clause::new(a.id, a.literals.clone())));
    let prefix = f.prefix().retain(|v, _| v != x);
    Ok(PsiResult {
        psi: Formula::from_clauses(prefix, clauses),
        pivot_var: x,
        pivot_quantifier: q,
        removed,
        added,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiLemmaReport {
    pub pivot_var: u32,
    /// Every surviving clause of `[S_Ψ(z)]_Φ` lies in `C_Φ(z)`, for every `z`.
    pub lemma_holds: bool,
    /// First `(z, clause)` breaking the surviving-clause form of the lemma.
    pub lemma_witness: Option<(Literal, ClauseId)>,
    /// `(z, clause)` pairs where a removed pivot clause of `[S_Ψ(z)]_Φ` falls
    /// outside `C_Φ(z)`. Recorded only; not part of the checked form.
    pub pivot_clause_cases: usize,
    pub phi_verdict: Verdict,
    pub psi_verdict: Verdict,
    /// `Φ` TRUE implies `Ψ` TRUE.
    pub truth_preserved: bool,
    pub phi_reduced: bool,
    pub psi_reduced: bool,
    /// `Φ` reduced implies `Ψ` reduced.
    pub reducedness_preserved: bool,
}

impl PsiLemmaReport {
    pub fn all_hold(&self) -> bool {
        self.lemma_holds && self.truth_preserved && self.reducedness_preserved
    }
}

/// Builds `Ψ` for `f` and evaluates the three claims about it.
pub fn check_psi_lemma(f: &Formula, limits: &OracleLimits) -> Result<PsiLemmaReport> {
    let psi = build_psi(f)?;
    let (lemma_witness, pivot_clause_cases) = surviving_clause_lemma(f, &psi)?;
    let phi_verdict = eval_recursive(f, limits)?.value;
    let psi_verdict = eval_recursive(&psi.psi, limits)?.value;
    let phi_reduced = is_reduced(f)?;
    let psi_reduced = is_reduced(&psi.psi)?;
    Ok(PsiLemmaReport {
        pivot_var: psi.pivot_var,
        lemma_holds: lemma_witness.is_none(),
        lemma_witness,
        pivot_clause_cases,
        phi_verdict,
        psi_verdict,
        truth_preserved: !(phi_verdict.is_true() && !psi_verdict.is_true()),
        phi_reduced,
        psi_reduced,
        reducedness_preserved: !phi_reduced || psi_reduced,
    })
}

fn surviving_clause_lemma(
    f: &Formula,
    psi: &PsiResult,
) -> Result<(Option<(Literal, ClauseId)>, usize)> {
    let mut in_psi = ClosureEngine::new(&psi.psi);
    let mut in_phi = ClosureEngine::new(f);
    let mut witness = None;
    let mut pivot_cases = 0;
    for &(var, _) in psi.psi.prefix().entries() {
        for z in [Literal::positive(var), Literal::negative(var)] {
            in_psi.run(z)?;
            in_phi.run(z)?;
            for (p, c) in f.clauses().iter().enumerate() {
                if in_phi.is_covered(p) || !c.literals().iter().any(|&l| in_psi.contains(l)) {
                    continue;
                }
                if psi.removed.contains(&c.id()) {
                    pivot_cases += 1;
                } else if witness.is_none() {
                    witness = Some((z, c.id()));
                }
            }
        }
    }
    Ok((witness, pivot_cases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fixtures::*;
    use Quantifier::*;

    fn lits(xs: &[i64]) -> Vec<Literal> {
        xs.iter().map(|&x| Literal::from_dimacs(x).unwrap()).collect()
    }

    #[test]
    fn psi_examples() {
        let r = build_psi(&f_d()).unwrap();
        assert_eq!(r.pivot_var, 2);
        assert_eq!(r.removed, [ClauseId(1), ClauseId(2)].into());
        assert_eq!(r.added.len(), 1);
        assert_eq!(r.added[0].literals, lits(&[-1, 1]));
        assert_eq!(r.psi.prefix().entries(), &[(1, Universal)]);

        let r = build_psi(&f_c()).unwrap();
        assert_eq!(r.removed, [ClauseId(1), ClauseId(2)].into());
        assert_eq!(r.added[0].literals, lits(&[]));
        assert!(r.psi.prefix().is_empty());
        assert!(r.psi.has_empty_clause());

        let r = build_psi(&f_a()).unwrap();
        assert_eq!(r.removed, [ClauseId(1)].into());
        assert!(r.added.is_empty());
        assert_eq!(r.psi.num_clauses(), 0);
        assert!(r.psi.prefix().is_empty());
    }

    #[test]
    fn psi_preconditions() {
        let taut = Formula::from_dimacs(&[(1, Existential)], &[&[1, -1]]);
        assert!(matches!(build_psi(&taut), Err(Error::Precondition(_))));
        let absent = Formula::from_dimacs(&[(1, Existential), (2, Universal)], &[&[1]]);
        assert!(matches!(build_psi(&absent), Err(Error::Precondition(_))));
    }

    #[test]
    fn psi_merges_identical_resolvents() {
        let f = Formula::from_dimacs(
            &[(1, Existential), (2, Existential)],
            &[&[1, 2], &[1, -2], &[-2]],
        );
        let r = build_psi(&f).unwrap();
        assert_eq!(r.added.len(), 1);
        assert_eq!(r.added[0].literals, lits(&[1]));
        assert_eq!(r.added[0].parents.len(), 2);
        assert!(r.psi.validate().is_empty());
    }

    #[test]
    fn lemma_report_on_fixtures() {
        let limits = OracleLimits::default();
        let d = check_psi_lemma(&f_d(), &limits).unwrap();
        assert_eq!((d.phi_verdict, d.psi_verdict), (Verdict::True, Verdict::True));
        assert!(d.truth_preserved);

        let c = check_psi_lemma(&f_c(), &limits).unwrap();
        assert_eq!(c.phi_verdict, Verdict::False);
        assert!(c.truth_preserved);

        let e = check_psi_lemma(&f_e(), &limits).unwrap();
        assert_eq!(e.pivot_var, 2);
        assert_eq!(e.phi_verdict, Verdict::False);
    }
}
