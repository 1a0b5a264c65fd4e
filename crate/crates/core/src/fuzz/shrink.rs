//! Greedy delta-debugging minimizer for formulas.

use crate::error::{Error, Result};
use crate::formula::{Formula, Literal, Prefix, Quantifier};

#[derive(Clone)]
struct Candidate {
    prefix: Vec<(u32, Quantifier)>,
    clauses: Vec<Vec<Literal>>,
}

impl Candidate {
    fn of(f: &Formula) -> Candidate {
        Candidate {
            prefix: f.prefix().entries().to_vec(),
            clauses: f.clauses().iter().map(|c| c.literals().to_vec()).collect(),
        }
    }

    fn build(&self) -> Formula {
        Formula::new(Prefix::new(self.prefix.clone()), self.clauses.clone())
    }
}

/// Shrinks `f` while `predicate` keeps holding.
///
/// Passes run in order until none of them makes progress: drop a clause,
/// drop a literal occurrence, drop a variable with all its occurrences,
/// turn a universal quantifier existential. No move ever creates an empty
/// clause. The result is a fixpoint, so shrinking it again returns it
/// unchanged. Clause ids of the result are `1..m`.
pub fn shrink(f: &Formula, mut predicate: impl FnMut(&Formula) -> bool) -> Result<Formula> {
    f.ensure_valid()?;
    if !predicate(f) {
        return Err(Error::Precondition(
            "shrink predicate does not hold on the input".into(),
        ));
    }
    let mut best = Candidate::of(&f.renumbered());
    let mut try_move = |best: &mut Candidate, next: Candidate| -> bool {
        let g = next.build();
        if predicate(&g) {
            *best = next;
            true
        } else {
            false
        }
    };

    loop {
        let mut progress = false;

        let mut i = 0;
        while i < best.clauses.len() {
            let mut next = best.clone();
            next.clauses.remove(i);
            if try_move(&mut best, next) {
                progress = true;
            } else {
                i += 1;
            }
        }

        let mut i = 0;
        while i < best.clauses.len() {
            let mut j = 0;
            while best.clauses[i].len() >= 2 && j < best.clauses[i].len() {
                let mut next = best.clone();
                next.clauses[i].remove(j);
                if try_move(&mut best, next) {
                    progress = true;
                } else {
                    j += 1;
                }
            }
            i += 1;
        }

        let mut i = 0;
        while i < best.prefix.len() {
            let var = best.prefix[i].0;
            let empties = best
                .clauses
                .iter()
                .any(|c| !c.is_empty() && c.iter().all(|l| l.var() == var));
            let mut next = best.clone();
            next.prefix.remove(i);
            for c in &mut next.clauses {
                c.retain(|l| l.var() != var);
            }
            if !empties && try_move(&mut best, next) {
                progress = true;
            } else {
                i += 1;
            }
        }

        for i in 0..best.prefix.len() {
            if best.prefix[i].1 == Quantifier::Universal {
                let mut next = best.clone();
                next.prefix[i].1 = Quantifier::Existential;
                progress |= try_move(&mut best, next);
            }
        }

        if !progress {
            return Ok(best.build());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fixtures::*;
    use crate::fuzz::gen::{gen_random, GenParams};
    use proptest::prelude::*;

    #[test]
    fn minimal_nonempty_matrix() {
        let g = shrink(&f_d(), |g| g.num_clauses() >= 1).unwrap();
        assert_eq!(g.num_clauses(), 1);
        assert_eq!(g.clauses()[0].len(), 1);
        assert_eq!(g, Formula::from_dimacs(&[(2, Quantifier::Existential)], &[&[-2]]));
    }

    #[test]
    fn predicate_must_hold_on_input() {
        assert!(matches!(
            shrink(&f_d(), |g| g.num_clauses() > 5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn never_creates_empty_clause() {
        let g = shrink(&f_c(), |g| g.has_empty_clause() || g.num_clauses() >= 2).unwrap();
        assert_eq!(g.num_clauses(), 2);
        assert!(!g.has_empty_clause());
    }

    proptest! {
        #[test]
        fn idempotent_and_well_formed(seed in 0u64..500, k in 1usize..4) {
            let p = GenParams { n_vars: 5, n_clauses: 7, ..GenParams::default() }.with_seed(seed);
            let f = gen_random(&p).unwrap();
            let pred = |g: &Formula| g.num_occurrences() >= k && g.num_vars() >= 2;
            prop_assume!(pred(&f));
            let once = shrink(&f, pred).unwrap();
            prop_assert!(once.validate().is_empty());
            prop_assert!(pred(&once));
            prop_assert!(once.size() <= f.size());
            prop_assert!(!once.has_empty_clause());
            prop_assert_eq!(shrink(&once, pred).unwrap(), once);
        }
    }
}
