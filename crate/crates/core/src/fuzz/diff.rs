//! Differential execution of the reduction procedure against both oracles,
//! plus the per-instance invariant checks.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closure::{ClosureEngine, PropertyReport};
use crate::error::{Error, Result};
use crate::formula::{Formula, Literal, Quantifier};
use crate::oracle::{check_psi_lemma, eval_recursive, evaluate_both, OracleLimits, OracleOutcome, PsiLemmaReport};
use crate::reducer::{apply_rho, decide, DecideStats, ReductionTrace, ScanPolicy};
use crate::Verdict;

/// Everything the harness can flag on one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    /// Some scan policy's verdict differs from the oracle.
    VerdictMismatch,
    /// Two scan policies reach different verdicts.
    PolicyDivergence,
    /// `u` and `¬u` both in some `S(z)`.
    #[serde(rename = "property-1")]
    Property1,
    /// Property (2) fails with an existential witness.
    #[serde(rename = "property-2-existential")]
    Property2Existential,
    /// Property (2) fails with a universal witness.
    #[serde(rename = "property-2-universal")]
    Property2Universal,
    /// `Φ` TRUE but `ρ_z(Φ)` FALSE for a root redundant `z`.
    RhoUnsound,
    /// `ρ_z(Φ)` TRUE but `Φ` FALSE.
    RhoIncomplete,
    /// The reduced residue still has clauses yet is TRUE.
    ReducedNonemptyTrue,
    /// `Φ` TRUE but `Ψ` FALSE.
    PsiTruth,
    /// A surviving clause of `[S_Ψ(z)]` lies outside `C_Φ(z)`.
    PsiLemma,
    /// `Φ` reduced but `Ψ` not.
    PsiReducedness,
    /// The two oracles disagree. Always a bug in this crate.
    OracleDisagreement,
    /// A structural bound or internal consistency check failed. Always a bug.
    InternalInvariant,
}

impl FindingKind {
    pub const ALL: [FindingKind; 13] = [
        FindingKind::VerdictMismatch,
        FindingKind::PolicyDivergence,
        FindingKind::Property1,
        FindingKind::Property2Existential,
        FindingKind::Property2Universal,
        FindingKind::RhoUnsound,
        FindingKind::RhoIncomplete,
        FindingKind::ReducedNonemptyTrue,
        FindingKind::PsiTruth,
        FindingKind::PsiLemma,
        FindingKind::PsiReducedness,
        FindingKind::OracleDisagreement,
        FindingKind::InternalInvariant,
    ];

    pub fn code(self) -> &'static str {
        match self {
            FindingKind::VerdictMismatch => "verdict-mismatch",
            FindingKind::PolicyDivergence => "policy-divergence",
            FindingKind::Property1 => "property-1",
            FindingKind::Property2Existential => "property-2-existential",
            FindingKind::Property2Universal => "property-2-universal",
            FindingKind::RhoUnsound => "rho-unsound",
            FindingKind::RhoIncomplete => "rho-incomplete",
            FindingKind::ReducedNonemptyTrue => "reduced-nonempty-true",
            FindingKind::PsiTruth => "psi-truth",
            FindingKind::PsiLemma => "psi-lemma",
            FindingKind::PsiReducedness => "psi-reducedness",
            FindingKind::OracleDisagreement => "oracle-disagreement",
            FindingKind::InternalInvariant => "internal-invariant",
        }
    }

    /// Findings that indicate a defect in this crate rather than in the
    /// procedure under test.
    pub fn is_bug(self) -> bool {
        matches!(
            self,
            FindingKind::OracleDisagreement | FindingKind::InternalInvariant
        )
    }

    /// Universal-witness failures of property (2) are recorded and banked
    /// but do not by themselves fail a single-instance check.
    pub fn is_reported_only(self) -> bool {
        self == FindingKind::Property2Universal
    }

    fn sections(self) -> Sections {
        let mut s = Sections::default();
        match self {
            FindingKind::VerdictMismatch => {
                s.policies = true;
                s.oracle = true;
            }
            FindingKind::PolicyDivergence => s.policies = true,
            FindingKind::Property1
            | FindingKind::Property2Existential
            | FindingKind::Property2Universal => s.properties = true,
            FindingKind::RhoUnsound | FindingKind::RhoIncomplete => {
                s.oracle = true;
                s.rho = true;
            }
            FindingKind::ReducedNonemptyTrue => {
                s.policies = true;
                s.reduced = true;
            }
            FindingKind::PsiTruth | FindingKind::PsiLemma | FindingKind::PsiReducedness => {
                s.psi = true
            }
            FindingKind::OracleDisagreement => s.oracle = true,
            FindingKind::InternalInvariant => s = Sections::all(),
        }
        s
    }
}

impl fmt::Display for FindingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for FindingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FindingKind::ALL
            .into_iter()
            .find(|k| k.code() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown finding kind {s:?}")))
    }
}

/// Oracle answer with refusal made explicit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OracleAnswer {
    True,
    False,
    Refused,
}

impl OracleAnswer {
    pub fn verdict(self) -> Option<Verdict> {
        match self {
            OracleAnswer::True => Some(Verdict::True),
            OracleAnswer::False => Some(Verdict::False),
            OracleAnswer::Refused => None,
        }
    }
}

impl From<Option<Verdict>> for OracleAnswer {
    fn from(v: Option<Verdict>) -> Self {
        match v {
            Some(Verdict::True) => OracleAnswer::True,
            Some(Verdict::False) => OracleAnswer::False,
            None => OracleAnswer::Refused,
        }
    }
}

impl fmt::Display for OracleAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleAnswer::True => f.write_str("TRUE"),
            OracleAnswer::False => f.write_str("FALSE"),
            OracleAnswer::Refused => f.write_str("REFUSED"),
        }
    }
}

/// `ρ_z` applied at the root, with both truth values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoCheck {
    pub literal: Literal,
    pub quantifier: Quantifier,
    /// Truth of `ρ_z(Φ)`; `None` if the oracle refused.
    pub reduced_verdict: Option<Verdict>,
}

#[derive(Clone, Debug)]
pub enum PsiOutcome {
    /// The construction's preconditions do not hold on this instance.
    Skipped(String),
    Refused(String),
    Checked(PsiLemmaReport),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DiffConfig {
    pub limits: OracleLimits,
}

#[derive(Clone, Copy, Debug, Default)]
struct Sections {
    policies: bool,
    oracle: bool,
    properties: bool,
    rho: bool,
    reduced: bool,
    psi: bool,
}

impl Sections {
    fn all() -> Sections {
        Sections {
            policies: true,
            oracle: true,
            properties: true,
            rho: true,
            reduced: true,
            psi: true,
        }
    }
}

/// Result of one differential run. Sections that were not run are empty.
#[derive(Clone, Debug)]
pub struct DiffResult {
    pub instance: Formula,
    /// Verdict under ASCENDING; `None` only after an internal failure.
    pub paper_verdict: Option<Verdict>,
    pub policy_verdicts: Vec<(ScanPolicy, Verdict)>,
    /// Stats of the ASCENDING run.
    pub stats: Option<DecideStats>,
    /// Universal steps of the ASCENDING run that left `¬z` behind.
    pub complement_survivals: usize,
    pub oracle: Option<OracleOutcome>,
    pub oracle_verdict: OracleAnswer,
    /// Defined only when the oracle answered.
    pub agree: Option<bool>,
    /// Number of closures examined for properties (1) and (2).
    pub property_checks: usize,
    /// Violated property reports only.
    pub property_violations: Vec<PropertyReport>,
    pub rho_checks: Vec<RhoCheck>,
    /// Clause count and truth of the ASCENDING residue when it is non-empty.
    pub reduced_check: Option<(usize, Option<Verdict>)>,
    pub psi: Option<PsiOutcome>,
    pub internal_errors: Vec<String>,
    pub findings: BTreeSet<FindingKind>,
}

impl DiffResult {
    fn empty(f: &Formula) -> DiffResult {
        DiffResult {
            instance: f.clone(),
            paper_verdict: None,
            policy_verdicts: Vec::new(),
            stats: None,
            complement_survivals: 0,
            oracle: None,
            oracle_verdict: OracleAnswer::Refused,
            agree: None,
            property_checks: 0,
            property_violations: Vec::new(),
            rho_checks: Vec::new(),
            reduced_check: None,
            psi: None,
            internal_errors: Vec::new(),
            findings: BTreeSet::new(),
        }
    }

    pub fn has_findings(&self) -> bool {
        !self.findings.is_empty()
    }
}

/// Runs every policy, both oracles and all invariant checks on `f`.
///
/// Fails only on malformed input; refusals and internal failures are recorded.
pub fn run_differential(f: &Formula, config: &DiffConfig) -> Result<DiffResult> {
    run_sections(f, config, Sections::all())
}

/// Whether `f` exhibits `kind`, running only the checks `kind` depends on.
/// Evaluates the same predicates as [`run_differential`].
pub fn triggers(f: &Formula, kind: FindingKind, config: &DiffConfig) -> bool {
    run_sections(f, config, kind.sections())
        .map(|r| r.findings.contains(&kind))
        .unwrap_or(false)
}

fn run_sections(f: &Formula, config: &DiffConfig, sections: Sections) -> Result<DiffResult> {
    f.ensure_valid()?;
    let limits = &config.limits;
    let mut r = DiffResult::empty(f);
    let mut ascending: Option<ReductionTrace> = None;

    if sections.policies {
        for policy in ScanPolicy::standard_set() {
            match decide(f, policy) {
                Ok(trace) => {
                    r.policy_verdicts.push((policy, trace.verdict));
                    if policy == ScanPolicy::Ascending {
                        ascending = Some(trace);
                    }
                }
                Err(e) => r.internal_errors.push(format!("decide under {policy}: {e}")),
            }
        }
        if let Some(t) = &ascending {
            r.paper_verdict = Some(t.verdict);
            r.stats = Some(t.stats);
            r.complement_survivals = t.steps.iter().filter(|s| s.complement_survives).count();
        }
        let distinct: BTreeSet<Verdict> = r.policy_verdicts.iter().map(|p| p.1).collect();
        if distinct.len() > 1 {
            r.findings.insert(FindingKind::PolicyDivergence);
        }
    }

    if sections.oracle {
        let outcome = evaluate_both(f, limits)?;
        if outcome.disagree() {
            r.findings.insert(FindingKind::OracleDisagreement);
        }
        r.oracle_verdict = outcome.verdict().into();
        r.oracle = Some(outcome);
        if let Some(truth) = r.oracle_verdict.verdict() {
            if sections.policies && r.internal_errors.is_empty() {
                let agree = r.policy_verdicts.iter().all(|p| p.1 == truth);
                r.agree = Some(agree);
                if !agree {
                    r.findings.insert(FindingKind::VerdictMismatch);
                }
            }
        }
    }

    if sections.properties {
        if let Err(e) = property_section(f, &mut r) {
            r.internal_errors.push(format!("property check: {e}"));
        }
    }

    if sections.rho {
        if let Err(e) = rho_section(f, limits, &mut r) {
            r.internal_errors.push(format!("reduction check: {e}"));
        }
    }

    if sections.reduced {
        if let Some(t) = &ascending {
            if t.final_clause_count > 0 {
                let truth = oracle_value(&t.residue, limits)?;
                r.reduced_check = Some((t.final_clause_count, truth));
                if truth == Some(Verdict::True) {
                    r.findings.insert(FindingKind::ReducedNonemptyTrue);
                }
            }
        }
    }

    if sections.psi {
        let outcome = match check_psi_lemma(&f.prune_prefix(), limits) {
            Ok(report) => {
                if !report.truth_preserved {
                    r.findings.insert(FindingKind::PsiTruth);
                }
                if !report.lemma_holds {
                    r.findings.insert(FindingKind::PsiLemma);
                }
                if !report.reducedness_preserved {
                    r.findings.insert(FindingKind::PsiReducedness);
                }
                PsiOutcome::Checked(report)
            }
            Err(Error::Precondition(msg)) => PsiOutcome::Skipped(msg),
            Err(Error::Refused(msg)) => PsiOutcome::Refused(msg),
            Err(e) => {
                r.internal_errors.push(format!("psi check: {e}"));
                PsiOutcome::Skipped(e.to_string())
            }
        };
        r.psi = Some(outcome);
    }

    if !r.internal_errors.is_empty() {
        r.findings.insert(FindingKind::InternalInvariant);
    }
    Ok(r)
}

fn oracle_value(f: &Formula, limits: &OracleLimits) -> Result<Option<Verdict>> {
    match eval_recursive(f, limits) {
        Ok(v) => Ok(Some(v.value)),
        Err(Error::Refused(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn occurring_literals(f: &Formula) -> Vec<Literal> {
    f.occurring_vars()
        .into_iter()
        .flat_map(|v| [Literal::positive(v), Literal::negative(v)])
        .collect()
}

fn property_section(f: &Formula, r: &mut DiffResult) -> Result<()> {
    let mut engine = ClosureEngine::new(f);
    for z in occurring_literals(f) {
        engine.run(z)?;
        r.property_checks += 1;
        let p1 = engine.property_1();
        if !p1.holds {
            r.findings.insert(FindingKind::Property1);
            r.property_violations.push(p1);
        }
        let p2 = engine.property_2();
        if !p2.holds {
            r.findings.insert(match p2.witness_quantifier {
                Some(Quantifier::Universal) => FindingKind::Property2Universal,
                _ => FindingKind::Property2Existential,
            });
            r.property_violations.push(p2);
        }
    }
    Ok(())
}

fn rho_section(f: &Formula, limits: &OracleLimits, r: &mut DiffResult) -> Result<()> {
    let truth = match r.oracle_verdict.verdict() {
        Some(v) => v,
        None => return Ok(()),
    };
    let mut engine = ClosureEngine::new(f);
    for z in occurring_literals(f) {
        engine.run(z)?;
        if !engine.covers_negation() {
            continue;
        }
        let reduced = apply_rho(f, z)?;
        let reduced_verdict = oracle_value(&reduced, limits)?;
        match (truth, reduced_verdict) {
            (Verdict::True, Some(Verdict::False)) => {
                r.findings.insert(FindingKind::RhoUnsound);
            }
            (Verdict::False, Some(Verdict::True)) => {
                r.findings.insert(FindingKind::RhoIncomplete);
            }
            _ => {}
        }
        r.rho_checks.push(RhoCheck {
            literal: z,
            quantifier: f.quantifier(z.var()).expect("occurring variables are bound"),
            reduced_verdict,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fixtures::*;
    use crate::fuzz::gen::{gen_random, GenParams, QuantPattern};
    use proptest::prelude::*;

    fn run(f: &Formula) -> DiffResult {
        run_differential(f, &DiffConfig::default()).unwrap()
    }

    #[test]
    fn fixtures_agree() {
        for (f, truth) in [
            (f_a(), Verdict::True),
            (f_b(), Verdict::False),
            (f_c(), Verdict::False),
            (f_d(), Verdict::True),
            (f_e(), Verdict::False),
        ] {
            let r = run(&f);
            assert_eq!(r.paper_verdict, Some(truth));
            assert_eq!(r.oracle_verdict.verdict(), Some(truth));
            assert_eq!(r.agree, Some(true));
            assert!(r.policy_verdicts.iter().all(|p| p.1 == truth));
            assert_eq!(r.policy_verdicts.len(), 5);
            assert!(!r.findings.contains(&FindingKind::VerdictMismatch));
            assert!(r.internal_errors.is_empty());
        }
    }

    #[test]
    fn refusal_leaves_agreement_undefined() {
        let config = DiffConfig {
            limits: OracleLimits {
                max_vars: 0,
                max_literals: 0,
            },
        };
        let r = run_differential(&f_e(), &config).unwrap();
        assert_eq!(r.oracle_verdict, OracleAnswer::Refused);
        assert_eq!(r.agree, None);
        assert!(r.rho_checks.is_empty());
    }

    #[test]
    fn finding_codes_round_trip() {
        for k in FindingKind::ALL {
            assert_eq!(k.code().parse::<FindingKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.code()));
        }
    }

    #[test]
    fn universal_property_2_witness_is_flagged() {
        let f = Formula::from_dimacs(
            &[(1, Quantifier::Existential), (2, Quantifier::Universal)],
            &[&[1], &[-2, -1]],
        );
        let r = run(&f);
        assert!(r.findings.contains(&FindingKind::Property2Universal));
        assert!(triggers(&f, FindingKind::Property2Universal, &DiffConfig::default()));
        assert!(!triggers(&f, FindingKind::Property1, &DiffConfig::default()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn targeted_checks_match_full_run(seed in any::<u64>(), p in 0.0f64..1.0, clauses in 1usize..14) {
            let params = GenParams {
                n_vars: 7,
                n_clauses: clauses,
                quant_pattern: QuantPattern::Random { p_universal: p },
                seed,
                ..GenParams::default()
            };
            let f = gen_random(&params).unwrap();
            let config = DiffConfig::default();
            let full = run_differential(&f, &config).unwrap();
            for k in FindingKind::ALL {
                prop_assert_eq!(triggers(&f, k, &config), full.findings.contains(&k), "{}", k);
            }
        }
    }
}
