//! Seed-indexed fuzzing campaigns and their JSON report.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bank::{describe, formula_hash, Bank, CounterexampleMeta};
use super::diff::{run_differential, triggers, DiffConfig, DiffResult, FindingKind, OracleAnswer, PsiOutcome};
use super::gen::{gen_random, GenParams};
use super::shrink::shrink;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::qdimacs::{parse_qdimacs, write_qdimacs, ParseOptions};

pub const REPORT_SCHEMA: &str = "qrl-report/1";

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    /// Instance `i` is generated from `params.seed + i`.
    pub params: GenParams,
    pub count: u64,
    pub workers: usize,
    pub bank: Option<PathBuf>,
    pub diff: DiffConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Counters {
    pub instances: u64,
    pub oracle_refusals: u64,
    pub refusal_rate: f64,
    pub agreements: u64,
    pub disagreements: u64,
    /// Over instances the oracle answered; `null` when there were none.
    pub agreement_rate: Option<f64>,
    pub clean_instances: u64,
    pub instances_with_findings: u64,
    /// Instances neither clean nor backed by a confirmed, re-triggering counterexample.
    pub unclassified: u64,
    pub internal_errors: u64,
    pub property_checks: u64,
    pub rho_checks: u64,
    pub reduced_checks: u64,
    pub complement_survivals: u64,
    pub decide_steps: u64,
    pub max_closure_iterations: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiCounters {
    pub checked: u64,
    pub skipped: u64,
    pub refused: u64,
    pub truth_antecedent: u64,
    pub truth_holds: u64,
    pub truth_violations: u64,
    pub lemma_holds: u64,
    pub lemma_violations: u64,
    /// Removed pivot clauses outside `C_Φ(z)`, summed over instances.
    pub pivot_clause_cases: u64,
    pub reducedness_antecedent: u64,
    pub reducedness_holds: u64,
    pub reducedness_violations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FindingEntry {
    pub hash: String,
    /// Finding kinds this instance was shrunk for.
    pub targets: Vec<FindingKind>,
    pub violated_invariants: Vec<FindingKind>,
    pub paper_verdict: Option<crate::Verdict>,
    pub oracle_verdict: OracleAnswer,
    pub first_seed: u64,
    /// Number of `(instance, kind)` pairs that shrank to this entry.
    pub instances: u64,
}

/// Wall-clock measurements; the only part of a report that may differ
/// between runs with the same parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub workers: usize,
    pub wall_ms: u64,
    pub instance_us_p50: u64,
    pub instance_us_p90: u64,
    pub instance_us_p99: u64,
    pub instance_us_max: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub schema: String,
    pub params: GenParams,
    pub count: u64,
    pub counters: Counters,
    /// Instances exhibiting each finding kind.
    pub violations: BTreeMap<FindingKind, u64>,
    pub psi: PsiCounters,
    pub findings: Vec<FindingEntry>,
    pub timing: Timing,
}

impl FuzzReport {
    /// The report without its timing section, for comparing runs.
    pub fn body(&self) -> FuzzReport {
        FuzzReport {
            timing: Timing::default(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn finding_hashes(&self) -> BTreeSet<String> {
        self.findings.iter().map(|f| f.hash.clone()).collect()
    }
}

struct Shrunk {
    kind: FindingKind,
    formula: Formula,
    hash: String,
    meta: CounterexampleMeta,
    /// Re-parsed from its canonical text, the instance still triggers `kind`
    /// and both oracles agree on it.
    confirmed: bool,
}

struct InstanceOutcome {
    seed: u64,
    result: DiffResult,
    shrunk: Vec<Shrunk>,
    micros: u64,
}

/// Shrinks `f` for `kind` and prepares its bank entry.
pub fn minimize_finding(
    f: &Formula,
    kind: FindingKind,
    config: &DiffConfig,
    seed: Option<u64>,
    params: Option<&GenParams>,
) -> Result<(Formula, CounterexampleMeta, bool)> {
    let small = shrink(f, |g| triggers(g, kind, config))?;
    let meta = describe(&small, config, seed, params, Some(formula_hash(f)?))?;
    let reparsed = parse_qdimacs(&write_qdimacs(&small)?, ParseOptions::strict())?;
    let confirmed = triggers(&reparsed, kind, config)
        && meta.violated_invariants.contains(&kind)
        && meta.oracle_verdicts[0] == meta.oracle_verdicts[1]
        && meta.oracle_verdicts[0] != OracleAnswer::Refused;
    Ok((small, meta, confirmed))
}

fn run_instance(config: &CampaignConfig, i: u64) -> Result<InstanceOutcome> {
    let start = Instant::now();
    let seed = config.params.seed.wrapping_add(i);
    let params = config.params.with_seed(seed);
    let f = gen_random(&params)?;
    let result = run_differential(&f, &config.diff)?;
    let mut shrunk = Vec::new();
    for &kind in &result.findings {
        let (formula, meta, confirmed) =
            minimize_finding(&f, kind, &config.diff, Some(seed), Some(&config.params))?;
        shrunk.push(Shrunk {
            kind,
            hash: formula_hash(&formula)?,
            formula,
            meta,
            confirmed,
        });
    }
    Ok(InstanceOutcome {
        seed,
        result,
        shrunk,
        micros: start.elapsed().as_micros() as u64,
    })
}

/// Runs `count` instances, shrinks and banks every finding, and aggregates
/// the report. Everything except [`Timing`] is independent of `workers`.
pub fn campaign(config: &CampaignConfig) -> Result<FuzzReport> {
    config.params.validate()?;
    let start = Instant::now();
    let bank = config.bank.as_ref().map(Bank::open).transpose()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("cannot start workers: {e}")))?;
    let outcomes: Vec<InstanceOutcome> = pool.install(|| {
        (0..config.count)
            .into_par_iter()
            .map(|i| run_instance(config, i))
            .collect::<Result<_>>()
    })?;

    let mut report = FuzzReport {
        schema: REPORT_SCHEMA.to_string(),
        params: config.params.clone(),
        count: config.count,
        counters: Counters::default(),
        violations: FindingKind::ALL.iter().map(|&k| (k, 0)).collect(),
        psi: PsiCounters::default(),
        findings: Vec::new(),
        timing: Timing::default(),
    };
    let mut entries: BTreeMap<String, FindingEntry> = BTreeMap::new();
    let mut micros = Vec::with_capacity(outcomes.len());
    for o in &outcomes {
        micros.push(o.micros);
        tally(&mut report, &o.result);
        let c = &mut report.counters;
        let classified = if o.result.findings.is_empty() {
            c.clean_instances += 1;
            o.result.oracle_verdict != OracleAnswer::Refused
        } else {
            c.instances_with_findings += 1;
            o.shrunk.iter().all(|s| s.confirmed)
        };
        if !classified {
            c.unclassified += 1;
        }
        for s in &o.shrunk {
            if let Some(bank) = &bank {
                bank.persist(&s.formula, &s.meta)?;
            }
            let e = entries.entry(s.hash.clone()).or_insert_with(|| FindingEntry {
                hash: s.hash.clone(),
                targets: Vec::new(),
                violated_invariants: s.meta.violated_invariants.clone(),
                paper_verdict: s.meta.paper_verdict,
                oracle_verdict: s.meta.oracle_verdict,
                first_seed: o.seed,
                instances: 0,
            });
            if !e.targets.contains(&s.kind) {
                e.targets.push(s.kind);
                e.targets.sort();
            }
            e.instances += 1;
        }
    }
    let c = &mut report.counters;
    c.instances = config.count;
    let answered = c.agreements + c.disagreements;
    c.agreement_rate = (answered > 0).then(|| c.agreements as f64 / answered as f64);
    c.refusal_rate = if c.instances > 0 {
        c.oracle_refusals as f64 / c.instances as f64
    } else {
        0.0
    };
    report.findings = entries.into_values().collect();

    micros.sort_unstable();
    let pct = |p: usize| -> u64 {
        if micros.is_empty() {
            0
        } else {
            micros[((micros.len() - 1) * p) / 100]
        }
    };
    report.timing = Timing {
        workers: config.workers.max(1),
        wall_ms: start.elapsed().as_millis() as u64,
        instance_us_p50: pct(50),
        instance_us_p90: pct(90),
        instance_us_p99: pct(99),
        instance_us_max: micros.last().copied().unwrap_or(0),
    };
    Ok(report)
}

fn tally(report: &mut FuzzReport, r: &DiffResult) {
    let c = &mut report.counters;
    match r.agree {
        Some(true) => c.agreements += 1,
        Some(false) => c.disagreements += 1,
        None => {}
    }
    if r.oracle_verdict == OracleAnswer::Refused {
        c.oracle_refusals += 1;
    }
    if !r.internal_errors.is_empty() {
        c.internal_errors += 1;
    }
    c.property_checks += r.property_checks as u64;
    c.rho_checks += r.rho_checks.len() as u64;
    c.reduced_checks += r.reduced_check.is_some() as u64;
    c.complement_survivals += r.complement_survivals as u64;
    if let Some(s) = &r.stats {
        c.decide_steps += s.steps as u64;
        c.max_closure_iterations = c.max_closure_iterations.max(s.max_closure_iterations as u64);
    }
    for k in &r.findings {
        *report.violations.entry(*k).or_insert(0) += 1;
    }

    let p = &mut report.psi;
    match &r.psi {
        Some(PsiOutcome::Checked(x)) => {
            p.checked += 1;
            if x.phi_verdict.is_true() {
                p.truth_antecedent += 1;
                if x.truth_preserved {
                    p.truth_holds += 1;
                }
            }
            p.truth_violations += !x.truth_preserved as u64;
            if x.lemma_holds {
                p.lemma_holds += 1;
            } else {
                p.lemma_violations += 1;
            }
            p.pivot_clause_cases += x.pivot_clause_cases as u64;
            if x.phi_reduced {
                p.reducedness_antecedent += 1;
                if x.psi_reduced {
                    p.reducedness_holds += 1;
                }
            }
            p.reducedness_violations += !x.reducedness_preserved as u64;
        }
        Some(PsiOutcome::Skipped(_)) => p.skipped += 1,
        Some(PsiOutcome::Refused(_)) => p.refused += 1,
        None => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(count: u64, workers: usize) -> CampaignConfig {
        CampaignConfig {
            params: GenParams {
                n_vars: 4,
                n_clauses: 5,
                ..GenParams::default()
            },
            count,
            workers,
            bank: None,
            diff: DiffConfig::default(),
        }
    }

    #[test]
    fn empty_campaign() {
        let r = campaign(&config(0, 1)).unwrap();
        assert_eq!(r.counters.instances, 0);
        assert!(r.findings.is_empty());
        assert_eq!(r.counters.agreement_rate, None);
    }

    #[test]
    fn small_campaign_is_classified_and_worker_independent() {
        let a = campaign(&config(60, 1)).unwrap();
        let b = campaign(&config(60, 3)).unwrap();
        assert_eq!(a.body(), b.body());
        assert_eq!(a.counters.instances, 60);
        assert_eq!(a.counters.unclassified, 0);
        assert_eq!(a.counters.internal_errors, 0);
        assert_eq!(a.counters.oracle_refusals, 0);
        assert_eq!(
            a.counters.clean_instances + a.counters.instances_with_findings,
            60
        );
    }
}
