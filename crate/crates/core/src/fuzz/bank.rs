//! On-disk counterexample bank: `<hash>.qdimacs` plus `<hash>.json` per finding.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::diff::{run_differential, triggers, DiffConfig, FindingKind, OracleAnswer};
use super::gen::GenParams;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::oracle::{evaluate_both, OracleLimits};
use crate::qdimacs::{parse_qdimacs, write_qdimacs, ParseOptions};
use crate::Verdict;

pub const COUNTEREXAMPLE_SCHEMA: &str = "qrl-counterexample/1";

/// Hex digits of the SHA-256 of the canonical QDIMACS text used as a name.
const HASH_LEN: usize = 16;

pub fn formula_hash(f: &Formula) -> Result<String> {
    Ok(text_hash(&write_qdimacs(f)?))
}

fn text_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(digest)[..HASH_LEN].to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleMeta {
    pub schema: String,
    /// Generator seed of the instance this was shrunk from, if generated.
    pub seed: Option<u64>,
    pub params: Option<GenParams>,
    pub paper_verdict: Option<Verdict>,
    pub oracle_verdict: OracleAnswer,
    /// Verdicts of the recursive and elimination oracles.
    pub oracle_verdicts: [OracleAnswer; 2],
    pub violated_invariants: Vec<FindingKind>,
    /// Hash of the instance before shrinking.
    pub shrunk_from: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Persisted {
    pub hash: String,
    /// `false` when the bank already held this instance.
    pub created: bool,
}

#[derive(Clone, Debug)]
pub struct BankEntry {
    pub hash: String,
    pub formula: Formula,
    pub meta: CounterexampleMeta,
}

/// Outcome of re-running one banked instance.
#[derive(Clone, Debug)]
pub struct BankCheck {
    pub hash: String,
    /// Recorded findings that no longer trigger.
    pub missing: Vec<FindingKind>,
    /// Both oracles answered and agree with the recorded verdict.
    pub oracles_confirm: bool,
}

impl BankCheck {
    pub fn ok(&self) -> bool {
        self.missing.is_empty() && self.oracles_confirm
    }
}

/// Builds the metadata for `f` by running the full differential check on it.
pub fn describe(
    f: &Formula,
    config: &DiffConfig,
    seed: Option<u64>,
    params: Option<&GenParams>,
    shrunk_from: Option<String>,
) -> Result<CounterexampleMeta> {
    let r = run_differential(f, config)?;
    let outcome = r.oracle.as_ref().expect("differential run includes the oracles");
    let answer = |x: &std::result::Result<crate::oracle::OracleVerdict, String>| {
        OracleAnswer::from(x.as_ref().ok().map(|v| v.value))
    };
    Ok(CounterexampleMeta {
        schema: COUNTEREXAMPLE_SCHEMA.to_string(),
        seed,
        params: params.cloned(),
        paper_verdict: r.paper_verdict,
        oracle_verdict: r.oracle_verdict,
        oracle_verdicts: [answer(&outcome.recursive), answer(&outcome.elimination)],
        violated_invariants: r.findings.into_iter().collect(),
        shrunk_from,
    })
}

pub struct Bank {
    dir: PathBuf,
}

impl Bank {
    /// Opens `dir`, creating it if needed.
    pub fn open(dir: impl AsRef<Path>) -> Result<Bank> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Bank {
            dir: dir.as_ref().to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn contains(&self, hash: &str) -> bool {
        self.dir.join(format!("{hash}.json")).exists()
    }

    /// Writes `f` and `meta` unless the bank already holds `f`. Existing
    /// entries are never overwritten.
    pub fn persist(&self, f: &Formula, meta: &CounterexampleMeta) -> Result<Persisted> {
        let text = write_qdimacs(f)?;
        let hash = text_hash(&text);
        if self.contains(&hash) {
            return Ok(Persisted {
                hash,
                created: false,
            });
        }
        let mut json = serde_json::to_string_pretty(meta)?;
        json.push('\n');
        self.write_atomic(&format!("{hash}.qdimacs"), &text)?;
        self.write_atomic(&format!("{hash}.json"), &json)?;
        Ok(Persisted {
            hash,
            created: true,
        })
    }

    fn write_atomic(&self, name: &str, contents: &str) -> Result<()> {
        let tmp = self
            .dir
            .join(format!(".{name}.{}.tmp", std::process::id()));
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
        fs::rename(&tmp, self.dir.join(name))?;
        Ok(())
    }

    /// All complete entries, sorted by hash.
    pub fn entries(&self) -> Result<Vec<BankEntry>> {
        let mut hashes: Vec<String> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                name.strip_suffix(".json")
                    .filter(|h| !h.starts_with('.'))
                    .map(str::to_string)
            })
            .collect();
        hashes.sort();
        hashes.into_iter().map(|h| self.load(&h)).collect()
    }

    pub fn load(&self, hash: &str) -> Result<BankEntry> {
        let text = fs::read_to_string(self.dir.join(format!("{hash}.qdimacs")))?;
        let formula = parse_qdimacs(&text, ParseOptions::strict())?;
        let meta: CounterexampleMeta =
            serde_json::from_str(&fs::read_to_string(self.dir.join(format!("{hash}.json")))?)?;
        if meta.schema != COUNTEREXAMPLE_SCHEMA {
            return Err(Error::InvalidParams(format!(
                "{hash}.json has schema {:?}",
                meta.schema
            )));
        }
        Ok(BankEntry {
            hash: hash.to_string(),
            formula,
            meta,
        })
    }

    /// Re-runs every entry from its file and checks that each recorded
    /// finding still triggers and that both oracles confirm the verdict.
    pub fn validate(&self, config: &DiffConfig) -> Result<Vec<BankCheck>> {
        self.entries()?
            .into_iter()
            .map(|e| check_entry(&e, &config.limits, config))
            .collect()
    }
}

fn check_entry(e: &BankEntry, limits: &OracleLimits, config: &DiffConfig) -> Result<BankCheck> {
    let missing = e
        .meta
        .violated_invariants
        .iter()
        .copied()
        .filter(|&k| !triggers(&e.formula, k, config))
        .collect();
    let outcome = evaluate_both(&e.formula, limits)?;
    let oracles_confirm = outcome.confirmed().is_some()
        && OracleAnswer::from(outcome.confirmed()) == e.meta.oracle_verdict;
    Ok(BankCheck {
        hash: e.hash.clone(),
        missing,
        oracles_confirm,
    })
}
