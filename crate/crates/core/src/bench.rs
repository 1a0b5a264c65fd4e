//! Scaling measurements of `decide` on growing instance families.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, Literal, Prefix, Quantifier};
use crate::fuzz::gen::{gen_random, GenParams, QuantPattern};
use crate::reducer::{decide, ScanPolicy};
use crate::Verdict;

pub const BENCH_SCHEMA: &str = "qrl-bench/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchFamily {
    /// Alternating prefix, random 3-clauses, two clauses per variable.
    RandomAlternating,
    /// Existential prefix, random 3-clauses, four clauses per variable.
    RandomExistential,
    /// `∀x1 ∃x2 ∀x3 ...` with the implication chain `x_i → x_{i+1}` and `(x1)`.
    Chain,
}

impl fmt::Display for BenchFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchFamily::RandomAlternating => "random-alternating",
            BenchFamily::RandomExistential => "random-existential",
            BenchFamily::Chain => "chain",
        })
    }
}

impl FromStr for BenchFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-alternating" => Ok(BenchFamily::RandomAlternating),
            "random-existential" => Ok(BenchFamily::RandomExistential),
            "chain" => Ok(BenchFamily::Chain),
            _ => Err(Error::InvalidParams(format!("unknown bench family {s:?}"))),
        }
    }
}

impl BenchFamily {
    /// A member of the family whose size is close to `target`.
    pub fn instance(self, target: usize, seed: u64) -> Result<Formula> {
        let random = |per_var: usize, pattern: QuantPattern| {
            let n = (target / (1 + 4 * per_var)).max(3);
            gen_random(&GenParams {
                n_vars: n as u32,
                n_clauses: per_var * n,
                width_min: 3,
                width_max: 3,
                quant_pattern: pattern,
                allow_tautologies: false,
                allow_empty_clauses: false,
                seed,
            })
        };
        match self {
            BenchFamily::RandomAlternating => random(2, QuantPattern::Alternating),
            BenchFamily::RandomExistential => random(4, QuantPattern::Random { p_universal: 0.0 }),
            BenchFamily::Chain => {
                let n = (target / 4).max(2) as u32;
                let prefix = (1..=n)
                    .map(|v| {
                        let q = if v % 2 == 1 {
                            Quantifier::Universal
                        } else {
                            Quantifier::Existential
                        };
                        (v, q)
                    })
                    .collect();
                let mut clauses = vec![vec![Literal::positive(1)]];
                clauses.extend((1..n).map(|v| vec![Literal::negative(v), Literal::positive(v + 1)]));
                Ok(Formula::new(Prefix::new(prefix), clauses))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub family: BenchFamily,
    pub max_size: usize,
    /// Number of sizes, spaced geometrically from `min_size` to `max_size`.
    pub samples: usize,
    pub min_size: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            family: BenchFamily::RandomAlternating,
            max_size: 10_000,
            samples: 8,
            min_size: 64,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub target_size: usize,
    pub size: usize,
    pub vars: usize,
    pub clauses: usize,
    pub verdict: Verdict,
    pub steps: usize,
    pub closures: usize,
    pub closure_iterations: usize,
    pub max_closure_iterations: usize,
    /// `steps <= size`
    pub steps_within_size: bool,
    /// `max_closure_iterations <= 2 * vars + 1`
    pub iterations_within_bound: bool,
    pub micros: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: String,
    pub family: BenchFamily,
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log time against log size.
    pub fitted_exponent: Option<f64>,
    pub bounds_hold: bool,
}

fn sizes(config: &BenchConfig) -> Vec<usize> {
    match config.samples {
        0 => Vec::new(),
        1 => vec![config.max_size],
        k => {
            let lo = config.min_size.min(config.max_size).max(1) as f64;
            let ratio = (config.max_size as f64 / lo).powf(1.0 / (k - 1) as f64);
            (0..k)
                .map(|i| (lo * ratio.powi(i as i32)).round() as usize)
                .collect()
        }
    }
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    let mut rows = Vec::new();
    for (i, target) in sizes(config).into_iter().enumerate() {
        let f = config.family.instance(target, config.seed.wrapping_add(i as u64))?;
        let start = Instant::now();
        let trace = decide(&f, ScanPolicy::Ascending)?;
        let micros = start.elapsed().as_micros() as u64;
        let s = trace.stats;
        rows.push(BenchRow {
            target_size: target,
            size: f.size(),
            vars: f.num_vars(),
            clauses: f.num_clauses(),
            verdict: trace.verdict,
            steps: s.steps,
            closures: s.closures,
            closure_iterations: s.closure_iterations,
            max_closure_iterations: s.max_closure_iterations,
            steps_within_size: s.steps <= f.size(),
            iterations_within_bound: s.max_closure_iterations <= 2 * f.num_vars() + 1,
            micros,
        });
    }
    let bounds_hold = rows
        .iter()
        .all(|r| r.steps_within_size && r.iterations_within_bound);
    Ok(BenchReport {
        schema: BENCH_SCHEMA.to_string(),
        family: config.family,
        fitted_exponent: fit_exponent(&rows),
        rows,
        bounds_hold,
    })
}

fn fit_exponent(rows: &[BenchRow]) -> Option<f64> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.micros > 0 && r.size > 0)
        .map(|r| ((r.size as f64).ln(), (r.micros as f64).ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_samples_no_rows() {
        let r = run_bench(&BenchConfig {
            samples: 0,
            ..BenchConfig::default()
        })
        .unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.fitted_exponent, None);
        assert!(r.bounds_hold);
    }

    #[test]
    fn sizes_are_geometric_and_end_at_max() {
        let s = sizes(&BenchConfig {
            samples: 3,
            min_size: 100,
            max_size: 10_000,
            ..BenchConfig::default()
        });
        assert_eq!(s, vec![100, 1000, 10_000]);
    }

    #[test]
    fn family_sizes_track_target() {
        for family in [BenchFamily::RandomAlternating, BenchFamily::RandomExistential, BenchFamily::Chain] {
            let f = family.instance(2000, 1).unwrap();
            assert!(f.size() > 1000 && f.size() < 3000, "{family}: {}", f.size());
            assert_eq!(family.to_string().parse::<BenchFamily>().unwrap(), family);
        }
    }

    #[test]
    fn exponent_of_exact_power_law() {
        let row = |size: usize, micros: u64| BenchRow {
            target_size: size,
            size,
            vars: 1,
            clauses: 1,
            verdict: Verdict::True,
            steps: 0,
            closures: 0,
            closure_iterations: 0,
            max_closure_iterations: 0,
            steps_within_size: true,
            iterations_within_bound: true,
            micros,
        };
        let e = fit_exponent(&[row(10, 100), row(100, 10_000), row(1000, 1_000_000)]).unwrap();
        assert!((e - 2.0).abs() < 1e-9);
    }
}
