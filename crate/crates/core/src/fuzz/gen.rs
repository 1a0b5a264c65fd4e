//! Seeded random instance generation.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, Literal, Prefix, Quantifier};

/// How prefix quantifiers are assigned to variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantPattern {
    /// Each variable is universal with probability `p_universal`.
    Random { p_universal: f64 },
    /// `∀ ∃ ∀ ∃ ...`, starting with the outermost variable.
    Alternating,
    /// One letter per variable, `a` or `e`.
    Fixed(String),
}

impl fmt::Display for QuantPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantPattern::Random { p_universal } => write!(f, "random:{p_universal}"),
            QuantPattern::Alternating => f.write_str("alternating"),
            QuantPattern::Fixed(s) => write!(f, "fixed:{s}"),
        }
    }
}

impl FromStr for QuantPattern {
    type Err = Error;

    /// Accepts `alternating`, `random:<p>` and `fixed:<letters>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("unknown quantifier pattern {s:?}"));
        if s.eq_ignore_ascii_case("alternating") {
            return Ok(QuantPattern::Alternating);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind.to_ascii_lowercase().as_str() {
            "random" => Ok(QuantPattern::Random {
                p_universal: arg.parse().map_err(|_| bad())?,
            }),
            "fixed" => Ok(QuantPattern::Fixed(arg.to_string())),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n_vars: u32,
    pub n_clauses: usize,
    pub width_min: usize,
    pub width_max: usize,
    pub quant_pattern: QuantPattern,
    pub allow_tautologies: bool,
    /// Each clause is empty with probability 1/8.
    pub allow_empty_clauses: bool,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n_vars: 6,
            n_clauses: 8,
            width_min: 1,
            width_max: 3,
            quant_pattern: QuantPattern::Random { p_universal: 0.5 },
            allow_tautologies: false,
            allow_empty_clauses: false,
            seed: 1,
        }
    }
}

impl GenParams {
    pub fn with_seed(&self, seed: u64) -> GenParams {
        GenParams {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.width_min < 1 || self.width_min > self.width_max {
            return bad(format!(
                "need 1 <= width_min <= width_max, got {}..{}",
                self.width_min, self.width_max
            ));
        }
        if self.width_max > self.n_vars as usize {
            return bad(format!(
                "width_max {} exceeds the {} variables",
                self.width_max, self.n_vars
            ));
        }
        if self.n_vars > crate::formula::MAX_VAR {
            return bad(format!("too many variables: {}", self.n_vars));
        }
        match &self.quant_pattern {
            QuantPattern::Random { p_universal } if !(0.0..=1.0).contains(p_universal) => {
                bad(format!("p_universal {p_universal} is not a probability"))
            }
            QuantPattern::Fixed(s) if s.chars().count() != self.n_vars as usize => bad(format!(
                "fixed pattern {s:?} does not have {} letters",
                self.n_vars
            )),
            QuantPattern::Fixed(s) if !s.chars().all(|c| c == 'a' || c == 'e') => {
                bad(format!("fixed pattern {s:?} may only contain 'a' and 'e'"))
            }
            _ => Ok(()),
        }
    }
}

/// A random formula over variables `1..=n_vars`, a pure function of `params`.
pub fn gen_random(params: &GenParams) -> Result<Formula> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n_vars;
    let fixed: Vec<char> = match &params.quant_pattern {
        QuantPattern::Fixed(s) => s.chars().collect(),
        _ => Vec::new(),
    };
    let prefix: Vec<(u32, Quantifier)> = (1..=n)
        .map(|v| {
            let universal = match &params.quant_pattern {
                QuantPattern::Random { p_universal } => rng.gen_bool(*p_universal),
                QuantPattern::Alternating => v % 2 == 1,
                QuantPattern::Fixed(_) => fixed[v as usize - 1] == 'a',
            };
            let q = if universal {
                Quantifier::Universal
            } else {
                Quantifier::Existential
            };
            (v, q)
        })
        .collect();

    let mut clauses = Vec::with_capacity(params.n_clauses);
    for _ in 0..params.n_clauses {
        if params.allow_empty_clauses && rng.gen_ratio(1, 8) {
            clauses.push(Vec::new());
            continue;
        }
        let width = rng.gen_range(params.width_min..=params.width_max);
        let vars: Vec<u32> = if params.allow_tautologies {
            (0..width).map(|_| rng.gen_range(1..=n)).collect()
        } else {
            sample(&mut rng, n as usize, width)
                .into_iter()
                .map(|i| i as u32 + 1)
                .collect()
        };
        clauses.push(
            vars.into_iter()
                .map(|v| Literal::new(v, rng.gen_bool(0.5)))
                .collect(),
        );
    }
    Ok(Formula::new(Prefix::new(prefix), clauses))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n_vars: u32, n_clauses: usize, widths: (usize, usize)) -> GenParams {
        GenParams {
            n_vars,
            n_clauses,
            width_min: widths.0,
            width_max: widths.1,
            ..GenParams::default()
        }
    }

    #[test]
    fn shape_of_small_fixed_instance() {
        let p = GenParams {
            quant_pattern: QuantPattern::Fixed("ae".into()),
            ..params(2, 2, (2, 2))
        };
        for seed in 0..20 {
            let f = gen_random(&p.with_seed(seed)).unwrap();
            assert_eq!(f.num_clauses(), 2);
            assert!(f.clauses().iter().all(|c| c.len() == 2 && !c.is_tautology()));
            assert_eq!(
                f.prefix().entries(),
                &[(1, Quantifier::Universal), (2, Quantifier::Existential)]
            );
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let p = params(10, 20, (1, 4));
        assert_eq!(gen_random(&p).unwrap(), gen_random(&p).unwrap());
        let differs = (2..10).any(|s| gen_random(&p.with_seed(s)).unwrap() != gen_random(&p).unwrap());
        assert!(differs);
    }

    #[test]
    fn empty_matrix_and_invalid_params() {
        assert_eq!(gen_random(&params(3, 0, (1, 2))).unwrap().num_clauses(), 0);
        assert!(gen_random(&params(3, 1, (0, 2))).is_err());
        assert!(gen_random(&params(3, 1, (3, 2))).is_err());
        assert!(gen_random(&params(2, 1, (1, 3))).is_err());
        let bad_fixed = GenParams {
            quant_pattern: QuantPattern::Fixed("aex".into()),
            ..params(3, 1, (1, 2))
        };
        assert!(gen_random(&bad_fixed).is_err());
    }

    #[test]
    fn alternating_starts_universal() {
        let p = GenParams {
            quant_pattern: QuantPattern::Alternating,
            ..params(4, 3, (1, 2))
        };
        let f = gen_random(&p).unwrap();
        let qs: String = f.prefix().entries().iter().map(|e| e.1.letter()).collect();
        assert_eq!(qs, "aeae");
    }

    #[test]
    fn pattern_round_trip() {
        for s in ["alternating", "random:0.5", "fixed:aea"] {
            assert_eq!(s.parse::<QuantPattern>().unwrap().to_string(), s);
        }
        assert!("zigzag".parse::<QuantPattern>().is_err());
    }

    #[test]
    fn no_empty_clauses_unless_allowed() {
        let p = params(5, 30, (1, 3));
        let with_empty = GenParams {
            allow_empty_clauses: true,
            ..p.clone()
        };
        let mut saw_empty = false;
        for seed in 0..50 {
            assert!(!gen_random(&p.with_seed(seed)).unwrap().has_empty_clause());
            saw_empty |= gen_random(&with_empty.with_seed(seed)).unwrap().has_empty_clause();
        }
        assert!(saw_empty);
    }

    #[test]
    fn generated_formulas_are_well_formed() {
        let p = GenParams {
            allow_tautologies: true,
            allow_empty_clauses: true,
            ..params(6, 12, (1, 6))
        };
        for seed in 0..100 {
            assert!(gen_random(&p.with_seed(seed)).unwrap().validate().is_empty());
        }
    }
}
