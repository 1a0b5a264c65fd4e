//! JSON form of a reduction trace, schema `qrl-trace/1`.

use serde::{Deserialize, Serialize};

use crate::formula::{Literal, Quantifier};
use crate::reducer::ReductionTrace;
use crate::Verdict;

pub const TRACE_SCHEMA: &str = "qrl-trace/1";

/// Explicitly signed literal: `+3` or `-3`.
pub fn signed_literal(u: Literal) -> String {
    if u.is_positive() {
        format!("+{}", u.var())
    } else {
        format!("-{}", u.var())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStepJson {
    pub literal: String,
    pub quantifier: Quantifier,
    pub s_set: Vec<String>,
    pub removed_clause_ids: Vec<u32>,
    pub size_before: usize,
    pub size_after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub schema: String,
    pub verdict: Verdict,
    pub steps: Vec<TraceStepJson>,
    pub final_clause_count: usize,
}

impl From<&ReductionTrace> for TraceJson {
    fn from(trace: &ReductionTrace) -> Self {
        TraceJson {
            schema: TRACE_SCHEMA.to_string(),
            verdict: trace.verdict,
            steps: trace
                .steps
                .iter()
                .map(|s| TraceStepJson {
                    literal: signed_literal(s.chosen),
                    quantifier: s.quantifier,
                    s_set: s.s_set.iter().copied().map(signed_literal).collect(),
                    removed_clause_ids: s.covered.iter().map(|id| id.0).collect(),
                    size_before: s.size_before,
                    size_after: s.size_after,
                })
                .collect(),
            final_clause_count: trace.final_clause_count,
        }
    }
}

pub fn write_trace(trace: &ReductionTrace) -> String {
    let mut text = serde_json::to_string_pretty(&TraceJson::from(trace)).expect("trace serializes");
    text.push('\n');
    text
}
