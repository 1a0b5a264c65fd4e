//! QDIMACS 1.1 reading and canonical writing.
//!
//! ```text
//! c optional comments
//! p cnf <nvars> <nclauses>
//! a 1 0
//! e 2 0
//! 1 2 0
//! -1 -2 0
//! ```
//!
//! Parsing is strict by default. [`ParseOptions::lenient`] accepts adjacent
//! blocks of the same quantifier (merged), empty quantifier blocks, a clause
//! count that differs from the header, and free variables, which are bound
//! existentially in front of the prefix in ascending order.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Formula, Literal, Prefix, Quantifier, MAX_VAR};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParseErrorKind {
    InvalidUtf8,
    MissingHeader,
    BadHeader,
    DuplicateHeader,
    TooManyVariables,
    BadToken,
    VarOutOfRange,
    UnterminatedClause,
    UnterminatedQuantifier,
    EmptyQuantifierBlock,
    DuplicateQuantification,
    AdjacentQuantifierBlocks,
    MisplacedQuantifier,
    FreeVariable,
    ClauseCountMismatch,
}

impl ParseErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ParseErrorKind::InvalidUtf8 => "invalid-utf8",
            ParseErrorKind::MissingHeader => "missing-header",
            ParseErrorKind::BadHeader => "bad-header",
            ParseErrorKind::DuplicateHeader => "duplicate-header",
            ParseErrorKind::TooManyVariables => "too-many-variables",
            ParseErrorKind::BadToken => "bad-token",
            ParseErrorKind::VarOutOfRange => "var-out-of-range",
            ParseErrorKind::UnterminatedClause => "unterminated-clause",
            ParseErrorKind::UnterminatedQuantifier => "unterminated-quantifier",
            ParseErrorKind::EmptyQuantifierBlock => "empty-quantifier-block",
            ParseErrorKind::DuplicateQuantification => "duplicate-quantification",
            ParseErrorKind::AdjacentQuantifierBlocks => "adjacent-quantifier-blocks",
            ParseErrorKind::MisplacedQuantifier => "misplaced-quantifier",
            ParseErrorKind::FreeVariable => "free-variable",
            ParseErrorKind::ClauseCountMismatch => "clause-count-mismatch",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// A parse failure, located at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostics {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}: {}",
            self.line, self.column, self.kind, self.message
        )
    }
}

impl std::error::Error for ParseDiagnostics {}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub lenient: bool,
}

impl ParseOptions {
    pub fn strict() -> Self {
        ParseOptions { lenient: false }
    }

    pub fn lenient() -> Self {
        ParseOptions { lenient: true }
    }
}

fn diag(line: usize, column: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseDiagnostics {
    ParseDiagnostics {
        line,
        column,
        kind,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_ascii_whitespace())?;
        let len = rest[start..]
            .find(|c: char| c.is_ascii_whitespace())
            .unwrap_or(rest.len() - start);
        let token = &rest[start..start + len];
        let column = offset + start + 1;
        offset += start + len;
        rest = &rest[start + len..];
        Some((column, token))
    })
}

/// Parses raw bytes, reporting invalid UTF-8 as a diagnostic.
pub fn parse_qdimacs_bytes(bytes: &[u8], options: ParseOptions) -> Result<Formula, ParseDiagnostics> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_qdimacs(text, options),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let column = valid.len() - valid.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1) + 1;
            Err(diag(line, column, ParseErrorKind::InvalidUtf8, "input is not valid UTF-8"))
        }
    }
}

struct Header {
    nvars: u32,
    nclauses: u64,
}

pub fn parse_qdimacs(text: &str, options: ParseOptions) -> Result<Formula, ParseDiagnostics> {
    use ParseErrorKind::*;

    let mut header: Option<Header> = None;
    let mut blocks: Vec<(Quantifier, Vec<u32>)> = Vec::new();
    let mut quantified: BTreeSet<u32> = BTreeSet::new();
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    // (line, column) of the first occurrence of each literal variable
    let mut first_seen: Vec<(u32, usize, usize)> = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut pending_start = (0, 0);
    let mut in_matrix = false;
    let mut last_line = 1;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let mut toks = tokens(line).peekable();
        let Some(&(col0, first)) = toks.peek() else {
            continue;
        };
        if first.starts_with('c') {
            continue;
        }
        if first == "p" {
            if header.is_some() {
                return Err(diag(lineno, col0, DuplicateHeader, "second problem line"));
            }
            let parts: Vec<(usize, &str)> = toks.collect();
            if parts.len() != 4 || parts[1].1 != "cnf" {
                return Err(diag(lineno, col0, BadHeader, "expected `p cnf <nvars> <nclauses>`"));
            }
            let nvars: u64 = parts[2]
                .1
                .parse()
                .map_err(|_| diag(lineno, parts[2].0, BadHeader, "variable count is not a nonnegative integer"))?;
            let nclauses: u64 = parts[3]
                .1
                .parse()
                .map_err(|_| diag(lineno, parts[3].0, BadHeader, "clause count is not a nonnegative integer"))?;
            if nvars > MAX_VAR as u64 {
                return Err(diag(
                    lineno,
                    parts[2].0,
                    TooManyVariables,
                    format!("{nvars} variables exceed the supported maximum of {MAX_VAR}"),
                ));
            }
            header = Some(Header {
                nvars: nvars as u32,
                nclauses,
            });
            continue;
        }
        let Some(h) = &header else {
            return Err(diag(lineno, col0, MissingHeader, "expected `p cnf` before any data"));
        };

        if let Some(q) = (first.len() == 1).then(|| first.chars().next()).flatten().and_then(Quantifier::from_letter) {
            if in_matrix || !pending.is_empty() {
                return Err(diag(lineno, col0, MisplacedQuantifier, "quantifier line after the first clause"));
            }
            toks.next();
            let mut vars = Vec::new();
            let mut terminated = false;
            for (col, tok) in toks {
                if terminated {
                    return Err(diag(lineno, col, BadToken, format!("unexpected {tok:?} after terminating 0")));
                }
                let v: u64 = tok
                    .parse()
                    .map_err(|_| diag(lineno, col, BadToken, format!("{tok:?} is not a variable index")))?;
                if v == 0 {
                    terminated = true;
                    continue;
                }
                if v > h.nvars as u64 {
                    return Err(diag(lineno, col, VarOutOfRange, format!("variable {v} exceeds declared {}", h.nvars)));
                }
                let v = v as u32;
                if !quantified.insert(v) {
                    return Err(diag(lineno, col, DuplicateQuantification, format!("variable {v} is quantified twice")));
                }
                vars.push(v);
            }
            if !terminated {
                return Err(diag(lineno, line.len() + 1, UnterminatedQuantifier, "quantifier line lacks terminating 0"));
            }
            if vars.is_empty() {
                if options.lenient {
                    continue;
                }
                return Err(diag(lineno, col0, EmptyQuantifierBlock, "quantifier block binds no variable"));
            }
            match blocks.last_mut() {
                Some((last, existing)) if *last == q => {
                    if !options.lenient {
                        return Err(diag(lineno, col0, AdjacentQuantifierBlocks, "two adjacent blocks of the same quantifier"));
                    }
                    existing.extend(vars);
                }
                _ => blocks.push((q, vars)),
            }
            continue;
        }

        in_matrix = true;
        for (col, tok) in toks {
            let value: i64 = tok
                .parse()
                .map_err(|_| diag(lineno, col, BadToken, format!("{tok:?} is not a literal")))?;
            if value == 0 {
                clauses.push(std::mem::take(&mut pending));
                continue;
            }
            if value.unsigned_abs() > h.nvars as u64 {
                return Err(diag(lineno, col, VarOutOfRange, format!("variable {} exceeds declared {}", value.unsigned_abs(), h.nvars)));
            }
            if pending.is_empty() {
                pending_start = (lineno, col);
            }
            let lit = Literal::from_dimacs(value).expect("bounded by the header");
            if !quantified.contains(&lit.var()) {
                first_seen.push((lit.var(), lineno, col));
            }
            pending.push(lit);
        }
    }

    let Some(h) = header else {
        return Err(diag(last_line, 1, MissingHeader, "no `p cnf` line"));
    };
    if !pending.is_empty() {
        return Err(diag(pending_start.0, pending_start.1, UnterminatedClause, "clause lacks terminating 0"));
    }
    if !options.lenient && clauses.len() as u64 != h.nclauses {
        return Err(diag(
            last_line,
            1,
            ClauseCountMismatch,
            format!("header declares {} clauses, found {}", h.nclauses, clauses.len()),
        ));
    }
    let free: BTreeSet<u32> = first_seen.iter().map(|e| e.0).collect();
    if !free.is_empty() && !options.lenient {
        let &(v, line, col) = first_seen.first().expect("nonempty");
        return Err(diag(line, col, FreeVariable, format!("variable {v} is not quantified")));
    }
    let mut entries: Vec<(u32, Quantifier)> = free.into_iter().map(|v| (v, Quantifier::Existential)).collect();
    for (q, vars) in blocks {
        entries.extend(vars.into_iter().map(|v| (v, q)));
    }
    Ok(Formula::new(Prefix::new(entries), clauses))
}

/// Canonical QDIMACS text: maximal quantifier blocks outermost first, clauses
/// in order, literals ascending by variable.
pub fn write_qdimacs(f: &Formula) -> Result<String> {
    f.ensure_valid()?;
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", f.max_var(), f.num_clauses()).expect("write to string");
    let entries = f.prefix().entries();
    let mut i = 0;
    while i < entries.len() {
        let q = entries[i].1;
        out.push(q.letter());
        while i < entries.len() && entries[i].1 == q {
            write!(out, " {}", entries[i].0).expect("write to string");
            i += 1;
        }
        out.push_str(" 0\n");
    }
    for c in f.clauses() {
        for l in c.literals() {
            write!(out, "{} ", l.to_dimacs()).expect("write to string");
        }
        out.push_str("0\n");
    }
    Ok(out)
}

/// Convenience wrapper mapping diagnostics into [`Error`].
pub fn read_formula(text: &str, options: ParseOptions) -> Result<Formula> {
    parse_qdimacs(text, options).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fixtures::*;
    use proptest::prelude::*;
    use Quantifier::*;

    const F_D_TEXT: &str = "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n";

    fn strict(text: &str) -> Result<Formula, ParseDiagnostics> {
        parse_qdimacs(text, ParseOptions::strict())
    }

    fn kind(text: &str) -> ParseErrorKind {
        strict(text).unwrap_err().kind
    }

    #[test]
    fn parses_fixture() {
        assert_eq!(strict(F_D_TEXT).unwrap(), f_d());
        let commented = "c hello\nc\np cnf 2 2\na 1 0\ne 2 0\n1\n 2 0 -1\n-2 0\n";
        assert_eq!(strict(commented).unwrap(), f_d());
    }

    #[test]
    fn free_variable_policy() {
        let text = "p cnf 1 1\n1 0\n";
        let err = strict(text).unwrap_err();
        assert_eq!((err.kind, err.line, err.column), (ParseErrorKind::FreeVariable, 2, 1));
        assert_eq!(parse_qdimacs(text, ParseOptions::lenient()).unwrap(), f_a());

        let text = "p cnf 3 1\na 2 0\n3 1 -2 0\n";
        let f = parse_qdimacs(text, ParseOptions::lenient()).unwrap();
        assert_eq!(f.prefix().entries(), &[(1, Existential), (3, Existential), (2, Universal)]);
    }

    #[test]
    fn rejects_bad_input() {
        let err = strict("p cnf 1 1\ne 1 0\n1 2 0\n").unwrap_err();
        assert_eq!((err.kind, err.line, err.column), (ParseErrorKind::VarOutOfRange, 3, 3));
        assert_eq!(kind("p cnf x 1\n"), ParseErrorKind::BadHeader);
        assert_eq!(kind("p dnf 1 1\n"), ParseErrorKind::BadHeader);
        assert_eq!(kind("1 0\n"), ParseErrorKind::MissingHeader);
        assert_eq!(kind(""), ParseErrorKind::MissingHeader);
        assert_eq!(kind("p cnf 1 1\np cnf 1 1\n"), ParseErrorKind::DuplicateHeader);
        assert_eq!(kind("p cnf 1 1\ne 1 0\n1\n"), ParseErrorKind::UnterminatedClause);
        assert_eq!(kind("p cnf 2 0\ne 1 0\na 1 0\n"), ParseErrorKind::DuplicateQuantification);
        assert_eq!(kind("p cnf 2 0\ne 1 0\ne 2 0\n"), ParseErrorKind::AdjacentQuantifierBlocks);
        assert_eq!(kind("p cnf 2 0\ne 1\n"), ParseErrorKind::UnterminatedQuantifier);
        assert_eq!(kind("p cnf 2 0\ne 0\n"), ParseErrorKind::EmptyQuantifierBlock);
        assert_eq!(kind("p cnf 2 1\ne 1 0\n1 0\na 2 0\n"), ParseErrorKind::MisplacedQuantifier);
        assert_eq!(kind("p cnf 1 2\ne 1 0\n1 0\n"), ParseErrorKind::ClauseCountMismatch);
        assert_eq!(kind("p cnf 1 1\ne 1 0\n1 x 0\n"), ParseErrorKind::BadToken);
        assert_eq!(kind("p cnf 1 1\ne 1 0 1\n"), ParseErrorKind::BadToken);
        assert_eq!(kind("p cnf 99999999999 0\n"), ParseErrorKind::TooManyVariables);
        let err = parse_qdimacs_bytes(b"p cnf 1 0\n\xff", ParseOptions::strict()).unwrap_err();
        assert_eq!((err.kind, err.line, err.column), (ParseErrorKind::InvalidUtf8, 2, 1));
    }

    #[test]
    fn lenient_relaxations() {
        let f = parse_qdimacs("p cnf 2 5\ne 1 0\ne 0\ne 2 0\n1 2 0\n", ParseOptions::lenient()).unwrap();
        assert_eq!(f.prefix().entries(), &[(1, Existential), (2, Existential)]);
        assert_eq!(f.num_clauses(), 1);
    }

    #[test]
    fn deduplicates_literals() {
        let f = strict("p cnf 2 1\ne 1 2 0\n2 1 2 0\n").unwrap();
        assert_eq!(f.clauses()[0].len(), 2);
    }

    #[test]
    fn canonical_output() {
        assert_eq!(write_qdimacs(&f_d()).unwrap(), F_D_TEXT);
        let f = Formula::new(Prefix::new(vec![(1, Existential)]), vec![]);
        assert_eq!(write_qdimacs(&f).unwrap(), "p cnf 1 0\ne 1 0\n");
        let bad = Formula::from_dimacs(&[(1, Existential)], &[&[2]]);
        assert!(matches!(write_qdimacs(&bad), Err(Error::Malformed(_))));
    }

    proptest! {
        #[test]
        fn never_panics_on_arbitrary_bytes(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
            match parse_qdimacs_bytes(&bytes, ParseOptions::strict()) {
                Ok(f) => prop_assert!(f.validate().is_empty()),
                Err(d) => prop_assert!(d.line >= 1),
            }
        }

        #[test]
        fn never_panics_on_token_soup(words in prop::collection::vec(
            prop::sample::select(vec!["p", "cnf", "a", "e", "c", "0", "1", "-1", "2", "-3", "7", "\n", "x", "-", "99999999999999999999"]), 0..40)) {
            let text = words.join(" ");
            for options in [ParseOptions::strict(), ParseOptions::lenient()] {
                match parse_qdimacs(&text, options) {
                    Ok(f) => prop_assert!(f.validate().is_empty()),
                    Err(d) => prop_assert!(d.line >= 1),
                }
            }
        }
    }
}
