//! Monotone boolean access policies over attribute names.
//!
//! A policy is either a single attribute or an `and`/`or` gate over two or
//! more sub-policies, written in a small infix language:
//!
//! ```text
//! expr   := term ("or" term)*
//! term   := factor ("and" factor)*
//! factor := ATTR | "(" expr ")"
//! ```
//!
//! `and` binds tighter than `or`, so `A or B and C` means `A or (B and C)`.
//! Attribute names are case-sensitive; the keywords `and`/`or` match
//! case-insensitively and cannot be used as attribute names.
//!
//! The text form produced by [`serialize_policy`] is canonical: gates never
//! nest a gate of the same kind, and parentheses appear exactly where a
//! child gate's operator differs from its parent's. This exact text is what
//! travels in the `abe_pcy` array of a Key Binding JWT.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors produced while parsing or constructing policies.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    /// The input contained no tokens at all.
    #[error("empty policy")]
    EmptyPolicy,
    /// Malformed policy text; `offset` is the 1-based character position.
    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: &'static str },
    /// A name outside the `[A-Za-z0-9_:.-]+` alphabet, or a reserved word.
    #[error("invalid attribute name `{0}`")]
    InvalidAttribute(String),
}

fn is_attr_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | ':' | '.' | '-')
}

/// A single attribute name, e.g. `Hospital` or `dept:cardiology`.
///
/// Names are compared by exact byte equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AttributeName(String);

impl AttributeName {
    pub fn new(name: impl Into<String>) -> Result<Self, PolicyError> {
        let name = name.into();
        if name.is_empty()
            || !name.chars().all(is_attr_char)
            || name.eq_ignore_ascii_case("and")
            || name.eq_ignore_ascii_case("or")
        {
            return Err(PolicyError::InvalidAttribute(name));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AttributeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for AttributeName {
    type Err = PolicyError;
    fn from_str(s: &str) -> Result<Self, PolicyError> {
        Self::new(s)
    }
}

impl TryFrom<String> for AttributeName {
    type Error = PolicyError;
    fn try_from(s: String) -> Result<Self, PolicyError> {
        Self::new(s)
    }
}

impl From<AttributeName> for String {
    fn from(a: AttributeName) -> String {
        a.0
    }
}

/// A finite, duplicate-free set of attribute names. May be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSet(BTreeSet<AttributeName>);

impl AttributeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from raw names, validating each one.
    pub fn from_names<I, S>(names: I) -> Result<Self, PolicyError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        names
            .into_iter()
            .map(|s| AttributeName::new(s.as_ref()))
            .collect()
    }

    pub fn insert(&mut self, name: AttributeName) -> bool {
        self.0.insert(name)
    }

    pub fn contains(&self, name: &AttributeName) -> bool {
        self.0.contains(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AttributeName> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<AttributeName> for AttributeSet {
    fn from_iter<I: IntoIterator<Item = AttributeName>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Gate operator: all children (`And`) or at least one child (`Or`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
}

impl GateKind {
    fn keyword(self) -> &'static str {
        match self {
            GateKind::And => "and",
            GateKind::Or => "or",
        }
    }
}

/// A monotone boolean formula over attribute names.
///
/// Trees built through [`AccessPolicy::and`], [`AccessPolicy::or`] or the
/// parser are canonical: every gate has at least two children and never
/// directly nests a gate of its own kind. [`parse_policy`] and
/// [`serialize_policy`] are mutually inverse on such trees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AccessPolicy {
    Leaf(AttributeName),
    Gate(GateKind, Vec<AccessPolicy>),
}

impl AccessPolicy {
    /// Single-attribute policy.
    pub fn leaf(name: impl Into<String>) -> Result<Self, PolicyError> {
        Ok(AccessPolicy::Leaf(AttributeName::new(name)?))
    }

    /// Conjunction of the given policies, flattening nested `and` gates.
    pub fn and(children: Vec<AccessPolicy>) -> Self {
        Self::gate(GateKind::And, children)
    }

    /// Disjunction of the given policies, flattening nested `or` gates.
    pub fn or(children: Vec<AccessPolicy>) -> Self {
        Self::gate(GateKind::Or, children)
    }

    fn gate(kind: GateKind, children: Vec<AccessPolicy>) -> Self {
        let mut flat = Vec::with_capacity(children.len());
        for child in children {
            match child {
                AccessPolicy::Gate(k, grand) if k == kind => flat.extend(grand),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            AccessPolicy::Gate(kind, flat)
        }
    }

    /// Rebuilds the tree through the canonicalizing constructors.
    pub fn canonicalize(&self) -> AccessPolicy {
        match self {
            AccessPolicy::Leaf(a) => AccessPolicy::Leaf(a.clone()),
            AccessPolicy::Gate(kind, children) => {
                Self::gate(*kind, children.iter().map(Self::canonicalize).collect())
            }
        }
    }

    /// True iff the formula evaluates to true when each leaf is true
    /// exactly when its attribute is a member of `attrs`.
    pub fn satisfies(&self, attrs: &AttributeSet) -> bool {
        match self {
            AccessPolicy::Leaf(a) => attrs.contains(a),
            AccessPolicy::Gate(GateKind::And, children) => {
                children.iter().all(|c| c.satisfies(attrs))
            }
            AccessPolicy::Gate(GateKind::Or, children) => {
                children.iter().any(|c| c.satisfies(attrs))
            }
        }
    }

    /// Number of leaves, counting repeated attributes once per occurrence.
    pub fn leaf_count(&self) -> usize {
        match self {
            AccessPolicy::Leaf(_) => 1,
            AccessPolicy::Gate(_, children) => children.iter().map(Self::leaf_count).sum(),
        }
    }

    /// The distinct attribute names mentioned by the policy.
    pub fn attributes(&self) -> BTreeSet<&AttributeName> {
        let mut out = BTreeSet::new();
        self.collect_attributes(&mut out);
        out
    }

    fn collect_attributes<'a>(&'a self, out: &mut BTreeSet<&'a AttributeName>) {
        match self {
            AccessPolicy::Leaf(a) => {
                out.insert(a);
            }
            AccessPolicy::Gate(_, children) => {
                for c in children {
                    c.collect_attributes(out);
                }
            }
        }
    }

    fn fmt_node(&self, f: &mut fmt::Formatter<'_>, parent: Option<GateKind>) -> fmt::Result {
        match self {
            AccessPolicy::Leaf(a) => write!(f, "{a}"),
            AccessPolicy::Gate(kind, children) => {
                let parens = parent.is_some_and(|p| p != *kind);
                if parens {
                    f.write_str("(")?;
                }
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, " {} ", kind.keyword())?;
                    }
                    child.fmt_node(f, Some(*kind))?;
                }
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for AccessPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_node(f, None)
    }
}

impl FromStr for AccessPolicy {
    type Err = PolicyError;
    fn from_str(s: &str) -> Result<Self, PolicyError> {
        parse_policy(s)
    }
}

/// Parses policy text into its AST. Whitespace between tokens is ignored.
pub fn parse_policy(text: &str) -> Result<AccessPolicy, PolicyError> {
    if text.trim().is_empty() {
        return Err(PolicyError::EmptyPolicy);
    }
    let mut parser = Parser::new(text)?;
    let expr = parser.expr()?;
    match parser.token {
        Token::Eof => Ok(expr),
        _ => Err(PolicyError::Syntax {
            offset: parser.offset,
            expected: "`and`, `or` or end of input",
        }),
    }
}

/// Canonical text form of a policy; the inverse of [`parse_policy`].
pub fn serialize_policy(policy: &AccessPolicy) -> String {
    policy.to_string()
}

/// Evaluates `policy` against `attrs`. See [`AccessPolicy::satisfies`].
pub fn satisfies(policy: &AccessPolicy, attrs: &AttributeSet) -> bool {
    policy.satisfies(attrs)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    And,
    Or,
    LParen,
    RParen,
    Eof,
}

struct Parser<'a> {
    rest: std::iter::Peekable<std::str::CharIndices<'a>>,
    len: usize,
    /// Current lookahead token and its 1-based offset.
    token: Token,
    offset: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, PolicyError> {
        let mut p = Parser {
            rest: text.char_indices().peekable(),
            len: text.len(),
            token: Token::Eof,
            offset: text.len() + 1,
        };
        p.bump()?;
        Ok(p)
    }

    fn bump(&mut self) -> Result<(), PolicyError> {
        while matches!(self.rest.peek(), Some((_, c)) if c.is_whitespace()) {
            self.rest.next();
        }
        let Some(&(pos, c)) = self.rest.peek() else {
            self.token = Token::Eof;
            self.offset = self.len + 1;
            return Ok(());
        };
        self.offset = pos + 1;
        if c == '(' {
            self.rest.next();
            self.token = Token::LParen;
        } else if c == ')' {
            self.rest.next();
            self.token = Token::RParen;
        } else if is_attr_char(c) {
            let mut word = String::new();
            while matches!(self.rest.peek(), Some((_, c)) if is_attr_char(*c)) {
                word.push(self.rest.next().unwrap().1);
            }
            self.token = if word.eq_ignore_ascii_case("and") {
                Token::And
            } else if word.eq_ignore_ascii_case("or") {
                Token::Or
            } else {
                Token::Ident(word)
            };
        } else {
            return Err(PolicyError::Syntax {
                offset: self.offset,
                expected: "attribute, `(` or `)`",
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<AccessPolicy, PolicyError> {
        let mut terms = vec![self.term()?];
        while self.token == Token::Or {
            self.bump()?;
            terms.push(self.term()?);
        }
        Ok(AccessPolicy::or(terms))
    }

    fn term(&mut self) -> Result<AccessPolicy, PolicyError> {
        let mut factors = vec![self.factor()?];
        while self.token == Token::And {
            self.bump()?;
            factors.push(self.factor()?);
        }
        Ok(AccessPolicy::and(factors))
    }

    fn factor(&mut self) -> Result<AccessPolicy, PolicyError> {
        match std::mem::replace(&mut self.token, Token::Eof) {
            Token::Ident(word) => {
                self.bump()?;
                Ok(AccessPolicy::Leaf(AttributeName::new(word)?))
            }
            Token::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                if self.token != Token::RParen {
                    return Err(PolicyError::Syntax {
                        offset: self.offset,
                        expected: "`)`",
                    });
                }
                self.bump()?;
                Ok(inner)
            }
            _ => Err(PolicyError::Syntax {
                offset: self.offset,
                expected: "attribute or `(`",
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn attrs(names: &[&str]) -> AttributeSet {
        AttributeSet::from_names(names.iter().copied()).unwrap()
    }

    fn leaf(name: &str) -> AccessPolicy {
        AccessPolicy::leaf(name).unwrap()
    }

    #[test]
    fn parses_and_pair() {
        let p = parse_policy("A and B").unwrap();
        assert_eq!(p, AccessPolicy::Gate(GateKind::And, vec![leaf("A"), leaf("B")]));
    }

    #[test]
    fn parses_or_pair() {
        let p = parse_policy("C or D").unwrap();
        assert_eq!(p, AccessPolicy::Gate(GateKind::Or, vec![leaf("C"), leaf("D")]));
    }

    #[test]
    fn parses_single_leaf() {
        assert_eq!(parse_policy("A").unwrap(), leaf("A"));
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let err = parse_policy("(A and").unwrap_err();
        assert!(matches!(err, PolicyError::Syntax { offset: 7, .. }), "{err:?}");
    }

    #[test]
    fn blank_input_is_empty_policy() {
        assert_eq!(parse_policy("").unwrap_err(), PolicyError::EmptyPolicy);
        assert_eq!(parse_policy("  \t\n").unwrap_err(), PolicyError::EmptyPolicy);
    }

    #[test]
    fn and_binds_tighter_than_or() {
        assert_eq!(
            parse_policy("A or B and C").unwrap(),
            parse_policy("A or (B and C)").unwrap()
        );
    }

    #[test]
    fn whitespace_between_tokens_is_insignificant() {
        assert_eq!(
            parse_policy("  A   and\t( B or\nC )").unwrap(),
            parse_policy("A and (B or C)").unwrap()
        );
    }

    #[test]
    fn chains_flatten_into_nary_gates() {
        let p = parse_policy("A and B and C").unwrap();
        assert_eq!(
            p,
            AccessPolicy::Gate(GateKind::And, vec![leaf("A"), leaf("B"), leaf("C")])
        );
        // explicit parentheses around a same-kind gate flatten too
        assert_eq!(parse_policy("(A and B) and C").unwrap(), p);
    }

    #[test]
    fn keywords_match_case_insensitively() {
        assert_eq!(parse_policy("A AND B").unwrap(), parse_policy("A and B").unwrap());
        assert_eq!(parse_policy("A Or B").unwrap(), parse_policy("A or B").unwrap());
    }

    #[test]
    fn attribute_names_are_case_sensitive() {
        let p = parse_policy("Hospital").unwrap();
        assert!(p.satisfies(&attrs(&["Hospital"])));
        assert!(!p.satisfies(&attrs(&["hospital"])));
    }

    #[test]
    fn reserved_words_are_not_attributes() {
        assert!(AttributeName::new("and").is_err());
        assert!(AttributeName::new("OR").is_err());
        assert!(AttributeName::new("Android").is_ok());
        assert!(AttributeName::new("").is_err());
        assert!(AttributeName::new("a b").is_err());
        assert!(AttributeName::new("dept:x.y-z_0").is_ok());
    }

    #[test]
    fn garbage_reports_position() {
        let err = parse_policy("A and %").unwrap_err();
        assert!(matches!(err, PolicyError::Syntax { offset: 7, .. }), "{err:?}");
        let err = parse_policy("A B").unwrap_err();
        assert!(matches!(err, PolicyError::Syntax { offset: 3, .. }), "{err:?}");
        let err = parse_policy("A and (B or)").unwrap_err();
        assert!(matches!(err, PolicyError::Syntax { offset: 12, .. }), "{err:?}");
    }

    #[test]
    fn serializes_canonical_text() {
        assert_eq!(serialize_policy(&parse_policy("A and B").unwrap()), "A and B");
        assert_eq!(serialize_policy(&leaf("A")), "A");
        let p = AccessPolicy::or(vec![
            AccessPolicy::and(vec![leaf("A"), leaf("B")]),
            leaf("C"),
        ]);
        assert_eq!(serialize_policy(&p), "(A and B) or C");
        assert_eq!(parse_policy("(A and B) or C").unwrap(), p);
    }

    #[test]
    fn satisfies_examples() {
        let and = parse_policy("A and B").unwrap();
        assert!(and.satisfies(&attrs(&["A", "B"])));
        assert!(!and.satisfies(&attrs(&["A"])));
        let or = parse_policy("C or D").unwrap();
        assert!(or.satisfies(&attrs(&["D", "X"])));
        assert!(!or.satisfies(&attrs(&[])));
    }

    #[test]
    fn constructors_flatten_and_hoist() {
        let nested = AccessPolicy::and(vec![
            AccessPolicy::and(vec![leaf("A"), leaf("B")]),
            leaf("C"),
        ]);
        assert_eq!(nested, parse_policy("A and B and C").unwrap());
        let single = AccessPolicy::or(vec![AccessPolicy::and(vec![leaf("A"), leaf("B")])]);
        assert_eq!(single, parse_policy("A and B").unwrap());
    }

    // Independent oracle: evaluates policy text directly against a set of
    // names by splitting on top-level keywords, never building the AST.
    fn oracle_eval(expr: &str, members: &BTreeSet<String>) -> bool {
        fn split_toplevel<'a>(expr: &'a str, kw: &str) -> Vec<&'a str> {
            let bytes = expr.as_bytes();
            let mut parts = Vec::new();
            let mut depth = 0usize;
            let mut start = 0usize;
            let mut i = 0usize;
            while i < bytes.len() {
                match bytes[i] {
                    b'(' => depth += 1,
                    b')' => depth -= 1,
                    _ => {
                        if depth == 0 {
                            let word_end = expr[i..]
                                .find(|c: char| !is_attr_char(c))
                                .map_or(expr.len(), |j| i + j);
                            let word = &expr[i..word_end];
                            if word.eq_ignore_ascii_case(kw)
                                && (i == 0 || !is_attr_char(bytes[i - 1] as char))
                            {
                                parts.push(&expr[start..i]);
                                start = word_end;
                            }
                            i = word_end.max(i + 1);
                            continue;
                        }
                    }
                }
                i += 1;
            }
            parts.push(&expr[start..]);
            parts
        }

        let expr = expr.trim();
        let or_parts = split_toplevel(expr, "or");
        if or_parts.len() > 1 {
            return or_parts.iter().any(|p| oracle_eval(p, members));
        }
        let and_parts = split_toplevel(expr, "and");
        if and_parts.len() > 1 {
            return and_parts.iter().all(|p| oracle_eval(p, members));
        }
        if expr.starts_with('(') && expr.ends_with(')') {
            return oracle_eval(&expr[1..expr.len() - 1], members);
        }
        members.contains(expr)
    }

    /// Canonical policies of depth <= 3 over a fixed six-attribute pool.
    fn arb_policy() -> impl Strategy<Value = AccessPolicy> {
        let leaf = prop::sample::select(vec!["A", "B", "C", "D", "E", "F"])
            .prop_map(|n| AccessPolicy::leaf(n).unwrap());
        leaf.prop_recursive(3, 24, 4, |inner| {
            (any::<bool>(), prop::collection::vec(inner, 2..4)).prop_map(|(is_and, children)| {
                if is_and {
                    AccessPolicy::and(children)
                } else {
                    AccessPolicy::or(children)
                }
            })
        })
    }

    proptest! {
        #[test]
        fn roundtrip_parse_serialize(p in arb_policy()) {
            let text = serialize_policy(&p);
            prop_assert_eq!(parse_policy(&text).unwrap(), p);
        }

        #[test]
        fn satisfies_is_monotone(p in arb_policy(), extra in prop::collection::btree_set("[G-L]", 0..4)) {
            let base: AttributeSet = p
                .attributes()
                .into_iter()
                .filter(|a| a.as_str() <= "C")
                .cloned()
                .collect();
            let mut superset = base.clone();
            for name in extra {
                superset.insert(AttributeName::new(name).unwrap());
            }
            for a in p.attributes() {
                superset.insert(a.clone());
            }
            if p.satisfies(&base) {
                prop_assert!(p.satisfies(&superset));
            }
        }

        #[test]
        fn satisfies_matches_bruteforce_oracle(p in arb_policy()) {
            let names: Vec<String> = p.attributes().iter().map(|a| a.as_str().to_string()).collect();
            let text = serialize_policy(&p);
            prop_assert!(names.len() <= 6);
            for mask in 0u32..(1 << names.len()) {
                let subset: BTreeSet<String> = names
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, n)| n.clone())
                    .collect();
                let set = AttributeSet::from_names(subset.iter()).unwrap();
                prop_assert_eq!(p.satisfies(&set), oracle_eval(&text, &subset));
            }
        }
    }
}
