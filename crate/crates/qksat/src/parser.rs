//! Concrete text syntax: formula parser, problem files, and a fully
//! parenthesizing printer.
//!
//! Operator precedence follows the descending sequence `[s]`, `<s>`, `~`,
//! `|`, `&`, `->`, `<->` — note that `|` binds *tighter* than `&`, which is
//! unusual; the printer always parenthesizes, so rendered output never
//! depends on it. `->` and `<->` associate to the right.

use thiserror::Error;

use crate::formula::{Formula, Modality, QuantifierBounds};
use crate::signature::{Instance, Signature, SignatureError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Syntax { line: usize, col: usize, expected: String, found: String },
    #[error("{line}:{col}: unknown atom `{name}`")]
    UnknownAtom { line: usize, col: usize, name: String },
    #[error("{line}:{col}: an instance must contain at least one atom")]
    EmptyInstance { line: usize, col: usize },
    #[error("{line}:{col}: malformed quantifier bounds (a bound may not follow the upper bound)")]
    MalformedBounds { line: usize, col: usize },
    #[error("problem file must start with an `atoms:` header")]
    MissingAtomsHeader,
    #[error("line {line}: `atoms:` header declared twice")]
    AtomsRedeclared { line: usize },
    #[error("line {line}: {kind} has a free occurrence of the variable modality `x`")]
    OpenFormulaAssertion { line: usize, kind: &'static str },
    #[error("line {line}: {source}")]
    Signature { line: usize, source: SignatureError },
    #[error("line {line}: cannot parse directive; expected `atoms:`, `assert:` or `query`")]
    UnknownDirective { line: usize },
}

/// A parsed problem file: the atom signature, the asserted formulas, and the
/// named queries. All formulas are closed.
#[derive(Debug, Clone)]
pub struct Problem {
    pub signature: Signature,
    pub assertions: Vec<Formula>,
    pub queries: Vec<Query>,
}

#[derive(Debug, Clone)]
pub struct Query {
    pub name: String,
    pub formula: Formula,
}

impl Problem {
    pub fn query(&self, name: &str) -> Option<&Query> {
        self.queries.iter().find(|q| q.name == name)
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LBracket,
    RBracket,
    Less,
    Greater,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Le,
    Arrow,
    IffOp,
    Tilde,
    Amp,
    Pipe,
    True,
    False,
    Forall,
    Exists,
    X,
    Ident(String),
    Keyword(&'static str), // atoms / assert / query, illegal inside formulas
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Less => "`<`".into(),
            Tok::Greater => "`>`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::IffOp => "`<->`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::X => "`x`".into(),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Keyword(s) => format!("keyword `{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

fn lex(text: &str, start_line: usize) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut line = start_line;
    let mut col = 1;
    while i < bytes.len() {
        let pos = Pos { line, col };
        let c = bytes[i] as char;
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            '[' => toks.push((Tok::LBracket, pos)),
            ']' => toks.push((Tok::RBracket, pos)),
            '{' => toks.push((Tok::LBrace, pos)),
            '}' => toks.push((Tok::RBrace, pos)),
            '(' => toks.push((Tok::LParen, pos)),
            ')' => toks.push((Tok::RParen, pos)),
            ',' => toks.push((Tok::Comma, pos)),
            '~' => toks.push((Tok::Tilde, pos)),
            '&' => toks.push((Tok::Amp, pos)),
            '|' => toks.push((Tok::Pipe, pos)),
            '>' => toks.push((Tok::Greater, pos)),
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((Tok::IffOp, pos));
                    i += 3;
                    col += 3;
                    continue;
                } else if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Le, pos));
                    i += 2;
                    col += 2;
                    continue;
                }
                toks.push((Tok::Less, pos));
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, pos));
                    i += 2;
                    col += 2;
                    continue;
                }
                return Err(ParseError::Syntax {
                    line,
                    col,
                    expected: "`->`".into(),
                    found: "`-`".into(),
                });
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                    col += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "x" => Tok::X,
                    "atoms" => Tok::Keyword("atoms"),
                    "assert" => Tok::Keyword("assert"),
                    "query" => Tok::Keyword("query"),
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((tok, pos));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    expected: "a token".into(),
                    found: format!("`{other}`"),
                });
            }
        }
        i += 1;
        col += 1;
    }
    toks.push((Tok::Eof, Pos { line, col }));
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expected(&self, what: &str) -> ParseError {
        let pos = self.pos();
        ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            expected: what.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    // Loosest level: `<->`, right-associative.
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::IffOp {
            self.bump();
            let rhs = self.formula()?;
            Ok(lhs.iff(rhs))
        } else {
            Ok(lhs)
        }
    }

    // `->`, right-associative.
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.conjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    // `&`, left-associative, binds looser than `|`.
    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.disjunction()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.disjunction()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    // `|`, left-associative.
    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.prefix()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.prefix()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    // Prefix operators `~`, `[s]`, `<s>`; each applies to the smallest
    // following formula.
    fn prefix(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(self.prefix()?.negate())
            }
            Tok::LBracket => {
                self.bump();
                let m = self.modality(Tok::RBracket, "`]`")?;
                Ok(Formula::boxed(m, self.prefix()?))
            }
            Tok::Less => {
                self.bump();
                let m = self.modality(Tok::Greater, "`>`")?;
                Ok(Formula::diamond(m, self.prefix()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Forall => {
                self.bump();
                self.quantifier(true)
            }
            Tok::Exists => {
                self.bump();
                self.quantifier(false)
            }
            _ => Err(self.expected("a formula")),
        }
    }

    // `forall x (φ)`, `forall x <= {..} (φ)`, `forall {..} <= x [<= {..}] (φ)`.
    fn quantifier(&mut self, universal: bool) -> Result<Formula, ParseError> {
        let (lower, upper) = self.bounds()?;
        let bounds = QuantifierBounds { lower, upper };
        self.expect(Tok::LParen, "`(` before the quantifier body")?;
        let body = self.formula()?;
        self.expect(Tok::RParen, "`)` after the quantifier body")?;
        Ok(if universal {
            Formula::Forall(bounds, Box::new(body))
        } else {
            Formula::Exists(bounds, Box::new(body))
        })
    }

    fn bounds(&mut self) -> Result<(Option<Instance>, Instance), ParseError> {
        let lower = if *self.peek() == Tok::LBrace {
            let inst = self.brace_instance()?;
            self.expect(Tok::Le, "`<=` after the lower bound")?;
            Some(inst)
        } else {
            None
        };
        self.expect(Tok::X, "the variable modality `x`")?;
        let upper = if *self.peek() == Tok::Le {
            self.bump();
            self.brace_instance()?
        } else {
            self.sig.full_instance()
        };
        if *self.peek() == Tok::Le {
            let pos = self.pos();
            return Err(ParseError::MalformedBounds { line: pos.line, col: pos.col });
        }
        Ok((lower, upper))
    }

    fn brace_instance(&mut self) -> Result<Instance, ParseError> {
        let open = self.pos();
        self.expect(Tok::LBrace, "`{`")?;
        if *self.peek() == Tok::RBrace {
            return Err(ParseError::EmptyInstance { line: open.line, col: open.col });
        }
        let mut names = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(name) => {
                    let pos = self.pos();
                    self.bump();
                    if self.sig.atom_index(&name).is_none() {
                        return Err(ParseError::UnknownAtom {
                            line: pos.line,
                            col: pos.col,
                            name,
                        });
                    }
                    names.push(name);
                }
                _ => return Err(self.expected("an atom name")),
            }
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                _ => return Err(self.expected("`,` or `}`")),
            }
        }
        // Atoms verified above, so this cannot fail.
        Ok(self.sig.instance(&names).expect("validated atoms"))
    }

    // The contents of `[..]` or `<..>`: either `x` or a comma-separated
    // nonempty list of atoms.
    fn modality(&mut self, close: Tok, close_name: &str) -> Result<Modality, ParseError> {
        if *self.peek() == Tok::X {
            self.bump();
            self.expect(close, close_name)?;
            return Ok(Modality::Var);
        }
        if *self.peek() == close {
            let pos = self.pos();
            return Err(ParseError::EmptyInstance { line: pos.line, col: pos.col });
        }
        let mut names = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(name) => {
                    let pos = self.pos();
                    self.bump();
                    if self.sig.atom_index(&name).is_none() {
                        return Err(ParseError::UnknownAtom {
                            line: pos.line,
                            col: pos.col,
                            name,
                        });
                    }
                    names.push(name);
                }
                _ => return Err(self.expected("an atom name or `x`")),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
                continue;
            }
            self.expect(close, close_name)?;
            break;
        }
        Ok(Modality::Const(self.sig.instance(&names).expect("validated atoms")))
    }
}

/// Parses a single formula against a fixed signature.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse_formula_at(text, sig, 1)
}

fn parse_formula_at(text: &str, sig: &Signature, line: usize) -> Result<Formula, ParseError> {
    let toks = lex(text, line)?;
    let mut parser = Parser { toks, at: 0, sig };
    let f = parser.formula()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.expected("end of formula"));
    }
    Ok(f)
}

/// Parses a problem file. The format is line-oriented UTF-8 with `#`
/// comments: an `atoms:` header naming the signature, then `assert:` and
/// `query [NAME]:` lines, one formula each. Anonymous queries are named by
/// their position as `#1`, `#2`, ...
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut signature: Option<Signature> = None;
    let mut assertions = Vec::new();
    let mut queries: Vec<Query> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }

        if let Some(rest) = line.strip_prefix("atoms:") {
            if signature.is_some() {
                return Err(ParseError::AtomsRedeclared { line: line_no });
            }
            let names: Vec<&str> = rest.split_whitespace().collect();
            signature = Some(
                Signature::new(names)
                    .map_err(|source| ParseError::Signature { line: line_no, source })?,
            );
            continue;
        }

        let sig = signature.as_ref().ok_or(ParseError::MissingAtomsHeader)?;

        if let Some(rest) = line.strip_prefix("assert:") {
            let f = parse_formula_at(rest, sig, line_no)?;
            if !f.is_closed() {
                return Err(ParseError::OpenFormulaAssertion { line: line_no, kind: "assertion" });
            }
            assertions.push(f);
            continue;
        }

        if let Some(rest) = line.strip_prefix("query") {
            let colon = rest.find(':').ok_or(ParseError::UnknownDirective { line: line_no })?;
            let name = rest[..colon].trim();
            let name = if name.is_empty() {
                format!("#{}", queries.len() + 1)
            } else {
                name.to_string()
            };
            let f = parse_formula_at(&rest[colon + 1..], sig, line_no)?;
            if !f.is_closed() {
                return Err(ParseError::OpenFormulaAssertion { line: line_no, kind: "query" });
            }
            queries.push(Query { name, formula: f });
            continue;
        }

        return Err(ParseError::UnknownDirective { line: line_no });
    }

    let signature = signature.ok_or(ParseError::MissingAtomsHeader)?;
    Ok(Problem { signature, assertions, queries })
}

// ---------------------------------------------------------------------------
// Printer

/// Fully parenthesized rendering; `parse_formula(render(f)) == f` structurally.
pub fn render(f: &Formula, sig: &Signature) -> String {
    let mut out = String::new();
    if is_binary(f) {
        out.push('(');
        write_formula(f, sig, &mut out);
        out.push(')');
    } else {
        write_formula(f, sig, &mut out);
    }
    out
}

fn is_binary(f: &Formula) -> bool {
    matches!(
        f,
        Formula::And(_, _) | Formula::Or(_, _) | Formula::Implies(_, _) | Formula::Iff(_, _)
    )
}

fn write_operand(f: &Formula, sig: &Signature, out: &mut String) {
    out.push('(');
    write_formula(f, sig, out);
    out.push(')');
}

fn write_formula(f: &Formula, sig: &Signature, out: &mut String) {
    match f {
        Formula::Bottom => out.push_str("false"),
        Formula::Top => out.push_str("true"),
        Formula::Var(name) => out.push_str(name),
        Formula::Not(p) => {
            out.push('~');
            write_operand(p, sig, out);
        }
        Formula::And(l, r) => {
            write_operand(l, sig, out);
            out.push_str(" & ");
            write_operand(r, sig, out);
        }
        Formula::Or(l, r) => {
            write_operand(l, sig, out);
            out.push_str(" | ");
            write_operand(r, sig, out);
        }
        Formula::Implies(l, r) => {
            write_operand(l, sig, out);
            out.push_str(" -> ");
            write_operand(r, sig, out);
        }
        Formula::Iff(l, r) => {
            write_operand(l, sig, out);
            out.push_str(" <-> ");
            write_operand(r, sig, out);
        }
        Formula::Box(m, p) => {
            out.push('[');
            write_modality(m, sig, out);
            out.push_str("] ");
            write_operand(p, sig, out);
        }
        Formula::Diamond(m, p) => {
            out.push('<');
            write_modality(m, sig, out);
            out.push_str("> ");
            write_operand(p, sig, out);
        }
        Formula::Forall(b, p) => {
            out.push_str("forall ");
            write_bounds(b, sig, out);
            out.push(' ');
            write_operand(p, sig, out);
        }
        Formula::Exists(b, p) => {
            out.push_str("exists ");
            write_bounds(b, sig, out);
            out.push(' ');
            write_operand(p, sig, out);
        }
    }
}

fn write_modality(m: &Modality, sig: &Signature, out: &mut String) {
    match m {
        Modality::Var => out.push('x'),
        Modality::Const(inst) => out.push_str(&sig.format_instance(*inst)),
    }
}

fn write_bounds(b: &QuantifierBounds, sig: &Signature, out: &mut String) {
    if let Some(lower) = b.lower {
        out.push('{');
        out.push_str(&sig.format_instance(lower));
        out.push_str("} <= ");
    }
    out.push_str("x <= {");
    out.push_str(&sig.format_instance(b.upper));
    out.push('}');
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane_signature() -> Signature {
        Signature::new(["o1", "o2", "r1", "r2", "r3", "r4", "g1", "g2"]).unwrap()
    }

    #[test]
    fn parses_boxed_variable() {
        let sig = lane_signature();
        let f = parse_formula("[o1] laneBlocked", &sig).unwrap();
        let o1 = sig.singleton("o1").unwrap();
        assert_eq!(f, Formula::boxed(Modality::Const(o1), Formula::prop("laneBlocked")));
    }

    #[test]
    fn disjunction_binds_tighter_than_conjunction() {
        let sig = lane_signature();
        let f = parse_formula("a | b & c", &sig).unwrap();
        let expected = Formula::prop("a").or(Formula::prop("b")).and(Formula::prop("c"));
        assert_eq!(f, expected);
    }

    #[test]
    fn implication_is_right_associative() {
        let sig = lane_signature();
        let f = parse_formula("a -> b -> c", &sig).unwrap();
        let expected = Formula::prop("a").implies(Formula::prop("b").implies(Formula::prop("c")));
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_table_adjacent_pairs() {
        let sig = lane_signature();
        let o1 = Modality::Const(sig.singleton("o1").unwrap());
        let o2 = Modality::Const(sig.singleton("o2").unwrap());
        let a = Formula::prop("a");
        let b = Formula::prop("b");
        let c = Formula::prop("c");

        // box over diamond
        assert_eq!(
            parse_formula("[o1] <o2> a", &sig).unwrap(),
            Formula::boxed(o1, Formula::diamond(o2, a.clone()))
        );
        // diamond over negation (both directions of nesting parse)
        assert_eq!(
            parse_formula("<o1> ~a", &sig).unwrap(),
            Formula::diamond(o1, a.clone().negate())
        );
        assert_eq!(
            parse_formula("~<o1> a", &sig).unwrap(),
            Formula::diamond(o1, a.clone()).negate()
        );
        // negation over disjunction
        assert_eq!(
            parse_formula("~a | b", &sig).unwrap(),
            a.clone().negate().or(b.clone())
        );
        // disjunction over conjunction
        assert_eq!(
            parse_formula("a | b & c", &sig).unwrap(),
            a.clone().or(b.clone()).and(c.clone())
        );
        // conjunction over implication
        assert_eq!(
            parse_formula("a & b -> c", &sig).unwrap(),
            a.clone().and(b.clone()).implies(c.clone())
        );
        // implication over equivalence
        assert_eq!(
            parse_formula("a -> b <-> c", &sig).unwrap(),
            a.implies(b).iff(c)
        );
    }

    #[test]
    fn quantifier_forms() {
        let sig = lane_signature();
        let full = sig.full_instance();
        let rules = sig.instance(["r1", "r2", "r3", "r4"]).unwrap();

        let f = parse_formula("forall x ( <x> true )", &sig).unwrap();
        assert_eq!(f, Formula::forall(None, full, Formula::diamond(Modality::Var, Formula::Top)));

        let f = parse_formula("forall x <= {r1,r2,r3,r4} ( <x> true )", &sig).unwrap();
        assert_eq!(f, Formula::forall(None, rules, Formula::diamond(Modality::Var, Formula::Top)));

        let f = parse_formula("exists {r1} <= x <= {r1,r2,r3,r4} ( [x] a )", &sig).unwrap();
        let r1 = sig.singleton("r1").unwrap();
        assert_eq!(
            f,
            Formula::exists(Some(r1), rules, Formula::boxed(Modality::Var, Formula::prop("a")))
        );

        // Lower bound only: the upper bound defaults to the full signature.
        let f = parse_formula("exists {r1} <= x ( <x> true )", &sig).unwrap();
        assert_eq!(
            f,
            Formula::exists(Some(r1), full, Formula::diamond(Modality::Var, Formula::Top))
        );
    }

    #[test]
    fn bound_after_upper_bound_is_malformed() {
        let sig = lane_signature();
        let err = parse_formula("forall x <= {r1} <= {r2} ( true )", &sig).unwrap_err();
        assert!(matches!(err, ParseError::MalformedBounds { .. }), "{err:?}");
        let err = parse_formula("exists {r1} <= x <= {r2} <= {r3} ( true )", &sig).unwrap_err();
        assert!(matches!(err, ParseError::MalformedBounds { .. }), "{err:?}");
    }

    #[test]
    fn empty_instances_are_rejected() {
        let sig = lane_signature();
        assert!(matches!(
            parse_formula("[] a", &sig).unwrap_err(),
            ParseError::EmptyInstance { .. }
        ));
        assert!(matches!(
            parse_formula("<> a", &sig).unwrap_err(),
            ParseError::EmptyInstance { .. }
        ));
        assert!(matches!(
            parse_formula("forall x <= {} ( a )", &sig).unwrap_err(),
            ParseError::EmptyInstance { .. }
        ));
    }

    #[test]
    fn unknown_atoms_are_rejected() {
        let sig = lane_signature();
        assert!(matches!(
            parse_formula("[zz] a", &sig).unwrap_err(),
            ParseError::UnknownAtom { .. }
        ));
    }

    #[test]
    fn renders_with_full_parentheses() {
        let sig = lane_signature();
        let o12 = Modality::Const(sig.instance(["o1", "o2"]).unwrap());
        assert_eq!(render(&Formula::boxed(o12, Formula::prop("A")), &sig), "[o1,o2] (A)");

        let f = Formula::prop("a").or(Formula::prop("b").and(Formula::prop("c")));
        assert_eq!(render(&f, &sig), "((a) | ((b) & (c)))");
    }

    #[test]
    fn problem_file_round_trip() {
        let text = "\
# demo
atoms: a b

assert: [a] p
assert: <b> q   # trailing comment
query q1: forall x ( <x> true )
query: [a] false
";
        let problem = parse_problem(text).unwrap();
        assert_eq!(problem.signature.len(), 2);
        assert_eq!(problem.assertions.len(), 2);
        assert_eq!(problem.queries.len(), 2);
        assert_eq!(problem.queries[0].name, "q1");
        assert_eq!(problem.queries[1].name, "#2");
    }

    #[test]
    fn problem_with_no_queries() {
        let problem = parse_problem("atoms: a\n").unwrap();
        assert!(problem.queries.is_empty());
        assert!(problem.assertions.is_empty());
    }

    #[test]
    fn open_assertions_are_rejected() {
        let err = parse_problem("atoms: a\nassert: [x] p\n").unwrap_err();
        assert!(matches!(err, ParseError::OpenFormulaAssertion { kind: "assertion", .. }));
        let err = parse_problem("atoms: a\nquery q: <x> p\n").unwrap_err();
        assert!(matches!(err, ParseError::OpenFormulaAssertion { kind: "query", .. }));
    }

    #[test]
    fn missing_atoms_header() {
        assert_eq!(parse_problem("assert: p\n").unwrap_err(), ParseError::MissingAtomsHeader);
        assert_eq!(parse_problem("").unwrap_err(), ParseError::MissingAtomsHeader);
    }
}
