//! Text syntax for formulas and problem files.
//!
//! ```text
//! # comment
//! vars p1 p2 p3 p4
//! kb B1 { p1 | p2 : 0.9 ; p3 : 9/10 }
//! kb B2 {
//!   !p1 : 0.6
//! }
//! constraint (!p1 | p2) & p3
//! ```
//!
//! Operators from loosest to tightest: `<->`, `->` (right-associative), `|`,
//! `&`, `!`. Line breaks are insignificant; `;` may separate base entries.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::logic::{is_identifier, Atom, Formula, Vocabulary};
use crate::possibilistic::{PossibilisticKB, Profile, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("invalid weight literal `{0}`")]
    InvalidWeight(String),
    #[error("weight {0} is outside (0, 1]")]
    WeightOutOfRange(String),
    #[error("duplicate knowledge base name `{0}`")]
    DuplicateKb(String),
    #[error("atom `{0}` is not declared in `vars`")]
    UnknownAtom(String),
    #[error("atom `{0}` is declared twice")]
    DuplicateAtom(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    True,
    False,
    Kb,
    Vars,
    Constraint,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    Semi,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::True => f.write_str("`true`"),
            Tok::False => f.write_str("`false`"),
            Tok::Kb => f.write_str("`kb`"),
            Tok::Vars => f.write_str("`vars`"),
            Tok::Constraint => f.write_str("`constraint`"),
            Tok::Not => f.write_str("`!`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Implies => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let run = |from: usize, pred: fn(char) -> bool| {
            chars[from..].iter().take_while(|&&c| pred(c)).count()
        };
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else if c.is_ascii_alphabetic() {
            let len = run(i, |c| c.is_ascii_alphanumeric() || c == '_');
            let word: String = chars[i..i + len].iter().collect();
            let tok = match word.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "kb" => Tok::Kb,
                "vars" => Tok::Vars,
                "constraint" => Tok::Constraint,
                _ => Tok::Ident(word),
            };
            (tok, len)
        } else if c.is_ascii_digit() {
            let mut len = run(i, |c| c.is_ascii_digit());
            if matches!(chars.get(i + len), Some('.' | '/')) {
                len += 1 + run(i + len + 1, |c| c.is_ascii_digit());
            }
            (Tok::Number(chars[i..i + len].iter().collect()), len)
        } else {
            let tok = match c {
                '!' | '~' => Tok::Not,
                '&' => Tok::And,
                '|' => Tok::Or,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                _ => {
                    return Err(ParseError {
                        line,
                        column,
                        kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
                    })
                }
            };
            (tok, 1)
        };
        out.push(Spanned { tok, line, column });
        i += len;
        column += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'v> {
    toks: Vec<Spanned>,
    pos: usize,
    declared: Option<&'v Vocabulary>,
}

impl<'v> Parser<'v> {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            declared: None,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: &Spanned, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: at.line,
            column: at.column,
            kind,
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let at = &self.toks[self.pos];
        self.error_at(
            at,
            ParseErrorKind::Syntax(format!("expected {expected}, found {}", at.tok)),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned, ParseError> {
        if *self.peek() == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.next();
            lhs = Formula::iff(lhs, self.implication()?);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.next();
            return Ok(Formula::implies(lhs, self.implication()?));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.next();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.next();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::True => {
                self.next();
                Ok(Formula::True)
            }
            Tok::False => {
                self.next();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                let at = self.next();
                let atom = Atom::new(&name).expect("lexer yields valid identifiers");
                if let Some(v) = self.declared {
                    if !v.contains(&atom) {
                        return Err(self.error_at(&at, ParseErrorKind::UnknownAtom(name)));
                    }
                }
                Ok(Formula::Atom(atom))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn weight(&mut self) -> Result<Weight, ParseError> {
        let at = self.next();
        let Tok::Number(text) = &at.tok else {
            self.pos -= usize::from(at.tok != Tok::Eof);
            return Err(self.unexpected("a weight"));
        };
        let invalid = || self.error_at(&at, ParseErrorKind::InvalidWeight(text.clone()));
        let shape_ok = match text.split_once(['.', '/']) {
            Some((a, b)) => !a.is_empty() && !b.is_empty(),
            None => true,
        };
        if !shape_ok {
            return Err(invalid());
        }
        match text.parse::<Weight>() {
            Ok(w) if !w.is_zero() => Ok(w),
            Ok(w) => Err(self.error_at(&at, ParseErrorKind::WeightOutOfRange(w.to_string()))),
            Err(crate::Error::WeightOutOfRange { value, .. }) => {
                Err(self.error_at(&at, ParseErrorKind::WeightOutOfRange(value)))
            }
            Err(_) => Err(invalid()),
        }
    }

    fn name(&mut self, what: &str) -> Result<(String, Spanned), ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => Ok((name, self.next())),
            _ => Err(self.unexpected(what)),
        }
    }
}

/// A parsed problem: the bases to merge, the constraint and the vocabulary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub vocabulary: Vocabulary,
    pub profile: Profile,
    pub constraint: Formula,
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(f)
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_formula(s)
    }
}

/// Parses a problem file. Without a `vars` line the vocabulary is the sorted
/// set of atoms used anywhere in the file; a missing constraint is `true`.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut p = Parser::new(text)?;

    let mut declared = None;
    if *p.peek() == Tok::Vars {
        p.next();
        let mut atoms: Vec<Atom> = Vec::new();
        while let Tok::Ident(name) = p.peek().clone() {
            let at = p.next();
            let atom = Atom::new(&name).expect("lexer yields valid identifiers");
            if atoms.contains(&atom) {
                return Err(p.error_at(&at, ParseErrorKind::DuplicateAtom(name)));
            }
            atoms.push(atom);
        }
        declared = Some(Vocabulary::declared(atoms).expect("duplicates rejected above"));
    }
    p.declared = declared.as_ref();

    let mut profile = Profile::default();
    let mut names: Vec<String> = Vec::new();
    let mut constraint: Option<Formula> = None;
    loop {
        match p.peek() {
            Tok::Kb => {
                p.next();
                let (name, at) = p.name("a knowledge base name")?;
                if names.contains(&name) {
                    return Err(p.error_at(&at, ParseErrorKind::DuplicateKb(name)));
                }
                p.expect(Tok::LBrace)?;
                let mut kb = PossibilisticKB::named(name.clone());
                loop {
                    while *p.peek() == Tok::Semi {
                        p.next();
                    }
                    if *p.peek() == Tok::RBrace {
                        p.next();
                        break;
                    }
                    let f = p.formula()?;
                    p.expect(Tok::Colon)?;
                    let w = p.weight()?;
                    kb.insert(f, w).expect("weight checked positive");
                }
                names.push(name);
                profile.push(kb);
            }
            Tok::Constraint => {
                let at = p.next();
                if constraint.is_some() {
                    return Err(p.error_at(
                        &at,
                        ParseErrorKind::Syntax("more than one constraint".to_string()),
                    ));
                }
                constraint = Some(p.formula()?);
            }
            Tok::Eof => break,
            Tok::Vars => {
                let at = p.next();
                return Err(p.error_at(
                    &at,
                    ParseErrorKind::Syntax("`vars` must be the first declaration".to_string()),
                ));
            }
            _ => return Err(p.unexpected("`kb`, `constraint` or end of input")),
        }
    }

    let constraint = constraint.unwrap_or(Formula::True);
    let vocabulary = match declared {
        Some(v) => v,
        None => {
            let mut atoms = profile.atoms();
            constraint.collect_atoms(&mut atoms);
            Vocabulary::sorted(atoms)
        }
    };
    Ok(Problem {
        vocabulary,
        profile,
        constraint,
    })
}

/// Renders a problem in the file syntax, with an explicit `vars` line.
/// Unnamed bases are written as `B<position>`.
pub fn render_problem(problem: &Problem) -> String {
    let mut out = String::new();
    out.push_str("vars");
    for a in problem.vocabulary.atoms() {
        let _ = write!(out, " {a}");
    }
    out.push('\n');
    for (i, kb) in problem.profile.iter().enumerate() {
        let label = problem.profile.label(i);
        debug_assert!(is_identifier(&label));
        if kb.is_empty() {
            let _ = writeln!(out, "kb {label} {{}}");
            continue;
        }
        let _ = writeln!(out, "kb {label} {{");
        for wf in kb {
            let _ = writeln!(out, "  {} : {}", wf.formula, wf.weight);
        }
        out.push_str("}\n");
    }
    let _ = writeln!(out, "constraint {}", problem.constraint);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_SOURCES: &str = "\
# four sources
kb B1 { p1 | p2 : 0.9; p3 : 0.9; p1 : 0.6; p2 : 0.6 }
kb B2 { p3 | p4 : 0.9; !p1 : 0.6; p2 : 0.6 }
kb B3 {
  p3 : 0.9
  p2 : 0.6
}
kb B4 { p1 : 0.9; p2 : 0.8; !p3 : 0.6 }
constraint (!p1 | p2) & p3
";

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("a | b & c -> d <-> e").unwrap();
        let expected = Formula::iff(
            Formula::implies(
                Formula::or(
                    Formula::var("a"),
                    Formula::and(Formula::var("b"), Formula::var("c")),
                ),
                Formula::var("d"),
            ),
            Formula::var("e"),
        );
        assert_eq!(f, expected);
        let r = parse_formula("a -> b -> c").unwrap();
        assert_eq!(
            r,
            Formula::implies(
                Formula::var("a"),
                Formula::implies(Formula::var("b"), Formula::var("c"))
            )
        );
        assert_eq!(
            parse_formula("!!a").unwrap(),
            Formula::not(Formula::not(Formula::var("a")))
        );
        assert_eq!(
            parse_formula("~a").unwrap(),
            Formula::not(Formula::var("a"))
        );
    }

    #[test]
    fn formula_errors_have_positions() {
        let e = parse_formula("a &\n  (b | )").unwrap_err();
        assert_eq!((e.line, e.column), (2, 8));
        let e = parse_formula("a b").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
        let e = parse_formula("a $ b").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
    }

    #[test]
    fn four_source_file() {
        let prob = parse_problem(FOUR_SOURCES).unwrap();
        assert_eq!(prob.profile.len(), 4);
        let names: Vec<&str> = prob.vocabulary.atoms().iter().map(Atom::name).collect();
        assert_eq!(names, ["p1", "p2", "p3", "p4"]);
        assert_eq!(prob.profile.bases()[0].len(), 4);
        assert_eq!(prob.profile.bases()[3].name(), Some("B4"));
        assert_eq!(prob.constraint.to_string(), "(!p1 | p2) & p3");
    }

    #[test]
    fn minimal_file() {
        let prob = parse_problem("kb B {}\nconstraint true").unwrap();
        assert_eq!(prob.profile.len(), 1);
        assert!(prob.profile.bases()[0].is_empty());
        assert_eq!(prob.constraint, Formula::True);
        assert!(prob.vocabulary.is_empty());
    }

    #[test]
    fn constraint_defaults_to_true() {
        let prob = parse_problem("kb A { p : 1 }").unwrap();
        assert_eq!(prob.constraint, Formula::True);
    }

    #[test]
    fn exact_decimal_weights() {
        let prob = parse_problem("kb A { p : 0.95 }").unwrap();
        let wf = prob.profile.bases()[0].iter().next().unwrap();
        assert_eq!(wf.weight, Weight::new(19, 20).unwrap());
    }

    #[test]
    fn weight_errors() {
        let e = parse_problem("kb A { p : 1.5 }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::WeightOutOfRange("3/2".to_string()));
        assert_eq!((e.line, e.column), (1, 12));
        let e = parse_problem("kb A { p : 0 }").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::WeightOutOfRange(_)));
        let e = parse_problem("kb A { p : 0.1234567891 }").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::InvalidWeight(_)));
        let e = parse_problem("kb A { p : 3/0 }").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::InvalidWeight(_)));
        let e = parse_problem("kb A { p : 1. }").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::InvalidWeight(_)));
        let e = parse_problem("kb A { p : }").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn duplicate_names() {
        let e = parse_problem("kb A { p : 1 }\nkb A { q : 1 }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateKb("A".to_string()));
        assert_eq!((e.line, e.column), (2, 4));
        let e = parse_problem("vars p q p").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateAtom("p".to_string()));
    }

    #[test]
    fn declared_vocabulary() {
        let prob = parse_problem("vars q p r\nkb A { p : 1 }").unwrap();
        let names: Vec<&str> = prob.vocabulary.atoms().iter().map(Atom::name).collect();
        assert_eq!(names, ["q", "p", "r"]);
        let e = parse_problem("vars p\nkb A { p & z : 1 }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownAtom("z".to_string()));
        assert_eq!((e.line, e.column), (2, 12));
        let e = parse_problem("kb A { p : 1 }\nvars p").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn more_than_one_constraint() {
        let e = parse_problem("constraint p\nconstraint q").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn render_round_trip() {
        let prob = parse_problem(FOUR_SOURCES).unwrap();
        let text = render_problem(&prob);
        assert_eq!(parse_problem(&text).unwrap(), prob);
        assert!(text.contains("  p1 | p2 : 9/10\n"));
    }
}
