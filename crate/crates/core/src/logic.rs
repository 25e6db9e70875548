//! Propositional formulas over named atoms, interpretations over a fixed
//! vocabulary, and the model-enumeration based reasoning built on them.
//!
//! Consistency, entailment and equivalence are decided by walking every
//! interpretation of the vocabulary, stopping as soon as the answer is known.
//! That keeps results exact and dependency free for the small vocabularies
//! this crate targets; the enumeration cap (see [`Vocabulary::with_cap`])
//! guards against accidentally exponential inputs.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default upper bound on the number of atoms a vocabulary may enumerate.
pub const DEFAULT_VARS_CAP: usize = 24;

/// Interpretations are packed into a `u64`.
const MAX_VARS: usize = 63;

const RESERVED: [&str; 5] = ["true", "false", "kb", "vars", "constraint"];

/// A propositional symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    /// Names start with an ASCII letter and continue with letters, digits or
    /// underscores. The keywords of the problem-file syntax are rejected.
    pub fn new(name: &str) -> Result<Self> {
        if is_identifier(name) && !RESERVED.contains(&name) {
            Ok(Atom(name.into()))
        } else {
            Err(Error::InvalidAtom(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Atom formula from a name.
    ///
    /// Panics if `name` is not a valid atom name; use [`Atom::new`] for
    /// untrusted input.
    pub fn var(name: &str) -> Formula {
        Formula::Atom(Atom::new(name).expect("invalid atom name"))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            _ => 6,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            f.write_str("(")?;
        }
        match self {
            Formula::True => f.write_str("true")?,
            Formula::False => f.write_str("false")?,
            Formula::Atom(a) => write!(f, "{a}")?,
            Formula::Not(inner) => {
                f.write_str("!")?;
                inner.write_at(f, 5)?;
            }
            // <->, | and & parse left-associatively, -> right-associatively.
            Formula::Iff(a, b) => binary(f, a, " <-> ", b, prec, prec + 1)?,
            Formula::Implies(a, b) => binary(f, a, " -> ", b, prec + 1, prec)?,
            Formula::Or(a, b) => binary(f, a, " | ", b, prec, prec + 1)?,
            Formula::And(a, b) => binary(f, a, " & ", b, prec, prec + 1)?,
        }
        if prec < min {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn binary(
    f: &mut fmt::Formatter<'_>,
    lhs: &Formula,
    op: &str,
    rhs: &Formula,
    lmin: u8,
    rmin: u8,
) -> fmt::Result {
    lhs.write_at(f, lmin)?;
    f.write_str(op)?;
    rhs.write_at(f, rmin)
}

/// Renders in the problem-file syntax with the minimum parentheses needed to
/// parse back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// Ordered set of atoms fixing the bit positions of interpretations.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    atoms: Arc<[Atom]>,
    cap: usize,
}

impl Vocabulary {
    /// Canonical vocabulary: the atoms sorted by name, duplicates removed.
    pub fn sorted<I: IntoIterator<Item = Atom>>(atoms: I) -> Self {
        let set: BTreeSet<Atom> = atoms.into_iter().collect();
        Vocabulary {
            atoms: set.into_iter().collect(),
            cap: DEFAULT_VARS_CAP,
        }
    }

    /// Vocabulary in an explicitly declared order.
    pub fn declared(atoms: Vec<Atom>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for a in &atoms {
            if !seen.insert(a) {
                return Err(Error::DuplicateAtom(a.name().to_string()));
            }
        }
        Ok(Vocabulary {
            atoms: atoms.into(),
            cap: DEFAULT_VARS_CAP,
        })
    }

    /// Vocabulary of the atoms `names`, kept in the given order.
    ///
    /// Panics on invalid or duplicate names.
    pub fn of(names: &[&str]) -> Self {
        let atoms = names
            .iter()
            .map(|n| Atom::new(n).expect("invalid atom name"))
            .collect();
        Vocabulary::declared(atoms).expect("duplicate atom")
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, atom: &Atom) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.index_of(atom).is_some()
    }

    /// Copy of this vocabulary with `atom` appended (if absent).
    pub fn extended(&self, atom: Atom) -> Self {
        if self.contains(&atom) {
            return self.clone();
        }
        let mut atoms = self.atoms.to_vec();
        atoms.push(atom);
        Vocabulary {
            atoms: atoms.into(),
            cap: self.cap,
        }
    }

    pub(crate) fn check_cap(&self) -> Result<()> {
        let limit = self.cap.min(MAX_VARS);
        if self.len() > limit {
            return Err(Error::VocabularyTooLarge {
                atoms: self.len(),
                cap: limit,
            });
        }
        Ok(())
    }

    /// Number of interpretations, after checking the cap.
    pub(crate) fn space(&self) -> Result<u64> {
        self.check_cap()?;
        Ok(1u64 << self.len())
    }

    pub(crate) fn bit(&self, index: usize) -> u64 {
        1u64 << (self.len() - 1 - index)
    }

    /// All interpretations in ascending bitstring order.
    pub fn interpretations(&self) -> Result<impl Iterator<Item = Interpretation> + '_> {
        let space = self.space()?;
        Ok((0..space).map(move |bits| Interpretation {
            vocabulary: self.clone(),
            bits,
        }))
    }

    pub(crate) fn interpretation(&self, bits: u64) -> Interpretation {
        Interpretation {
            vocabulary: self.clone(),
            bits,
        }
    }
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl Eq for Vocabulary {}

impl Hash for Vocabulary {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.atoms.hash(state);
    }
}

/// A total truth assignment over a vocabulary.
///
/// Atom `i` of the vocabulary is the `i`-th character of the bitstring
/// rendering, so the numeric order of the packed bits is the bitstring order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interpretation {
    vocabulary: Vocabulary,
    bits: u64,
}

impl Interpretation {
    pub fn from_bitstring(vocabulary: &Vocabulary, text: &str) -> Result<Self> {
        let bad = || Error::InvalidBitstring {
            text: text.to_string(),
            width: vocabulary.len(),
        };
        if text.len() != vocabulary.len() || vocabulary.check_cap().is_err() {
            return Err(bad());
        }
        let mut bits = 0u64;
        for c in text.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(bad()),
                };
        }
        Ok(vocabulary.interpretation(bits))
    }

    /// Interpretation over `vocabulary` making exactly `true_atoms` true.
    pub fn from_true_atoms<'a, I>(vocabulary: &Vocabulary, true_atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Atom>,
    {
        vocabulary.check_cap()?;
        let mut bits = 0;
        for a in true_atoms {
            let i = vocabulary
                .index_of(a)
                .ok_or_else(|| Error::UnknownAtom(a.name().to_string()))?;
            bits |= vocabulary.bit(i);
        }
        Ok(vocabulary.interpretation(bits))
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, index: usize) -> bool {
        self.bits & self.vocabulary.bit(index) != 0
    }

    pub fn value(&self, atom: &Atom) -> Option<bool> {
        self.vocabulary.index_of(atom).map(|i| self.get(i))
    }

    pub fn bitstring(&self) -> String {
        (0..self.vocabulary.len())
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    /// The full conjunction of literals true in this interpretation.
    pub fn to_formula(&self) -> Formula {
        Formula::conjunction(self.vocabulary.atoms().iter().enumerate().map(|(i, a)| {
            let lit = Formula::Atom(a.clone());
            if self.get(i) {
                lit
            } else {
                Formula::not(lit)
            }
        }))
    }
}

impl PartialOrd for Interpretation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interpretation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bits
            .cmp(&other.bits)
            .then_with(|| self.vocabulary.atoms.cmp(&other.vocabulary.atoms))
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bitstring())
    }
}

/// Formula with atoms resolved to bit masks of a particular vocabulary.
#[derive(Clone, Debug)]
pub(crate) enum Compiled {
    Const(bool),
    Var(u64),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    pub(crate) fn new(f: &Formula, v: &Vocabulary) -> Result<Compiled> {
        let pair = |a: &Formula, b: &Formula| -> Result<(Box<Compiled>, Box<Compiled>)> {
            Ok((
                Box::new(Compiled::new(a, v)?),
                Box::new(Compiled::new(b, v)?),
            ))
        };
        Ok(match f {
            Formula::True => Compiled::Const(true),
            Formula::False => Compiled::Const(false),
            Formula::Atom(a) => {
                let i = v
                    .index_of(a)
                    .ok_or_else(|| Error::UnknownAtom(a.name().to_string()))?;
                Compiled::Var(v.bit(i))
            }
            Formula::Not(g) => Compiled::Not(Box::new(Compiled::new(g, v)?)),
            Formula::And(a, b) => {
                let (a, b) = pair(a, b)?;
                Compiled::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = pair(a, b)?;
                Compiled::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = pair(a, b)?;
                Compiled::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = pair(a, b)?;
                Compiled::Iff(a, b)
            }
        })
    }

    pub(crate) fn eval(&self, bits: u64) -> bool {
        match self {
            Compiled::Const(c) => *c,
            Compiled::Var(mask) => bits & mask != 0,
            Compiled::Not(f) => !f.eval(bits),
            Compiled::And(a, b) => a.eval(bits) && b.eval(bits),
            Compiled::Or(a, b) => a.eval(bits) || b.eval(bits),
            Compiled::Implies(a, b) => !a.eval(bits) || b.eval(bits),
            Compiled::Iff(a, b) => a.eval(bits) == b.eval(bits),
        }
    }
}

/// A compiled conjunction of formulas.
#[derive(Clone, Debug, Default)]
pub(crate) struct Theory {
    parts: Vec<Compiled>,
}

impl Theory {
    pub(crate) fn new<'a, I>(fs: I, v: &Vocabulary) -> Result<Theory>
    where
        I: IntoIterator<Item = &'a Formula>,
    {
        let parts = fs
            .into_iter()
            .map(|f| Compiled::new(f, v))
            .collect::<Result<_>>()?;
        Ok(Theory { parts })
    }

    pub(crate) fn push(&mut self, c: Compiled) {
        self.parts.push(c);
    }

    pub(crate) fn extend(&mut self, other: &Theory) {
        self.parts.extend(other.parts.iter().cloned());
    }

    pub(crate) fn holds(&self, bits: u64) -> bool {
        self.parts.iter().all(|c| c.eval(bits))
    }

    pub(crate) fn satisfiable(&self, space: u64) -> bool {
        (0..space).any(|bits| self.holds(bits))
    }

    pub(crate) fn models(&self, space: u64) -> impl Iterator<Item = u64> + '_ {
        (0..space).filter(move |&bits| self.holds(bits))
    }
}

pub fn evaluate(f: &Formula, w: &Interpretation) -> Result<bool> {
    Ok(Compiled::new(f, w.vocabulary())?.eval(w.bits()))
}

/// Models of `f` over `v`, in ascending bitstring order.
pub fn enumerate_models(f: &Formula, v: &Vocabulary) -> Result<BTreeSet<Interpretation>> {
    let c = Compiled::new(f, v)?;
    let space = v.space()?;
    Ok((0..space)
        .filter(|&bits| c.eval(bits))
        .map(|bits| v.interpretation(bits))
        .collect())
}

/// Models of the conjunction of `fs`.
pub fn models_of_set<'a, I>(fs: I, v: &Vocabulary) -> Result<BTreeSet<Interpretation>>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let theory = Theory::new(fs, v)?;
    let space = v.space()?;
    Ok(theory.models(space).map(|b| v.interpretation(b)).collect())
}

/// Whether the conjunction of `fs` has a model. The empty set is consistent.
pub fn is_consistent<'a, I>(fs: I, v: &Vocabulary) -> Result<bool>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let theory = Theory::new(fs, v)?;
    Ok(theory.satisfiable(v.space()?))
}

pub fn entails<'a, I>(fs: I, g: &Formula, v: &Vocabulary) -> Result<bool>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let theory = Theory::new(fs, v)?;
    let goal = Compiled::new(g, v)?;
    let space = v.space()?;
    Ok((0..space).all(|bits| !theory.holds(bits) || goal.eval(bits)))
}

pub fn equivalent(f: &Formula, g: &Formula, v: &Vocabulary) -> Result<bool> {
    let a = Compiled::new(f, v)?;
    let b = Compiled::new(g, v)?;
    let space = v.space()?;
    Ok((0..space).all(|bits| a.eval(bits) == b.eval(bits)))
}

/// Whether two formula sets have the same models (read conjunctively).
pub fn sets_equivalent<'a, I, J>(fs: I, gs: J, v: &Vocabulary) -> Result<bool>
where
    I: IntoIterator<Item = &'a Formula>,
    J: IntoIterator<Item = &'a Formula>,
{
    let a = Theory::new(fs, v)?;
    let b = Theory::new(gs, v)?;
    let space = v.space()?;
    Ok((0..space).all(|bits| a.holds(bits) == b.holds(bits)))
}
