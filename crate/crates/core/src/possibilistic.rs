//! Possibilistic knowledge bases and the measures derived from them.
//!
//! All degrees are exact rationals. A base induces the least specific
//! possibility distribution compatible with its weighted formulas: an
//! interpretation falsifying some formulas gets `1 - (largest weight among
//! them)`, one satisfying everything gets `1`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::logic::{self, Atom, Compiled, Formula, Interpretation, Theory, Vocabulary};

const MAX_FRACTION_DIGITS: usize = 9;

/// An exact degree in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(Ratio<i64>);

impl Weight {
    pub const ZERO: Weight = Weight(Ratio::new_raw(0, 1));
    pub const ONE: Weight = Weight(Ratio::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidWeight(format!("{numer}/{denom}")));
        }
        Weight::from_ratio(Ratio::new(numer, denom))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Result<Self> {
        if r < Ratio::zero() || r > Ratio::one() {
            return Err(Error::WeightOutOfRange {
                value: r.to_string(),
                range: "[0, 1]",
            });
        }
        Ok(Weight(r))
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    /// `1 - self`.
    pub fn complement(self) -> Weight {
        Weight(Ratio::one() - self.0)
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(self) -> bool {
        self.0.is_one()
    }
}

impl fmt::Display for Weight {
    /// `p/q` in lowest terms, or a bare integer.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// Accepts `1`, `0.95` (at most nine fraction digits) or `19/20`.
    fn from_str(s: &str) -> Result<Self> {
        let invalid = || Error::InvalidWeight(s.to_string());
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let ratio = if let Some((n, d)) = s.split_once('/') {
            if !digits(n) || !digits(d) {
                return Err(invalid());
            }
            let n: i64 = n.parse().map_err(|_| invalid())?;
            let d: i64 = d.parse().map_err(|_| invalid())?;
            if d == 0 {
                return Err(invalid());
            }
            Ratio::new(n, d)
        } else if let Some((int, frac)) = s.split_once('.') {
            if !digits(int) || !digits(frac) || frac.len() > MAX_FRACTION_DIGITS {
                return Err(invalid());
            }
            let scale = 10i64.pow(frac.len() as u32);
            let int: i64 = int.parse().map_err(|_| invalid())?;
            let frac: i64 = frac.parse().map_err(|_| invalid())?;
            let numer = int
                .checked_mul(scale)
                .and_then(|x| x.checked_add(frac))
                .ok_or_else(invalid)?;
            Ratio::new(numer, scale)
        } else {
            if !digits(s) {
                return Err(invalid());
            }
            Ratio::from_integer(s.parse().map_err(|_| invalid())?)
        };
        Weight::from_ratio(ratio)
    }
}

/// A formula paired with a necessity lower bound in `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightedFormula {
    pub formula: Formula,
    pub weight: Weight,
}

impl WeightedFormula {
    pub fn new(formula: Formula, weight: Weight) -> Result<Self> {
        if weight.is_zero() {
            return Err(Error::WeightOutOfRange {
                value: weight.to_string(),
                range: "(0, 1]",
            });
        }
        Ok(WeightedFormula { formula, weight })
    }
}

impl fmt::Display for WeightedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.formula, self.weight)
    }
}

/// A finite set of weighted formulas, optionally named.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PossibilisticKB {
    name: Option<String>,
    formulas: BTreeSet<WeightedFormula>,
}

impl PossibilisticKB {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn named(name: impl Into<String>) -> Self {
        PossibilisticKB {
            name: Some(name.into()),
            formulas: BTreeSet::new(),
        }
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Formula, Weight)>,
    {
        let mut kb = PossibilisticKB::new();
        for (f, w) in pairs {
            kb.insert(f, w)?;
        }
        Ok(kb)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Returns `false` if the exact pair was already present.
    pub fn insert(&mut self, formula: Formula, weight: Weight) -> Result<bool> {
        Ok(self.formulas.insert(WeightedFormula::new(formula, weight)?))
    }

    pub fn push(&mut self, wf: WeightedFormula) -> bool {
        self.formulas.insert(wf)
    }

    pub fn iter(&self) -> impl Iterator<Item = &WeightedFormula> {
        self.formulas.iter()
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn contains(&self, wf: &WeightedFormula) -> bool {
        self.formulas.contains(wf)
    }

    /// The classical base: the formulas with weights dropped.
    pub fn classical(&self) -> BTreeSet<Formula> {
        self.formulas.iter().map(|wf| wf.formula.clone()).collect()
    }

    /// Distinct weights, largest first.
    pub fn weights_desc(&self) -> Vec<Weight> {
        let set: BTreeSet<Weight> = self.formulas.iter().map(|wf| wf.weight).collect();
        set.into_iter().rev().collect()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for wf in &self.formulas {
            wf.formula.collect_atoms(&mut out);
        }
        out
    }

    /// Set union; the name of `self` is kept.
    pub fn union(&self, other: &PossibilisticKB) -> PossibilisticKB {
        let mut out = self.clone();
        out.formulas.extend(other.formulas.iter().cloned());
        out
    }

    /// `self ∪ {(f, 1)}`.
    pub fn with_certain(&self, f: &Formula) -> PossibilisticKB {
        let mut out = self.clone();
        out.formulas.insert(WeightedFormula {
            formula: f.clone(),
            weight: Weight::ONE,
        });
        out
    }
}

impl<'a> IntoIterator for &'a PossibilisticKB {
    type Item = &'a WeightedFormula;
    type IntoIter = std::collections::btree_set::Iter<'a, WeightedFormula>;

    fn into_iter(self) -> Self::IntoIter {
        self.formulas.iter()
    }
}

/// An ordered multiset of bases; concatenation is multiset union.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Profile {
    bases: Vec<PossibilisticKB>,
}

impl Profile {
    pub fn new(bases: Vec<PossibilisticKB>) -> Self {
        Profile { bases }
    }

    pub fn bases(&self) -> &[PossibilisticKB] {
        &self.bases
    }

    pub fn push(&mut self, kb: PossibilisticKB) {
        self.bases.push(kb);
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PossibilisticKB> {
        self.bases.iter()
    }

    /// Multiset union of two profiles.
    pub fn concat(&self, other: &Profile) -> Profile {
        let mut bases = self.bases.clone();
        bases.extend(other.bases.iter().cloned());
        Profile { bases }
    }

    /// The set union of all bases.
    pub fn union_all(&self) -> PossibilisticKB {
        self.bases
            .iter()
            .fold(PossibilisticKB::new(), |acc, kb| acc.union(kb))
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.bases.iter().flat_map(|kb| kb.atoms()).collect()
    }

    /// Display name of the base at `index`: its own name or `B<index+1>`.
    pub fn label(&self, index: usize) -> String {
        self.bases[index]
            .name()
            .map(str::to_string)
            .unwrap_or_else(|| format!("B{}", index + 1))
    }
}

impl<'a> IntoIterator for &'a Profile {
    type Item = &'a PossibilisticKB;
    type IntoIter = std::slice::Iter<'a, PossibilisticKB>;

    fn into_iter(self) -> Self::IntoIter {
        self.bases.iter()
    }
}

impl FromIterator<PossibilisticKB> for Profile {
    fn from_iter<I: IntoIterator<Item = PossibilisticKB>>(iter: I) -> Self {
        Profile {
            bases: iter.into_iter().collect(),
        }
    }
}

/// A base compiled against a vocabulary, for repeated evaluation.
#[derive(Clone, Debug)]
pub(crate) struct CompiledKb {
    entries: Vec<(Compiled, Weight)>,
}

impl CompiledKb {
    pub(crate) fn new(kb: &PossibilisticKB, v: &Vocabulary) -> Result<Self> {
        let entries = kb
            .iter()
            .map(|wf| Ok((Compiled::new(&wf.formula, v)?, wf.weight)))
            .collect::<Result<_>>()?;
        Ok(CompiledKb { entries })
    }

    pub(crate) fn possibility(&self, bits: u64) -> Weight {
        self.entries
            .iter()
            .filter(|(c, _)| !c.eval(bits))
            .map(|(_, w)| *w)
            .max()
            .map_or(Weight::ONE, Weight::complement)
    }

    /// Strict or non-strict cut at `level`.
    pub(crate) fn cut(&self, level: Weight, strict: bool) -> Theory {
        let mut t = Theory::default();
        for (c, w) in &self.entries {
            if *w > level || (!strict && *w == level) {
                t.push(c.clone());
            }
        }
        t
    }

    fn weights_desc(&self) -> Vec<Weight> {
        let set: BTreeSet<Weight> = self.entries.iter().map(|(_, w)| *w).collect();
        set.into_iter().rev().collect()
    }

    /// Inconsistency degree of this base together with `constraint` at
    /// weight 1.
    pub(crate) fn inc_with(&self, constraint: &Theory, space: u64) -> Weight {
        let mut levels = self.weights_desc();
        if !levels.contains(&Weight::ONE) {
            levels.insert(0, Weight::ONE);
        }
        for level in levels {
            let mut t = self.cut(level, false);
            t.extend(constraint);
            if !t.satisfiable(space) {
                return level;
            }
        }
        Weight::ZERO
    }
}

/// The possibility degree of `w` under the distribution induced by `kb`.
pub fn possibility(kb: &PossibilisticKB, w: &Interpretation) -> Result<Weight> {
    Ok(CompiledKb::new(kb, w.vocabulary())?.possibility(w.bits()))
}

/// Maximum possibility over the models of `f`; 0 when `f` has none.
pub fn possibility_of(kb: &PossibilisticKB, f: &Formula, v: &Vocabulary) -> Result<Weight> {
    let ckb = CompiledKb::new(kb, v)?;
    let cf = Compiled::new(f, v)?;
    let space = v.space()?;
    Ok((0..space)
        .filter(|&b| cf.eval(b))
        .map(|b| ckb.possibility(b))
        .max()
        .unwrap_or(Weight::ZERO))
}

/// `1 - possibility_of(kb, !f)`.
pub fn necessity_of(kb: &PossibilisticKB, f: &Formula, v: &Vocabulary) -> Result<Weight> {
    Ok(possibility_of(kb, &Formula::not(f.clone()), v)?.complement())
}

/// Formulas with weight `>= level` (or `> level` when `strict`).
pub fn cut(kb: &PossibilisticKB, level: Weight, strict: bool) -> BTreeSet<Formula> {
    kb.iter()
        .filter(|wf| wf.weight > level || (!strict && wf.weight == level))
        .map(|wf| wf.formula.clone())
        .collect()
}

/// The largest weight whose cut is inconsistent, or 0.
pub fn inconsistency_degree(kb: &PossibilisticKB, v: &Vocabulary) -> Result<Weight> {
    let ckb = CompiledKb::new(kb, v)?;
    let space = v.space()?;
    for level in ckb.weights_desc() {
        if !ckb.cut(level, false).satisfiable(space) {
            return Ok(level);
        }
    }
    Ok(Weight::ZERO)
}

/// Inconsistency degree of `f` with respect to `kb`: that of `kb ∪ {(f, 1)}`.
pub fn inc_wrt(f: &Formula, kb: &PossibilisticKB, v: &Vocabulary) -> Result<Weight> {
    inconsistency_degree(&kb.with_certain(f), v)
}

/// The degree to which `f` follows from `kb`, if any.
///
/// Levels are scanned from the top; the first cut entailing `f` fixes the
/// only candidate, which qualifies when that cut is consistent. The level 1
/// is always a candidate so tautologies get degree 1.
pub fn pi_consequence(kb: &PossibilisticKB, f: &Formula, v: &Vocabulary) -> Result<Option<Weight>> {
    let mut levels = kb.weights_desc();
    if !levels.contains(&Weight::ONE) {
        levels.insert(0, Weight::ONE);
    }
    for level in levels {
        let layer = cut(kb, level, false);
        if logic::entails(&layer, f, v)? {
            return Ok(logic::is_consistent(&layer, v)?.then_some(level));
        }
    }
    Ok(None)
}

/// Cut-wise equivalence: every `a`-cut of the two bases has the same models.
pub fn kb_equivalent_s(a: &PossibilisticKB, b: &PossibilisticKB, v: &Vocabulary) -> Result<bool> {
    let levels: BTreeSet<Weight> = a.iter().chain(b.iter()).map(|wf| wf.weight).collect();
    for level in levels {
        if !logic::sets_equivalent(&cut(a, level, false), &cut(b, level, false), v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether some bijection pairs every base of `e1` with a cut-wise
/// equivalent base of `e2`.
pub fn profile_equivalent_s(e1: &Profile, e2: &Profile, v: &Vocabulary) -> Result<bool> {
    if e1.len() != e2.len() {
        return Ok(false);
    }
    let n = e1.len();
    let mut table = vec![vec![false; n]; n];
    for (i, a) in e1.iter().enumerate() {
        for (j, b) in e2.iter().enumerate() {
            table[i][j] = kb_equivalent_s(a, b, v)?;
        }
    }
    fn assign(row: usize, table: &[Vec<bool>], used: &mut [bool]) -> bool {
        if row == table.len() {
            return true;
        }
        for col in 0..table.len() {
            if table[row][col] && !used[col] {
                used[col] = true;
                if assign(row + 1, table, used) {
                    return true;
                }
                used[col] = false;
            }
        }
        false
    }
    Ok(assign(0, &table, &mut vec![false; n]))
}

/// Inconsistency degree of the whole profile together with `mu` at weight 1.
pub fn inc_profile(e: &Profile, mu: &Formula, v: &Vocabulary) -> Result<Weight> {
    inconsistency_degree(&e.union_all().with_certain(mu), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    fn p(name: &str) -> Formula {
        Formula::var(name)
    }

    fn kb(pairs: &[(Formula, &str)]) -> PossibilisticKB {
        PossibilisticKB::from_pairs(pairs.iter().map(|(f, s)| (f.clone(), w(s)))).unwrap()
    }

    fn four() -> Vocabulary {
        Vocabulary::of(&["p1", "p2", "p3", "p4"])
    }

    fn b1() -> PossibilisticKB {
        kb(&[
            (Formula::or(p("p1"), p("p2")), "0.9"),
            (p("p3"), "0.9"),
            (p("p1"), "0.6"),
            (p("p2"), "0.6"),
        ])
    }

    fn b2() -> PossibilisticKB {
        kb(&[
            (Formula::or(p("p3"), p("p4")), "0.9"),
            (Formula::not(p("p1")), "0.6"),
            (p("p2"), "0.6"),
        ])
    }

    fn b4() -> PossibilisticKB {
        kb(&[
            (p("p1"), "0.9"),
            (p("p2"), "0.8"),
            (Formula::not(p("p3")), "0.6"),
        ])
    }

    fn mu() -> Formula {
        Formula::and(Formula::or(Formula::not(p("p1")), p("p2")), p("p3"))
    }

    fn at(bits: &str) -> Interpretation {
        Interpretation::from_bitstring(&four(), bits).unwrap()
    }

    #[test]
    fn weight_parsing() {
        assert_eq!(w("0.95"), Weight::new(19, 20).unwrap());
        assert_eq!(w("3/5"), Weight::new(3, 5).unwrap());
        assert_eq!(w("1"), Weight::ONE);
        assert_eq!(w("0.000000001"), Weight::new(1, 1_000_000_000).unwrap());
        assert!("0.0000000001".parse::<Weight>().is_err());
        assert!("1.5".parse::<Weight>().is_err());
        assert!("3/0".parse::<Weight>().is_err());
        assert!("-0.5".parse::<Weight>().is_err());
        assert!(".5".parse::<Weight>().is_err());
        assert_eq!(w("6/10").to_string(), "3/5");
        assert_eq!(w("1.0").to_string(), "1");
        assert_eq!(w("0.6").complement(), w("0.4"));
    }

    #[test]
    fn zero_weight_rejected_for_formulas() {
        assert!(WeightedFormula::new(p("p"), Weight::ZERO).is_err());
    }

    #[test]
    fn set_semantics() {
        let mut k = PossibilisticKB::new();
        assert!(k.insert(p("p"), w("0.5")).unwrap());
        assert!(!k.insert(p("p"), w("0.5")).unwrap());
        assert!(k.insert(p("p"), w("0.7")).unwrap());
        assert_eq!(k.len(), 2);
        assert_eq!(k.classical().len(), 1);
    }

    #[test]
    fn possibility_examples() {
        assert_eq!(possibility(&b1(), &at("0111")).unwrap(), w("0.4"));
        assert_eq!(
            possibility(&PossibilisticKB::new(), &at("0111")).unwrap(),
            Weight::ONE
        );
        assert_eq!(possibility(&b4(), &at("1111")).unwrap(), w("0.4"));
    }

    #[test]
    fn duplicate_formula_uses_largest_weight() {
        let k = kb(&[(p("p1"), "0.3"), (p("p1"), "0.7")]);
        assert_eq!(possibility(&k, &at("0000")).unwrap(), w("0.3"));
    }

    #[test]
    fn possibility_and_necessity_of() {
        let v = four();
        assert_eq!(possibility_of(&b4(), &p("p1"), &v).unwrap(), Weight::ONE);
        assert_eq!(
            necessity_of(&PossibilisticKB::new(), &Formula::True, &v).unwrap(),
            Weight::ONE
        );
        assert_eq!(
            possibility_of(&b4(), &Formula::False, &v).unwrap(),
            Weight::ZERO
        );
        // N(p1) under B4 is its weight.
        assert_eq!(necessity_of(&b4(), &p("p1"), &v).unwrap(), w("0.9"));
    }

    #[test]
    fn cut_examples() {
        let strict = cut(&b4(), w("0.6"), true);
        assert_eq!(strict, BTreeSet::from([p("p1"), p("p2")]));
        assert_eq!(cut(&b4(), Weight::ZERO, false), b4().classical());
        assert!(cut(&b4(), Weight::ONE, true).is_empty());
    }

    #[test]
    fn inconsistency_degree_examples() {
        let v = four();
        assert_eq!(
            inconsistency_degree(&b1().with_certain(&mu()), &v).unwrap(),
            Weight::ZERO
        );
        assert_eq!(inconsistency_degree(&b4(), &v).unwrap(), Weight::ZERO);
        let pp = kb(&[(p("p1"), "0.8"), (Formula::not(p("p1")), "0.3")]);
        assert_eq!(inconsistency_degree(&pp, &v).unwrap(), w("0.3"));
    }

    #[test]
    fn inc_wrt_examples() {
        let v = four();
        assert_eq!(inc_wrt(&mu(), &b4(), &v).unwrap(), w("0.6"));
        let phi13 = Formula::conjunction([p("p1"), p("p2"), p("p3")]);
        assert_eq!(inc_wrt(&phi13, &b2(), &v).unwrap(), w("0.6"));
        assert_eq!(inc_wrt(&Formula::True, &b1(), &v).unwrap(), Weight::ZERO);
    }

    #[test]
    fn pi_consequence_examples() {
        let v = Vocabulary::of(&["p", "q"]);
        let k = kb(&[
            (p("p"), "0.8"),
            (Formula::or(Formula::not(p("p")), p("q")), "0.5"),
        ]);
        assert_eq!(pi_consequence(&k, &p("q"), &v).unwrap(), Some(w("0.5")));
        let single = kb(&[(p("p"), "0.8")]);
        assert_eq!(
            pi_consequence(&single, &p("p"), &v).unwrap(),
            Some(w("0.8"))
        );
        assert_eq!(pi_consequence(&single, &p("q"), &v).unwrap(), None);
        assert_eq!(
            pi_consequence(&single, &Formula::True, &v).unwrap(),
            Some(Weight::ONE)
        );
    }

    #[test]
    fn pi_consequence_blocked_by_inconsistent_layer() {
        let v = Vocabulary::of(&["p", "q"]);
        let k = kb(&[
            (p("p"), "0.8"),
            (Formula::not(p("p")), "0.8"),
            (p("q"), "0.5"),
        ]);
        assert_eq!(pi_consequence(&k, &p("p"), &v).unwrap(), None);
        assert_eq!(pi_consequence(&k, &p("q"), &v).unwrap(), None);
    }

    #[test]
    fn equivalence_s_examples() {
        let v = Vocabulary::of(&["p", "q"]);
        let k = kb(&[(p("p"), "0.5"), (Formula::or(p("p"), p("q")), "0.9")]);
        let dn = PossibilisticKB::from_pairs(
            k.iter()
                .map(|wf| (Formula::not(Formula::not(wf.formula.clone())), wf.weight)),
        )
        .unwrap();
        assert!(kb_equivalent_s(&k, &dn, &v).unwrap());
        assert!(!kb_equivalent_s(&kb(&[(p("p"), "0.5")]), &kb(&[(p("p"), "0.6")]), &v).unwrap());
        let split = kb(&[(p("p"), "0.5"), (p("q"), "0.5")]);
        let joined = kb(&[(Formula::and(p("p"), p("q")), "0.5")]);
        assert!(kb_equivalent_s(&split, &joined, &v).unwrap());
    }

    #[test]
    fn profile_equivalence_examples() {
        let v = four();
        let e = Profile::new(vec![b1(), b2(), b4()]);
        let perm = Profile::new(vec![b4(), b1(), b2()]);
        assert!(profile_equivalent_s(&e, &perm, &v).unwrap());
        let one = Profile::new(vec![b1()]);
        let two = Profile::new(vec![b1(), b1()]);
        assert!(!profile_equivalent_s(&one, &two, &v).unwrap());
        let a = Profile::new(vec![kb(&[(p("p1"), "0.5")])]);
        let b = Profile::new(vec![kb(&[(Formula::not(Formula::not(p("p1"))), "0.5")])]);
        assert!(profile_equivalent_s(&a, &b, &v).unwrap());
    }

    #[test]
    fn inc_profile_trivial_cases() {
        let v = four();
        assert_eq!(
            inc_profile(&Profile::default(), &mu(), &v).unwrap(),
            Weight::ZERO
        );
        let single = Profile::new(vec![b1()]);
        assert_eq!(
            inc_profile(&single, &Formula::True, &v).unwrap(),
            Weight::ZERO
        );
    }
}
