//! Classical (unweighted) profiles and the propositional merging operators
//! the lexicographic merge reduces to when every weight is 1.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::logic::{Formula, Interpretation, Theory, Vocabulary};
use crate::possibilistic::{PossibilisticKB, Profile, Weight, WeightedFormula};

/// A classical base, read as the conjunction of its formulas.
pub type ClassicalKb = BTreeSet<Formula>;

/// How a classical base enters a merge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseReading {
    /// The base is one source: the conjunction of its formulas.
    Conjunctive,
    /// Every formula of every base is a source of its own.
    FormulaSet,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassicalProfile {
    pub bases: Vec<ClassicalKb>,
}

impl ClassicalProfile {
    pub fn new(bases: Vec<ClassicalKb>) -> Self {
        ClassicalProfile { bases }
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    /// The classical projection of a profile whose weights are all 1.
    pub fn from_profile(e: &Profile) -> Result<Self> {
        let mut bases = Vec::with_capacity(e.len());
        for (i, kb) in e.iter().enumerate() {
            if kb.iter().any(|wf| !wf.weight.is_one()) {
                return Err(Error::NotClassical(e.label(i)));
            }
            bases.push(kb.classical());
        }
        Ok(ClassicalProfile { bases })
    }

    /// Lifts every base at weight 1 under the given reading. Under
    /// `FormulaSet` the profile is split first.
    pub fn lift(&self, reading: BaseReading) -> Profile {
        match reading {
            BaseReading::Conjunctive => self
                .bases
                .iter()
                .map(|k| lift_classical(&BTreeSet::from([Formula::conjunction(k.iter().cloned())])))
                .collect(),
            BaseReading::FormulaSet => split_profile(self)
                .bases
                .iter()
                .map(lift_classical)
                .collect(),
        }
    }
}

/// Every formula of `k` at weight 1.
pub fn lift_classical(k: &ClassicalKb) -> PossibilisticKB {
    let mut kb = PossibilisticKB::new();
    for f in k {
        kb.push(WeightedFormula {
            formula: f.clone(),
            weight: Weight::ONE,
        });
    }
    kb
}

/// 0 if `w` satisfies every formula of `k`, 1 otherwise.
pub fn drastic_distance(w: &Interpretation, k: &ClassicalKb) -> Result<u8> {
    let t = Theory::new(k, w.vocabulary())?;
    Ok(if t.holds(w.bits()) { 0 } else { 1 })
}

/// Models of `mu` whose ascending list of drastic distances to the bases is
/// lexicographically minimal.
pub fn merge_gmin(
    e: &ClassicalProfile,
    mu: &Formula,
    v: &Vocabulary,
) -> Result<BTreeSet<Interpretation>> {
    let constraint = Theory::new([mu], v)?;
    let bases = e
        .bases
        .iter()
        .map(|k| Theory::new(k, v))
        .collect::<Result<Vec<_>>>()?;
    let space = v.space()?;
    let mut best: Option<Vec<u8>> = None;
    let mut cohort = BTreeSet::new();
    for bits in constraint.models(space) {
        let mut key: Vec<u8> = bases.iter().map(|t| u8::from(!t.holds(bits))).collect();
        key.sort_unstable();
        match best.as_ref().map(|b| key.cmp(b)) {
            Some(std::cmp::Ordering::Greater) => {}
            Some(std::cmp::Ordering::Equal) => {
                cohort.insert(v.interpretation(bits));
            }
            _ => {
                best = Some(key);
                cohort.clear();
                cohort.insert(v.interpretation(bits));
            }
        }
    }
    Ok(cohort)
}

/// Largest sub-multisets (as sorted position lists) of `e` jointly consistent
/// with `mu`. Empty when `mu` is inconsistent.
pub fn cardm_subprofiles(
    e: &ClassicalProfile,
    mu: &Formula,
    v: &Vocabulary,
) -> Result<Vec<Vec<usize>>> {
    let constraint = Theory::new([mu], v)?;
    let bases = e
        .bases
        .iter()
        .map(|k| Theory::new(k, v))
        .collect::<Result<Vec<_>>>()?;
    let space = v.space()?;
    let n = bases.len();
    assert!(n < 32, "too many bases for subset search");
    let mut by_size: Vec<u32> = (0..1u32 << n).collect();
    by_size.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));

    let mut best: Option<u32> = None;
    let mut family = Vec::new();
    for mask in by_size {
        if best.is_some_and(|size| mask.count_ones() < size) {
            break;
        }
        let mut t = constraint.clone();
        for (i, b) in bases.iter().enumerate() {
            if mask & (1 << i) != 0 {
                t.extend(b);
            }
        }
        if t.satisfiable(space) {
            best = Some(mask.count_ones());
            family.push((0..n).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>());
        }
    }
    family.sort();
    Ok(family)
}

/// Disjunction over the cardinality-maximal consistent sub-profiles of their
/// conjunction with `mu`.
pub fn merge_c4(
    e: &ClassicalProfile,
    mu: &Formula,
    v: &Vocabulary,
    reading: BaseReading,
) -> Result<Formula> {
    let e = match reading {
        BaseReading::Conjunctive => e.clone(),
        BaseReading::FormulaSet => split_profile(e),
    };
    let family = cardm_subprofiles(&e, mu, v)?;
    Ok(Formula::disjunction(family.iter().map(|group| {
        let mut parts: Vec<Formula> = group
            .iter()
            .flat_map(|&i| e.bases[i].iter().cloned())
            .collect();
        parts.push(mu.clone());
        Formula::conjunction(parts)
    })))
}

/// One singleton base per formula, first occurrences kept.
pub fn split_profile(e: &ClassicalProfile) -> ClassicalProfile {
    let mut seen = BTreeSet::new();
    let bases = e
        .bases
        .iter()
        .flatten()
        .filter(|f| seen.insert((*f).clone()))
        .map(|f| BTreeSet::from([f.clone()]))
        .collect();
    ClassicalProfile { bases }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{enumerate_models, equivalent};
    use crate::possibilistic::possibility;

    fn p(n: &str) -> Formula {
        Formula::var(n)
    }

    fn kb(fs: &[Formula]) -> ClassicalKb {
        fs.iter().cloned().collect()
    }

    fn p_and_not_p() -> ClassicalProfile {
        ClassicalProfile::new(vec![kb(&[p("p")]), kb(&[Formula::not(p("p"))])])
    }

    #[test]
    fn lifting() {
        let lifted = lift_classical(&kb(&[p("p"), p("q")]));
        assert_eq!(lifted.len(), 2);
        assert!(lifted.iter().all(|wf| wf.weight == Weight::ONE));
        assert!(lift_classical(&ClassicalKb::new()).is_empty());
        let dup: ClassicalKb = [p("p"), p("p")].into_iter().collect();
        assert_eq!(lift_classical(&dup).len(), 1);
    }

    #[test]
    fn drastic_distance_cases() {
        let v = Vocabulary::of(&["p", "q"]);
        let k = kb(&[p("p")]);
        let w11 = Interpretation::from_bitstring(&v, "11").unwrap();
        let w01 = Interpretation::from_bitstring(&v, "01").unwrap();
        assert_eq!(drastic_distance(&w11, &k).unwrap(), 0);
        assert_eq!(drastic_distance(&w01, &k).unwrap(), 1);
        let bad = kb(&[p("p"), Formula::not(p("p"))]);
        for w in v.interpretations().unwrap() {
            assert_eq!(drastic_distance(&w, &bad).unwrap(), 1);
            let pi = possibility(&lift_classical(&bad), &w).unwrap();
            assert_eq!(
                Weight::new(i64::from(drastic_distance(&w, &bad).unwrap()), 1).unwrap(),
                pi.complement()
            );
        }
    }

    #[test]
    fn gmin_examples() {
        let v = Vocabulary::of(&["p"]);
        let both = merge_gmin(&p_and_not_p(), &Formula::True, &v).unwrap();
        assert_eq!(both.len(), 2);
        let only = ClassicalProfile::new(vec![kb(&[p("p")])]);
        assert_eq!(
            merge_gmin(&only, &Formula::True, &v).unwrap(),
            enumerate_models(&p("p"), &v).unwrap()
        );
    }

    #[test]
    fn cardm_examples() {
        let v = Vocabulary::of(&["p", "q"]);
        assert_eq!(
            cardm_subprofiles(&p_and_not_p(), &Formula::True, &v).unwrap(),
            vec![vec![0], vec![1]]
        );
        let agree = ClassicalProfile::new(vec![kb(&[p("p")]), kb(&[p("q")])]);
        assert_eq!(
            cardm_subprofiles(&agree, &Formula::True, &v).unwrap(),
            vec![vec![0, 1]]
        );
        let mu = Formula::and(Formula::not(p("p")), Formula::not(p("q")));
        assert_eq!(
            cardm_subprofiles(&agree, &mu, &v).unwrap(),
            vec![Vec::<usize>::new()]
        );
        assert!(cardm_subprofiles(&agree, &Formula::False, &v)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn c4_examples() {
        let v = Vocabulary::of(&["p", "q"]);
        let f = merge_c4(&p_and_not_p(), &Formula::True, &v, BaseReading::Conjunctive).unwrap();
        assert!(equivalent(&f, &Formula::True, &v).unwrap());
        let agree = ClassicalProfile::new(vec![kb(&[p("p")]), kb(&[p("q")])]);
        let mu = Formula::or(p("p"), p("q"));
        let f = merge_c4(&agree, &mu, &v, BaseReading::Conjunctive).unwrap();
        assert!(equivalent(&f, &Formula::and(p("p"), p("q")), &v).unwrap());
        let f = merge_c4(&agree, &Formula::False, &v, BaseReading::Conjunctive).unwrap();
        assert_eq!(f, Formula::False);
    }

    #[test]
    fn readings_differ() {
        let v = Vocabulary::of(&["p", "q"]);
        let e = ClassicalProfile::new(vec![kb(&[p("p"), p("q")])]);
        let mu = Formula::not(p("p"));
        let whole = merge_c4(&e, &mu, &v, BaseReading::Conjunctive).unwrap();
        let split = merge_c4(&e, &mu, &v, BaseReading::FormulaSet).unwrap();
        assert!(equivalent(&whole, &mu, &v).unwrap());
        assert!(equivalent(&split, &Formula::and(mu, p("q")), &v).unwrap());
    }

    #[test]
    fn splitting() {
        let e = ClassicalProfile::new(vec![kb(&[p("p"), p("q")])]);
        assert_eq!(split_profile(&e).bases, vec![kb(&[p("p")]), kb(&[p("q")])]);
        let dup = ClassicalProfile::new(vec![kb(&[p("p")]), kb(&[p("p")])]);
        assert_eq!(split_profile(&dup).bases, vec![kb(&[p("p")])]);
        assert!(split_profile(&ClassicalProfile::default()).is_empty());
    }

    #[test]
    fn from_profile_requires_unit_weights() {
        let mut kb = PossibilisticKB::named("A");
        kb.insert(p("p"), Weight::new(1, 2).unwrap()).unwrap();
        assert_eq!(
            ClassicalProfile::from_profile(&Profile::new(vec![kb])),
            Err(Error::NotClassical("A".to_string()))
        );
    }
}
