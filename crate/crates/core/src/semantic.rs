//! Model-theoretic lexicographic merging.
//!
//! Each interpretation gets the vector of its possibility degrees under the
//! bases of the profile. Vectors are compared after sorting each one in
//! descending order; the merged result keeps the models of the constraint
//! whose vectors are maximal.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{Compiled, Formula, Interpretation, Vocabulary};
use crate::possibilistic::{CompiledKb, Profile, Weight};

/// Possibility degrees of one interpretation, in profile order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeVector(pub Vec<Weight>);

impl DegreeVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degrees(&self) -> &[Weight] {
        &self.0
    }

    pub fn sorted_desc(&self) -> Vec<Weight> {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// Distinct entries, largest first.
    pub fn distinct_desc(&self) -> Vec<Weight> {
        let mut v = self.sorted_desc();
        v.dedup();
        v
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str(")")
    }
}

pub fn degree_vector(e: &Profile, w: &Interpretation) -> Result<DegreeVector> {
    let degrees = e
        .iter()
        .map(|kb| Ok(CompiledKb::new(kb, w.vocabulary())?.possibility(w.bits())))
        .collect::<Result<_>>()?;
    Ok(DegreeVector(degrees))
}

/// Lexicographic comparison of the descending rearrangements of `a` and `b`.
pub fn lex_compare(a: &DegreeVector, b: &DegreeVector) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.sorted_desc().cmp(&b.sorted_desc()))
}

/// Models of `mu` whose degree vectors are lexicographically maximal.
pub fn merge_semantic(
    e: &Profile,
    mu: &Formula,
    v: &Vocabulary,
) -> Result<BTreeSet<Interpretation>> {
    let constraint = Compiled::new(mu, v)?;
    let bases = e
        .iter()
        .map(|kb| CompiledKb::new(kb, v))
        .collect::<Result<Vec<_>>>()?;
    let space = v.space()?;

    let mut best: Option<Vec<Weight>> = None;
    let mut cohort = Vec::new();
    let mut key = Vec::with_capacity(bases.len());
    for bits in (0..space).filter(|&b| constraint.eval(b)) {
        key.clear();
        key.extend(bases.iter().map(|kb| kb.possibility(bits)));
        key.sort_unstable_by(|a, b| b.cmp(a));
        match best.as_ref().map(|b| key.cmp(b)) {
            Some(Ordering::Less) => {}
            Some(Ordering::Equal) => cohort.push(bits),
            None | Some(Ordering::Greater) => {
                best = Some(key.clone());
                cohort.clear();
                cohort.push(bits);
            }
        }
    }
    Ok(cohort.into_iter().map(|b| v.interpretation(b)).collect())
}

/// Disjunction of the full conjunctions of `models`, ascending; `false` when
/// empty.
pub fn models_to_formula(models: &BTreeSet<Interpretation>, v: &Vocabulary) -> Formula {
    debug_assert!(models.iter().all(|m| m.vocabulary() == v));
    Formula::disjunction(models.iter().map(Interpretation::to_formula))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{enumerate_models, equivalent};
    use crate::possibilistic::PossibilisticKB;

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    fn dv(xs: &[&str]) -> DegreeVector {
        DegreeVector(xs.iter().map(|s| w(s)).collect())
    }

    #[test]
    fn lex_compare_examples() {
        let a = dv(&["0.4", "1", "1", "0.1"]);
        let b = dv(&["1", "0.4", "1", "0.4"]);
        assert_eq!(lex_compare(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(
            lex_compare(&dv(&["0.3", "0.7"]), &dv(&["0.7", "0.3"])).unwrap(),
            Ordering::Equal
        );
        assert_eq!(
            lex_compare(&dv(&["0.5", "0.5"]), &dv(&["0.9", "0.1"])).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            lex_compare(&dv(&["0.5"]), &dv(&["0.5", "0.1"])),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn empty_profile_keeps_constraint_models() {
        let v = Vocabulary::of(&["p", "q"]);
        let mu = Formula::or(Formula::var("p"), Formula::var("q"));
        let got = merge_semantic(&Profile::default(), &mu, &v).unwrap();
        assert_eq!(got, enumerate_models(&mu, &v).unwrap());
        let any = Interpretation::from_bitstring(&v, "01").unwrap();
        assert!(degree_vector(&Profile::default(), &any).unwrap().is_empty());
    }

    #[test]
    fn inconsistent_constraint_gives_nothing() {
        let v = Vocabulary::of(&["p"]);
        let kb = PossibilisticKB::from_pairs([(Formula::var("p"), w("0.5"))]).unwrap();
        let got = merge_semantic(&Profile::new(vec![kb]), &Formula::False, &v).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn model_rendering() {
        let v = Vocabulary::of(&["p1", "p2", "p3", "p4"]);
        assert_eq!(models_to_formula(&BTreeSet::new(), &v), Formula::False);
        let ms: BTreeSet<_> = ["1110", "1111"]
            .iter()
            .map(|b| Interpretation::from_bitstring(&v, b).unwrap())
            .collect();
        let f = models_to_formula(&ms, &v);
        let target =
            Formula::conjunction([Formula::var("p1"), Formula::var("p2"), Formula::var("p3")]);
        assert!(equivalent(&f, &target, &v).unwrap());
        let all: BTreeSet<_> = v.interpretations().unwrap().collect();
        assert!(equivalent(&models_to_formula(&all, &v), &Formula::True, &v).unwrap());
    }

    #[test]
    fn empty_vocabulary_single_model() {
        let v = Vocabulary::sorted([]);
        let got = merge_semantic(&Profile::default(), &Formula::True, &v).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(models_to_formula(&got, &v), Formula::True);
    }
}
