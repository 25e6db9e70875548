mod common;

use lexmerge::logic::{self, enumerate_models, evaluate, Formula, Vocabulary};
use proptest::prelude::*;

#[test]
fn de_morgan_and_double_negation_exhaustive() {
    let atoms = ["w", "x", "y", "z"];
    for n in 0..=atoms.len() {
        let v = Vocabulary::of(&atoms[..n]);
        let lits: Vec<Formula> = atoms[..n]
            .iter()
            .map(|a| Formula::var(a))
            .chain([Formula::True, Formula::False])
            .collect();
        for a in &lits {
            for b in &lits {
                let lhs = Formula::not(Formula::and(a.clone(), b.clone()));
                let rhs = Formula::or(Formula::not(a.clone()), Formula::not(b.clone()));
                let lhs2 = Formula::not(Formula::or(a.clone(), b.clone()));
                let rhs2 = Formula::and(Formula::not(a.clone()), Formula::not(b.clone()));
                for w in v.interpretations().unwrap() {
                    assert_eq!(evaluate(&lhs, &w).unwrap(), evaluate(&rhs, &w).unwrap());
                    assert_eq!(evaluate(&lhs2, &w).unwrap(), evaluate(&rhs2, &w).unwrap());
                    let dn = Formula::not(Formula::not(a.clone()));
                    assert_eq!(evaluate(&dn, &w).unwrap(), evaluate(a, &w).unwrap());
                }
            }
        }
    }
}

#[test]
fn unknown_atoms_are_reported() {
    let v = Vocabulary::of(&["a"]);
    assert!(enumerate_models(&Formula::var("b"), &v).is_err());
}

proptest! {
    #[test]
    fn models_of_formula_and_negation_partition_the_space(f in common::formula()) {
        let v = common::vocabulary();
        let pos = enumerate_models(&f, &v).unwrap();
        let neg = enumerate_models(&Formula::not(f), &v).unwrap();
        prop_assert_eq!(pos.len() + neg.len(), 1 << v.len());
        prop_assert!(pos.is_disjoint(&neg));
    }

    #[test]
    fn entailment_is_inconsistency_of_the_negation(
        fs in proptest::collection::vec(common::formula(), 0..4),
        g in common::formula(),
    ) {
        let v = common::vocabulary();
        let mut with_neg = fs.clone();
        with_neg.push(Formula::not(g.clone()));
        prop_assert_eq!(
            logic::entails(&fs, &g, &v).unwrap(),
            !logic::is_consistent(&with_neg, &v).unwrap()
        );
    }

    #[test]
    fn models_of_a_set_are_those_of_its_conjunction(fs in proptest::collection::vec(common::formula(), 0..4)) {
        let v = common::vocabulary();
        let conj = Formula::conjunction(fs.iter().cloned());
        prop_assert_eq!(logic::models_of_set(&fs, &v).unwrap(), enumerate_models(&conj, &v).unwrap());
    }

    #[test]
    fn evaluation_matches_truth_tables(f in common::formula(), bits in 0u64..16) {
        let v = common::vocabulary();
        let w = v.interpretations().unwrap().nth(bits as usize).unwrap();
        let direct = truth(&f, &|name| w.value(&lexmerge::Atom::new(name).unwrap()).unwrap());
        prop_assert_eq!(evaluate(&f, &w).unwrap(), direct);
    }
}

fn truth(f: &Formula, value: &dyn Fn(&str) -> bool) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => value(a.name()),
        Formula::Not(g) => !truth(g, value),
        Formula::And(a, b) => truth(a, value) && truth(b, value),
        Formula::Or(a, b) => truth(a, value) || truth(b, value),
        Formula::Implies(a, b) => !truth(a, value) || truth(b, value),
        Formula::Iff(a, b) => truth(a, value) == truth(b, value),
    }
}
