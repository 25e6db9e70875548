//! Strategies shared by the property tests.
#![allow(dead_code)]

use lexmerge::logic::{Formula, Vocabulary};
use lexmerge::possibilistic::{PossibilisticKB, Profile, Weight, WeightedFormula};
use proptest::prelude::*;

pub const ATOMS: [&str; 4] = ["a", "b", "c", "d"];

pub fn vocabulary() -> Vocabulary {
    Vocabulary::of(&ATOMS)
}

pub fn formula_over(atoms: &'static [&'static str]) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        8 => proptest::sample::select(atoms).prop_map(Formula::var),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

pub fn formula() -> impl Strategy<Value = Formula> {
    formula_over(&ATOMS)
}

/// A weight from the tenths grid.
pub fn weight() -> impl Strategy<Value = Weight> {
    (1i64..=10).prop_map(|n| Weight::new(n, 10).unwrap())
}

pub fn kb(max_formulas: usize) -> impl Strategy<Value = PossibilisticKB> {
    proptest::collection::vec((formula(), weight()), 0..=max_formulas).prop_map(|pairs| {
        let mut kb = PossibilisticKB::new();
        for (formula, weight) in pairs {
            kb.push(WeightedFormula { formula, weight });
        }
        kb
    })
}

pub fn profile(max_bases: usize, max_formulas: usize) -> impl Strategy<Value = Profile> {
    proptest::collection::vec(kb(max_formulas), 0..=max_bases).prop_map(Profile::new)
}
