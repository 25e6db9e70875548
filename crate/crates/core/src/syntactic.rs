//! Syntactic computation of the lexicographic merge.
//!
//! The merge is built level by level. A working set of pairs holds an
//! accumulated constraint (a formula set read as a conjunction) and the bases
//! still to be merged under it. Each round finds the smallest inconsistency
//! degree any remaining base has with its pair's constraint, keeps only the
//! pairs achieving it, absorbs the strict cuts of the largest jointly
//! consistent groups of bases at that degree, and carries the rest forward.
//! The disjunction of the surviving constraints is the merged base.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::Result;
use crate::logic::{self, Formula, Theory, Vocabulary};
use crate::possibilistic::{self, CompiledKb, Profile, Weight};

/// An accumulated constraint and the profile positions still to merge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    /// Formulas in insertion order, without repeats.
    pub constraint: Vec<Formula>,
    /// Positions (0-based) into the input profile.
    pub remaining: Vec<usize>,
}

impl Pair {
    pub fn formula(&self) -> Formula {
        Formula::conjunction(self.constraint.iter().cloned())
    }

    fn same_as(&self, other: &Pair) -> bool {
        self.remaining == other.remaining
            && self.constraint.iter().collect::<BTreeSet<_>>()
                == other.constraint.iter().collect::<BTreeSet<_>>()
    }
}

/// What one kept pair contributed to an iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairTrace {
    pub constraint: Formula,
    pub remaining: Vec<usize>,
    /// Smallest inconsistency degree of the constraint with a remaining base.
    pub inc: Weight,
    /// Remaining bases reaching the global degree.
    pub candidates: Vec<usize>,
    pub mcs: Vec<Vec<usize>>,
    pub cardm: Vec<Vec<usize>>,
    /// `None` stands for an empty family (minus infinity).
    pub maxcs: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceIteration {
    pub inc: Weight,
    pub pairs: Vec<PairTrace>,
    pub maxc: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeTrace {
    pub iterations: Vec<TraceIteration>,
    pub final_pairs: Vec<Pair>,
    pub result: Formula,
}

/// The ⊆-maximal subsets `J` of `candidates` whose strict `inc`-cuts are
/// jointly consistent with `constraint`. Each set is sorted; the family is in
/// ascending lexicographic order.
pub fn maximal_consistent_index_sets(
    candidates: &[usize],
    constraint: &[Formula],
    inc: Weight,
    bases: &Profile,
    v: &Vocabulary,
) -> Result<Vec<Vec<usize>>> {
    let space = v.space()?;
    let theory = Theory::new(constraint, v)?;
    let cuts = candidates
        .iter()
        .map(|&j| Ok(CompiledKb::new(&bases.bases()[j], v)?.cut(inc, true)))
        .collect::<Result<Vec<_>>>()?;
    Ok(mcs_of(candidates, &theory, &cuts, space))
}

fn mcs_of(
    candidates: &[usize],
    constraint: &Theory,
    cuts: &[Theory],
    space: u64,
) -> Vec<Vec<usize>> {
    let m = candidates.len();
    assert!(m < 32, "too many candidate bases for subset search");
    let mut masks: Vec<u32> = (0..1u32 << m).collect();
    masks.sort_by_key(|mask| std::cmp::Reverse(mask.count_ones()));

    let mut found: Vec<u32> = Vec::new();
    for mask in masks {
        if found.iter().any(|&f| mask & !f == 0) {
            continue;
        }
        let mut t = constraint.clone();
        for (i, cut) in cuts.iter().enumerate() {
            if mask & (1 << i) != 0 {
                t.extend(cut);
            }
        }
        if t.satisfiable(space) {
            found.push(mask);
        }
    }
    let mut family: Vec<Vec<usize>> = found
        .into_iter()
        .map(|mask| {
            (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| candidates[i])
                .collect()
        })
        .collect();
    family.sort();
    family
}

/// Runs the level-by-level merge. Returns the merged formula and the trace.
pub fn merge_syntactic(e: &Profile, mu: &Formula, v: &Vocabulary) -> Result<(Formula, MergeTrace)> {
    let space = v.space()?;
    let compiled = e
        .iter()
        .map(|kb| CompiledKb::new(kb, v))
        .collect::<Result<Vec<_>>>()?;
    // Surface unknown atoms in the constraint even when the loop never runs.
    Theory::new([mu], v)?;

    let mut pairs = vec![Pair {
        constraint: vec![mu.clone()],
        remaining: (0..e.len()).collect(),
    }];
    let mut iterations = Vec::new();

    while pairs.iter().any(|p| !p.remaining.is_empty()) {
        let width = pairs[0].remaining.len();
        assert!(
            pairs.iter().all(|p| p.remaining.len() == width),
            "pairs carry remaining profiles of different sizes"
        );

        let theories = pairs
            .iter()
            .map(|p| Theory::new(&p.constraint, v))
            .collect::<Result<Vec<_>>>()?;
        let incs: Vec<Vec<Weight>> = pairs
            .iter()
            .zip(&theories)
            .map(|(p, t)| {
                p.remaining
                    .iter()
                    .map(|&j| compiled[j].inc_with(t, space))
                    .collect()
            })
            .collect();
        let pair_inc: Vec<Weight> = incs
            .iter()
            .map(|row| *row.iter().min().expect("nonempty remaining profile"))
            .collect();
        let inc = *pair_inc.iter().min().expect("nonempty working set");

        let mut next: Vec<Pair> = Vec::new();
        let mut maxc: Option<usize> = None;
        let mut traces = Vec::new();
        for (k, pair) in pairs.iter().enumerate() {
            if pair_inc[k] != inc {
                continue;
            }
            let candidates: Vec<usize> = pair
                .remaining
                .iter()
                .zip(&incs[k])
                .filter(|(_, d)| **d == inc)
                .map(|(j, _)| *j)
                .collect();
            let cuts: Vec<Theory> = candidates
                .iter()
                .map(|&j| compiled[j].cut(inc, true))
                .collect();
            let mcs = mcs_of(&candidates, &theories[k], &cuts, space);
            let maxcs = mcs.iter().map(Vec::len).max();
            assert_ne!(
                maxcs,
                Some(0),
                "no candidate base is consistent with its pair"
            );
            let cardm: Vec<Vec<usize>> = mcs
                .iter()
                .filter(|j| Some(j.len()) == maxcs)
                .cloned()
                .collect();

            let successors = cardm.iter().map(|group| {
                let mut constraint = pair.constraint.clone();
                for &j in group {
                    for f in possibilistic::cut(&e.bases()[j], inc, true) {
                        if !constraint.contains(&f) {
                            constraint.push(f);
                        }
                    }
                }
                let remaining = pair
                    .remaining
                    .iter()
                    .copied()
                    .filter(|j| !group.contains(j))
                    .collect();
                Pair {
                    constraint,
                    remaining,
                }
            });
            match maxcs.cmp(&maxc) {
                Ordering::Greater => {
                    next.clear();
                    for s in successors {
                        push_unique(&mut next, s);
                    }
                    maxc = maxcs;
                }
                Ordering::Equal => {
                    for s in successors {
                        push_unique(&mut next, s);
                    }
                }
                Ordering::Less => {}
            }

            traces.push(PairTrace {
                constraint: pair.formula(),
                remaining: pair.remaining.clone(),
                inc: pair_inc[k],
                candidates,
                mcs,
                cardm,
                maxcs,
            });
        }
        iterations.push(TraceIteration {
            inc,
            pairs: traces,
            maxc,
        });
        pairs = next;
    }

    let result = Formula::disjunction(pairs.iter().map(Pair::formula));
    let trace = MergeTrace {
        iterations,
        final_pairs: pairs,
        result: result.clone(),
    };
    Ok((result, trace))
}

fn push_unique(pairs: &mut Vec<Pair>, candidate: Pair) {
    if !pairs.iter().any(|p| p.same_as(&candidate)) {
        pairs.push(candidate);
    }
}

/// Does the merged base entail `psi`?
pub fn merged_entails(e: &Profile, mu: &Formula, psi: &Formula, v: &Vocabulary) -> Result<bool> {
    let (merged, _) = merge_syntactic(e, mu, v)?;
    logic::entails([&merged], psi, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::possibilistic::PossibilisticKB;

    fn p(n: &str) -> Formula {
        Formula::var(n)
    }

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    #[test]
    fn empty_profile_returns_constraint() {
        let v = Vocabulary::of(&["p", "q"]);
        let mu = Formula::or(p("p"), p("q"));
        let (f, trace) = merge_syntactic(&Profile::default(), &mu, &v).unwrap();
        assert_eq!(f, mu);
        assert!(trace.iterations.is_empty());
    }

    #[test]
    fn inconsistent_constraint_returns_false() {
        let v = Vocabulary::of(&["p"]);
        let kb = PossibilisticKB::from_pairs([(p("p"), w("0.5"))]).unwrap();
        let mu = Formula::and(p("p"), Formula::not(p("p")));
        let (f, trace) = merge_syntactic(&Profile::new(vec![kb]), &mu, &v).unwrap();
        assert_eq!(f, Formula::False);
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(trace.iterations[0].inc, Weight::ONE);
        assert_eq!(trace.iterations[0].maxc, None);
        assert!(trace.final_pairs.is_empty());
    }

    #[test]
    fn singleton_candidate_set() {
        let v = Vocabulary::of(&["p"]);
        let kb = PossibilisticKB::from_pairs([(p("p"), w("0.5"))]).unwrap();
        let e = Profile::new(vec![kb]);
        let got =
            maximal_consistent_index_sets(&[0], &[Formula::True], Weight::ZERO, &e, &v).unwrap();
        assert_eq!(got, vec![vec![0]]);
    }

    #[test]
    fn duplicate_bases_merge_together() {
        let v = Vocabulary::of(&["p"]);
        let a = PossibilisticKB::from_pairs([(p("p"), w("0.5"))]).unwrap();
        let b = PossibilisticKB::from_pairs([(Formula::not(p("p")), w("0.5"))]).unwrap();
        let e = Profile::new(vec![a.clone(), a, b]);
        let (f, trace) = merge_syntactic(&e, &Formula::True, &v).unwrap();
        assert!(logic::equivalent(&f, &p("p"), &v).unwrap());
        assert_eq!(trace.iterations[0].pairs[0].cardm, vec![vec![0, 1]]);
        assert_eq!(trace.final_pairs.len(), 1);
    }

    #[test]
    fn entailment_of_verum() {
        let v = Vocabulary::of(&["p"]);
        let kb = PossibilisticKB::from_pairs([(p("p"), w("0.5"))]).unwrap();
        assert!(
            merged_entails(&Profile::new(vec![kb]), &Formula::True, &Formula::True, &v).unwrap()
        );
    }
}
