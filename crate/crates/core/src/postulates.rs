//! Executable rationality postulates for the lexicographic merge.
//!
//! `P1`..`P10` are the possibilistic postulates; `IC0`..`IC8` are the
//! classical integrity-constraint postulates, checked on profiles whose
//! weights are all 1. Every check computes the merge syntactically and
//! cross-checks it against the model-theoretic merge before evaluating the
//! postulate on model sets.
//!
//! The module also holds the seeded instance generator and the audit driver
//! that runs the checks over many generated instances.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::logic::{self, Atom, Formula, Interpretation, Vocabulary};
use crate::possibilistic::{self, PossibilisticKB, Profile, Weight, WeightedFormula};
use crate::semantic::merge_semantic;
use crate::syntactic::merge_syntactic;
use crate::syntax::{render_problem, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PostulateId {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
    P9,
    P10,
    IC0,
    IC1,
    IC2,
    IC3,
    IC4,
    IC5,
    IC6,
    IC7,
    IC8,
}

impl PostulateId {
    pub const POSSIBILISTIC: [PostulateId; 10] = [
        PostulateId::P1,
        PostulateId::P2,
        PostulateId::P3,
        PostulateId::P4,
        PostulateId::P5,
        PostulateId::P6,
        PostulateId::P7,
        PostulateId::P8,
        PostulateId::P9,
        PostulateId::P10,
    ];

    pub const CLASSICAL: [PostulateId; 9] = [
        PostulateId::IC0,
        PostulateId::IC1,
        PostulateId::IC2,
        PostulateId::IC3,
        PostulateId::IC4,
        PostulateId::IC5,
        PostulateId::IC6,
        PostulateId::IC7,
        PostulateId::IC8,
    ];

    pub fn is_classical(self) -> bool {
        PostulateId::CLASSICAL.contains(&self)
    }

    pub fn all() -> impl Iterator<Item = PostulateId> {
        PostulateId::POSSIBILISTIC
            .into_iter()
            .chain(PostulateId::CLASSICAL)
    }
}

impl fmt::Display for PostulateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for PostulateId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        PostulateId::all()
            .find(|id| id.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown postulate `{s}`"))
    }
}

/// What a postulate quantifies over. Single-profile postulates ignore the
/// optional second profile and constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub vocabulary: Vocabulary,
    pub profile: Profile,
    pub constraint: Formula,
    pub other_profile: Option<Profile>,
    pub other_constraint: Option<Formula>,
}

impl Instance {
    pub fn new(vocabulary: Vocabulary, profile: Profile, constraint: Formula) -> Self {
        Instance {
            vocabulary,
            profile,
            constraint,
            other_profile: None,
            other_constraint: None,
        }
    }

    pub fn with_other_profile(mut self, e: Profile) -> Self {
        self.other_profile = Some(e);
        self
    }

    pub fn with_other_constraint(mut self, mu: Formula) -> Self {
        self.other_constraint = Some(mu);
        self
    }

    fn counterexample(&self, reason: String) -> Counterexample {
        let problem = |profile: &Profile, constraint: &Formula| {
            render_problem(&Problem {
                vocabulary: self.vocabulary.clone(),
                profile: profile.clone(),
                constraint: constraint.clone(),
            })
        };
        Counterexample {
            reason,
            problem: problem(&self.profile, &self.constraint),
            other_problem: self
                .other_profile
                .as_ref()
                .map(|e| problem(e, &self.constraint)),
            other_constraint: self.other_constraint.as_ref().map(ToString::to_string),
        }
    }
}

/// A failing instance in problem-file syntax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub reason: String,
    pub problem: String,
    pub other_problem: Option<String>,
    pub other_constraint: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail { counterexample: Box<Counterexample> },
    NotApplicable { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PostulateVerdict {
    pub id: PostulateId,
    pub instance: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl PostulateVerdict {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn failed(&self) -> bool {
        matches!(self.outcome, Outcome::Fail { .. })
    }

    pub fn applicable(&self) -> bool {
        !matches!(self.outcome, Outcome::NotApplicable { .. })
    }
}

/// `min` weight of the pairs `sub` shares with `kb`; 1 when they share none.
pub fn priority_degree(sub: &PossibilisticKB, kb: &PossibilisticKB) -> Weight {
    sub.iter()
        .filter(|wf| kb.contains(wf))
        .map(|wf| wf.weight)
        .min()
        .unwrap_or(Weight::ONE)
}

/// Subsets of `b1 ∪ b2` minimally inconsistent with `mu`.
pub fn conflict_sets(
    b1: &PossibilisticKB,
    b2: &PossibilisticKB,
    mu: &Formula,
    v: &Vocabulary,
) -> crate::Result<Vec<PossibilisticKB>> {
    let pool: Vec<WeightedFormula> = b1.union(b2).iter().cloned().collect();
    let n = pool.len();
    assert!(n < 26, "too many formulas for conflict-set search");
    let space = v.space()?;
    let constraint = logic::Theory::new([mu], v)?;
    let parts = pool
        .iter()
        .map(|wf| logic::Compiled::new(&wf.formula, v))
        .collect::<crate::Result<Vec<_>>>()?;

    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut found: Vec<u32> = Vec::new();
    for mask in masks {
        if found.iter().any(|&c| c & !mask == 0) {
            continue;
        }
        let mut t = constraint.clone();
        for (i, c) in parts.iter().enumerate() {
            if mask & (1 << i) != 0 {
                t.push(c.clone());
            }
        }
        if !t.satisfiable(space) {
            found.push(mask);
        }
    }
    Ok(found
        .into_iter()
        .map(|mask| {
            let mut kb = PossibilisticKB::new();
            for (i, wf) in pool.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    kb.push(wf.clone());
                }
            }
            kb
        })
        .collect())
}

pub fn equally_prioritized(
    b1: &PossibilisticKB,
    b2: &PossibilisticKB,
    mu: &Formula,
    v: &Vocabulary,
) -> crate::Result<bool> {
    Ok(conflict_sets(b1, b2, mu, v)?
        .iter()
        .all(|c| priority_degree(c, b1) == priority_degree(c, b2)))
}

type Models = BTreeSet<Interpretation>;

enum Halt {
    Invalid(Error),
    Disagree(String),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Invalid(e)
    }
}

fn delta(e: &Profile, mu: &Formula, v: &Vocabulary) -> Result<Models, Halt> {
    let (merged, _) = merge_syntactic(e, mu, v)?;
    let syntactic = logic::enumerate_models(&merged, v)?;
    let semantic = merge_semantic(e, mu, v)?;
    if syntactic != semantic {
        return Err(Halt::Disagree(format!(
            "syntactic merge {} disagrees with semantic merge {}",
            render_models(&syntactic),
            render_models(&semantic)
        )));
    }
    Ok(syntactic)
}

fn render_models(ms: &Models) -> String {
    let items: Vec<String> = ms.iter().map(Interpretation::bitstring).collect();
    format!("{{{}}}", items.join(", "))
}

fn models_of<'a, I>(fs: I, v: &Vocabulary) -> Result<Models, Halt>
where
    I: IntoIterator<Item = &'a Formula>,
{
    Ok(logic::models_of_set(fs, v)?)
}

fn conclude(holds: bool, what: impl FnOnce() -> String) -> Outcome {
    if holds {
        Outcome::Pass
    } else {
        Outcome::Fail {
            counterexample: Box::new(Counterexample {
                reason: what(),
                problem: String::new(),
                other_problem: None,
                other_constraint: None,
            }),
        }
    }
}

fn not_applicable(reason: &str) -> Outcome {
    Outcome::NotApplicable {
        reason: reason.to_string(),
    }
}

fn all_formulas(e: &Profile) -> BTreeSet<Formula> {
    e.iter().flat_map(PossibilisticKB::classical).collect()
}

fn is_unit_weighted(e: &Profile) -> bool {
    e.iter().all(|kb| kb.iter().all(|wf| wf.weight.is_one()))
}

/// Evaluates postulate `id` on `instance`.
pub fn check_postulate(id: PostulateId, instance: &Instance) -> PostulateVerdict {
    check_postulate_labelled(id, instance, String::new())
}

fn check_postulate_labelled(
    id: PostulateId,
    instance: &Instance,
    label: String,
) -> PostulateVerdict {
    let outcome = match evaluate(id, instance) {
        Ok(Outcome::Fail { counterexample }) => Outcome::Fail {
            counterexample: Box::new(instance.counterexample(counterexample.reason)),
        },
        Ok(outcome) => outcome,
        Err(Halt::Disagree(reason)) => Outcome::Fail {
            counterexample: Box::new(instance.counterexample(reason)),
        },
        Err(Halt::Invalid(e)) => Outcome::NotApplicable {
            reason: format!("invalid instance: {e}"),
        },
    };
    PostulateVerdict {
        id,
        instance: label,
        outcome,
    }
}

fn evaluate(id: PostulateId, inst: &Instance) -> Result<Outcome, Halt> {
    use PostulateId::*;

    let v = &inst.vocabulary;
    let e = &inst.profile;
    let mu = &inst.constraint;
    if id.is_classical() {
        let all_unit =
            is_unit_weighted(e) && inst.other_profile.as_ref().is_none_or(is_unit_weighted);
        if !all_unit {
            return Ok(not_applicable("profile has weights below 1"));
        }
    }

    Ok(match id {
        P1 | IC0 => {
            let d = delta(e, mu, v)?;
            let m = models_of([mu], v)?;
            conclude(d.is_subset(&m), || {
                "merged base does not entail the constraint".into()
            })
        }
        P2 | IC1 => {
            if models_of([mu], v)?.is_empty() {
                return Ok(not_applicable("constraint is inconsistent"));
            }
            let d = delta(e, mu, v)?;
            conclude(!d.is_empty(), || "merged base is inconsistent".into())
        }
        P3 | IC2 => {
            let mut fs = all_formulas(e);
            fs.insert(mu.clone());
            let joint = models_of(&fs, v)?;
            if joint.is_empty() {
                return Ok(not_applicable(
                    "profile is inconsistent with the constraint",
                ));
            }
            let d = delta(e, mu, v)?;
            conclude(d == joint, || {
                format!(
                    "merged base {} differs from the conjunction {}",
                    render_models(&d),
                    render_models(&joint)
                )
            })
        }
        P4 | IC3 => {
            let (Some(e2), Some(mu2)) = (&inst.other_profile, &inst.other_constraint) else {
                return Ok(not_applicable("needs a second profile and constraint"));
            };
            if !possibilistic::profile_equivalent_s(e, e2, v)? || !logic::equivalent(mu, mu2, v)? {
                return Ok(not_applicable("profiles or constraints are not equivalent"));
            }
            let d1 = delta(e, mu, v)?;
            let d2 = delta(e2, mu2, v)?;
            conclude(d1 == d2, || {
                format!(
                    "equivalent inputs merged to {} and {}",
                    render_models(&d1),
                    render_models(&d2)
                )
            })
        }
        P5 | IC5 | P6 | IC6 => {
            let Some(e2) = &inst.other_profile else {
                return Ok(not_applicable("needs a second profile"));
            };
            let d1 = delta(e, mu, v)?;
            let d2 = delta(e2, mu, v)?;
            let both: Models = d1.intersection(&d2).cloned().collect();
            let joint = delta(&e.concat(e2), mu, v)?;
            if matches!(id, P5 | IC5) {
                conclude(both.is_subset(&joint), || {
                    format!(
                        "common models {} are not all kept by the joint merge {}",
                        render_models(&both),
                        render_models(&joint)
                    )
                })
            } else if both.is_empty() {
                not_applicable("the two merges are jointly inconsistent")
            } else {
                conclude(joint.is_subset(&both), || {
                    format!(
                        "joint merge {} leaves the common models {}",
                        render_models(&joint),
                        render_models(&both)
                    )
                })
            }
        }
        P7 | IC7 | P8 | IC8 => {
            let Some(mu2) = &inst.other_constraint else {
                return Ok(not_applicable("needs a second constraint"));
            };
            let d1 = delta(e, mu, v)?;
            let m2 = models_of([mu2], v)?;
            let restricted: Models = d1.intersection(&m2).cloned().collect();
            let narrowed = delta(e, &Formula::and(mu.clone(), mu2.clone()), v)?;
            if matches!(id, P7 | IC7) {
                conclude(restricted.is_subset(&narrowed), || {
                    format!(
                        "restricted merge {} is not within the narrowed merge {}",
                        render_models(&restricted),
                        render_models(&narrowed)
                    )
                })
            } else if restricted.is_empty() {
                not_applicable("merged base is inconsistent with the second constraint")
            } else {
                conclude(narrowed.is_subset(&restricted), || {
                    format!(
                        "narrowed merge {} is not within the restricted merge {}",
                        render_models(&narrowed),
                        render_models(&restricted)
                    )
                })
            }
        }
        P9 | IC4 => {
            let [b1, b2] = e.bases() else {
                return Ok(not_applicable("needs exactly two bases"));
            };
            let k1 = b1.classical();
            let k2 = b2.classical();
            let m1 = models_of(&k1, v)?;
            let m2 = models_of(&k2, v)?;
            if m1.is_empty() || m2.is_empty() {
                return Ok(not_applicable("a base is inconsistent"));
            }
            if id == P9 {
                let a1 = possibilistic::pi_consequence(b1, mu, v)?;
                let a2 = possibilistic::pi_consequence(b2, mu, v)?;
                if a1.is_none() || a1 != a2 {
                    return Ok(not_applicable(
                        "bases do not entail the constraint to the same degree",
                    ));
                }
                if !equally_prioritized(b1, b2, mu, v)? {
                    return Ok(not_applicable("bases are not equally prioritized"));
                }
            } else if !logic::entails(&k1, mu, v)? || !logic::entails(&k2, mu, v)? {
                return Ok(not_applicable("a base does not entail the constraint"));
            }
            let d = delta(e, mu, v)?;
            let with1 = !d.is_disjoint(&m1);
            let with2 = !d.is_disjoint(&m2);
            conclude(with1 == with2, || {
                format!(
                    "merged base {} is consistent with the first base: {with1}, with the second: {with2}",
                    render_models(&d)
                )
            })
        }
        P10 => {
            let level = possibilistic::inc_profile(e, mu, v)?;
            let d = delta(e, mu, v)?;
            let mut missing = None;
            for wf in e.union_all().iter().filter(|wf| wf.weight > level) {
                let m = models_of([&wf.formula], v)?;
                if !d.is_subset(&m) {
                    missing = Some(wf.clone());
                    break;
                }
            }
            conclude(missing.is_none(), || {
                format!(
                    "merged base drops {} above the inconsistency degree {level}",
                    missing.expect("set when failing")
                )
            })
        }
    })
}

/// Knobs of the random instance generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorParams {
    pub seed: u64,
    pub atoms: usize,
    pub min_bases: usize,
    pub max_bases: usize,
    pub min_formulas: usize,
    pub max_formulas: usize,
    #[serde(serialize_with = "serialize_grid")]
    pub weight_grid: Vec<Weight>,
    /// Maximum nesting depth of generated formulas.
    pub max_depth: usize,
    /// Probability that the constraint is redrawn until satisfiable.
    pub consistency_bias: f64,
}

fn serialize_grid<S: serde::Serializer>(grid: &[Weight], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(grid.iter().map(ToString::to_string))
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            seed: 1,
            atoms: 4,
            min_bases: 1,
            max_bases: 4,
            min_formulas: 1,
            max_formulas: 3,
            weight_grid: tenths(),
            max_depth: 2,
            consistency_bias: 0.9,
        }
    }
}

/// `{1/10, 2/10, ..., 1}`.
pub fn tenths() -> Vec<Weight> {
    (1..=10)
        .map(|i| Weight::new(i, 10).expect("in range"))
        .collect()
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.atoms == 0 || self.atoms > crate::logic::DEFAULT_VARS_CAP {
            return Err(format!(
                "atom count must be in 1..={}",
                crate::logic::DEFAULT_VARS_CAP
            ));
        }
        if self.min_bases > self.max_bases {
            return Err("min_bases exceeds max_bases".into());
        }
        if self.min_formulas > self.max_formulas {
            return Err("min_formulas exceeds max_formulas".into());
        }
        if self.weight_grid.is_empty() || self.weight_grid.iter().any(|w| w.is_zero()) {
            return Err("weight grid must be a nonempty subset of (0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.consistency_bias) {
            return Err("consistency bias must be in [0, 1]".into());
        }
        Ok(())
    }

    /// Applies `key=value` overrides, comma separated. Keys: `atoms`,
    /// `bases` (`N` or `MIN..MAX`), `formulas` (likewise), `depth`, `bias`,
    /// `grid` (`tenths` or weights separated by `/`-free spaces).
    pub fn apply_overrides(&mut self, overrides: &str) -> Result<(), String> {
        fn range(value: &str) -> Result<(usize, usize), String> {
            let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("`{s}`: {e}"));
            match value.split_once("..") {
                Some((a, b)) => Ok((parse(a)?, parse(b)?)),
                None => {
                    let n = parse(value)?;
                    Ok((n, n))
                }
            }
        }
        for item in overrides
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            match key.trim() {
                "atoms" => self.atoms = value.parse().map_err(|e| format!("atoms: {e}"))?,
                "bases" => (self.min_bases, self.max_bases) = range(value)?,
                "formulas" => (self.min_formulas, self.max_formulas) = range(value)?,
                "depth" => self.max_depth = value.parse().map_err(|e| format!("depth: {e}"))?,
                "bias" => {
                    self.consistency_bias = value.parse().map_err(|e| format!("bias: {e}"))?
                }
                "grid" if value == "tenths" => self.weight_grid = tenths(),
                "grid" => {
                    self.weight_grid = value
                        .split_whitespace()
                        .map(|w| w.parse::<Weight>().map_err(|e| e.to_string()))
                        .collect::<Result<_, _>>()?
                }
                other => return Err(format!("unknown generator parameter `{other}`")),
            }
        }
        self.validate()
    }

    pub fn vocabulary(&self) -> Vocabulary {
        let names: Vec<Atom> = (1..=self.atoms)
            .map(|i| Atom::new(&format!("p{i}")).expect("valid name"))
            .collect();
        Vocabulary::declared(names).expect("distinct names")
    }
}

struct Gen<'p> {
    rng: ChaCha8Rng,
    params: &'p GeneratorParams,
    vocabulary: Vocabulary,
}

impl<'p> Gen<'p> {
    fn new(params: &'p GeneratorParams, seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            params,
            vocabulary: params.vocabulary(),
        }
    }

    fn literal(&mut self) -> Formula {
        let atom = self
            .vocabulary
            .atoms()
            .choose(&mut self.rng)
            .expect("nonempty vocabulary")
            .clone();
        if self.rng.gen_bool(0.5) {
            Formula::Atom(atom)
        } else {
            Formula::not(Formula::Atom(atom))
        }
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return self.literal();
        }
        match self.rng.gen_range(0..10) {
            0..=3 => Formula::and(self.formula(depth - 1), self.formula(depth - 1)),
            4..=6 => Formula::or(self.formula(depth - 1), self.formula(depth - 1)),
            7 => Formula::implies(self.formula(depth - 1), self.formula(depth - 1)),
            8 => Formula::iff(self.formula(depth - 1), self.formula(depth - 1)),
            _ => Formula::not(self.formula(depth - 1)),
        }
    }

    fn weight(&mut self, grid: &[Weight]) -> Weight {
        *grid.choose(&mut self.rng).expect("nonempty grid")
    }

    fn consistent(&self, fs: &[Formula]) -> bool {
        logic::is_consistent(fs, &self.vocabulary).expect("generated atoms are in the vocabulary")
    }

    /// A set of formulas whose conjunction is satisfiable.
    fn consistent_formulas(&mut self, count: usize) -> Vec<Formula> {
        let mut out: Vec<Formula> = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 20 * count.max(1) {
            attempts += 1;
            let f = self.formula(self.params.max_depth);
            out.push(f);
            if !self.consistent(&out) {
                out.pop();
            }
        }
        out
    }

    fn formula_count(&mut self) -> usize {
        self.rng
            .gen_range(self.params.min_formulas..=self.params.max_formulas)
    }

    fn base_with_grid(&mut self, grid: &[Weight]) -> PossibilisticKB {
        let count = self.formula_count();
        let formulas = self.consistent_formulas(count);
        let mut kb = PossibilisticKB::new();
        for f in formulas {
            let w = self.weight(grid);
            kb.push(WeightedFormula {
                formula: f,
                weight: w,
            });
        }
        kb
    }

    fn base(&mut self) -> PossibilisticKB {
        let grid = self.params.weight_grid.clone();
        self.base_with_grid(&grid)
    }

    fn profile(&mut self) -> Profile {
        let n = self
            .rng
            .gen_range(self.params.min_bases..=self.params.max_bases);
        (0..n).map(|_| self.base()).collect()
    }

    fn constraint(&mut self) -> Formula {
        let force = self.rng.gen_bool(self.params.consistency_bias);
        for _ in 0..50 {
            let f = self.formula(self.params.max_depth);
            if !force || self.consistent(std::slice::from_ref(&f)) {
                return f;
            }
        }
        Formula::True
    }

    fn classical_profile(&mut self) -> Profile {
        let n = self
            .rng
            .gen_range(self.params.min_bases..=self.params.max_bases);
        (0..n).map(|_| self.classical_base()).collect()
    }

    /// One formula at weight 1: the conjunction of a consistent formula set.
    fn classical_base(&mut self) -> PossibilisticKB {
        let count = self.formula_count().max(1);
        let fs = self.consistent_formulas(count);
        let mut kb = PossibilisticKB::new();
        kb.push(WeightedFormula {
            formula: Formula::conjunction(fs),
            weight: Weight::ONE,
        });
        kb
    }

    fn rewrite(&mut self, f: &Formula) -> Formula {
        use Formula::*;
        let r = match f {
            True | False | Atom(_) => f.clone(),
            Not(g) => Formula::not(self.rewrite(g)),
            And(a, b) => {
                let (a, b) = (self.rewrite(a), self.rewrite(b));
                match self.rng.gen_range(0..3) {
                    0 => Formula::and(b, a),
                    1 => Formula::not(Formula::or(Formula::not(a), Formula::not(b))),
                    _ => Formula::and(a, b),
                }
            }
            Or(a, b) => {
                let (a, b) = (self.rewrite(a), self.rewrite(b));
                match self.rng.gen_range(0..3) {
                    0 => Formula::or(b, a),
                    1 => Formula::implies(Formula::not(a), b),
                    _ => Formula::or(a, b),
                }
            }
            Implies(a, b) => {
                let (a, b) = (self.rewrite(a), self.rewrite(b));
                if self.rng.gen_bool(0.5) {
                    Formula::or(Formula::not(a), b)
                } else {
                    Formula::implies(Formula::not(b), Formula::not(a))
                }
            }
            Iff(a, b) => {
                let (a, b) = (self.rewrite(a), self.rewrite(b));
                if self.rng.gen_bool(0.5) {
                    Formula::iff(b, a)
                } else {
                    Formula::and(
                        Formula::implies(a.clone(), b.clone()),
                        Formula::implies(b, a),
                    )
                }
            }
        };
        if self.rng.gen_bool(0.15) {
            Formula::not(Formula::not(r))
        } else {
            r
        }
    }

    /// A cut-wise equivalent copy of `kb`: formulas rewritten, top-level
    /// conjunctions sometimes split, and optionally redundant lower-weight
    /// copies of existing formulas.
    fn rewrite_base(&mut self, kb: &PossibilisticKB, lower_copies: bool) -> PossibilisticKB {
        let mut out = PossibilisticKB::new();
        for wf in kb {
            match &wf.formula {
                Formula::And(a, b) if self.rng.gen_bool(0.5) => {
                    for part in [a, b] {
                        let formula = self.rewrite(part);
                        out.push(WeightedFormula {
                            formula,
                            weight: wf.weight,
                        });
                    }
                }
                f => {
                    let formula = self.rewrite(f);
                    out.push(WeightedFormula {
                        formula,
                        weight: wf.weight,
                    });
                }
            }
            let lower: Vec<Weight> = self
                .params
                .weight_grid
                .iter()
                .copied()
                .filter(|w| *w < wf.weight)
                .collect();
            if lower_copies && !lower.is_empty() && self.rng.gen_bool(0.2) {
                let weight = self.weight(&lower);
                out.push(WeightedFormula {
                    formula: wf.formula.clone(),
                    weight,
                });
            }
        }
        out
    }

    fn rewrite_profile(&mut self, e: &Profile, lower_copies: bool) -> Profile {
        let mut bases: Vec<PossibilisticKB> = e
            .iter()
            .map(|kb| self.rewrite_base(kb, lower_copies))
            .collect();
        bases.shuffle(&mut self.rng);
        Profile::new(bases)
    }
}

/// A random profile and constraint, reproducible from `params`.
pub fn generate_instance(params: &GeneratorParams) -> (Profile, Formula, Vocabulary) {
    let mut g = Gen::new(params, params.seed);
    let profile = g.profile();
    let constraint = g.constraint();
    (profile, constraint, g.vocabulary)
}

/// A random classical profile (one weight-1 formula per base) and constraint.
pub fn generate_classical_instance(params: &GeneratorParams) -> (Profile, Formula, Vocabulary) {
    let mut g = Gen::new(params, params.seed);
    let profile = g.classical_profile();
    let constraint = g.constraint();
    (profile, constraint, g.vocabulary)
}

const RETRIES: usize = 25;

fn merged(e: &Profile, mu: &Formula, v: &Vocabulary) -> Models {
    merge_semantic(e, mu, v).expect("generated instances are well formed")
}

/// Builds an instance tailored to postulate `id`. For postulates with an
/// antecedent the generator retries a bounded number of times to make it
/// hold; the last attempt is returned either way.
pub fn build_instance(id: PostulateId, params: &GeneratorParams, seed: u64) -> Instance {
    use PostulateId::*;

    let mut g = Gen::new(params, seed);
    let v = g.vocabulary.clone();
    let classical = id.is_classical();
    let draw_profile = |g: &mut Gen| {
        if classical {
            g.classical_profile()
        } else {
            g.profile()
        }
    };

    match id {
        P1 | P2 | P3 | P10 | IC0 | IC1 | IC2 => {
            let e = draw_profile(&mut g);
            let mu = g.constraint();
            Instance::new(v, e, mu)
        }
        P4 | IC3 => {
            let e = draw_profile(&mut g);
            let mu = g.constraint();
            let e2 = g.rewrite_profile(&e, !classical);
            let mu2 = g.rewrite(&mu);
            Instance::new(v, e, mu)
                .with_other_profile(e2)
                .with_other_constraint(mu2)
        }
        P5 | IC5 => {
            let e = draw_profile(&mut g);
            let mu = g.constraint();
            let e2 = draw_profile(&mut g);
            Instance::new(v, e, mu).with_other_profile(e2)
        }
        P6 | IC6 => {
            let e = draw_profile(&mut g);
            let mu = g.constraint();
            let d1 = merged(&e, &mu, &v);
            let mut e2 = draw_profile(&mut g);
            for attempt in 0..RETRIES {
                if !d1.is_disjoint(&merged(&e2, &mu, &v)) {
                    break;
                }
                e2 = if attempt % 2 == 0 {
                    // Reuse some of the first profile's bases.
                    let mut bases: Vec<PossibilisticKB> =
                        e.iter().filter(|_| g.rng.gen_bool(0.5)).cloned().collect();
                    bases.extend(draw_profile(&mut g).iter().take(1).cloned());
                    Profile::new(bases)
                } else {
                    draw_profile(&mut g)
                };
            }
            Instance::new(v, e, mu).with_other_profile(e2)
        }
        P7 | IC7 => {
            let e = draw_profile(&mut g);
            let mu = g.constraint();
            let mu2 = g.formula(params.max_depth);
            Instance::new(v, e, mu).with_other_constraint(mu2)
        }
        P8 | IC8 => {
            let e = draw_profile(&mut g);
            let mu = g.constraint();
            let d = merged(&e, &mu, &v);
            let mut mu2 = g.formula(params.max_depth);
            for _ in 0..RETRIES {
                let m2 = logic::enumerate_models(&mu2, &v).expect("well formed");
                if !d.is_disjoint(&m2) {
                    break;
                }
                mu2 = g.formula(params.max_depth);
            }
            Instance::new(v, e, mu).with_other_constraint(mu2)
        }
        P9 => {
            let mut last = None;
            for _ in 0..RETRIES {
                let inst = p9_candidate(&mut g);
                let ok = matches!(
                    evaluate(P9, &inst),
                    Ok(Outcome::Pass) | Ok(Outcome::Fail { .. }) | Err(Halt::Disagree(_))
                );
                last = Some(inst);
                if ok {
                    break;
                }
            }
            last.expect("at least one attempt")
        }
        IC4 => {
            let mu = g.constraint();
            let mut last = None;
            for _ in 0..RETRIES {
                let mut bases = Vec::new();
                for _ in 0..2 {
                    let count = g.formula_count().max(1);
                    let mut fs = g.consistent_formulas(count);
                    fs.push(mu.clone());
                    let mut kb = PossibilisticKB::new();
                    kb.push(WeightedFormula {
                        formula: Formula::conjunction(fs),
                        weight: Weight::ONE,
                    });
                    bases.push(kb);
                }
                let e = Profile::new(bases);
                let ok = e
                    .iter()
                    .all(|kb| g.consistent(&kb.classical().into_iter().collect::<Vec<_>>()));
                last = Some(Instance::new(v.clone(), e, mu.clone()));
                if ok {
                    break;
                }
            }
            last.expect("at least one attempt")
        }
    }
}

/// Two bases that both entail a constraint to the same degree. Weights come
/// from a narrowed grid so equal prioritization is common.
fn p9_candidate(g: &mut Gen) -> Instance {
    let v = g.vocabulary.clone();
    let mut grid = g.params.weight_grid.clone();
    grid.shuffle(&mut g.rng);
    grid.truncate(g.rng.gen_range(1..=2));
    let mu = g.constraint();
    let a = g.weight(&grid);
    let bases = (0..2)
        .map(|_| {
            let mut kb = g.base_with_grid(&grid);
            kb.push(WeightedFormula {
                formula: mu.clone(),
                weight: a,
            });
            kb
        })
        .collect();
    Instance::new(v, Profile::new(bases), mu)
}

/// Configuration of a postulate audit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditConfig {
    pub seed: u64,
    pub trials: usize,
    pub ids: Vec<PostulateId>,
    pub params: GeneratorParams,
}

impl AuditConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        AuditConfig {
            seed,
            trials,
            ids: PostulateId::all().collect(),
            params: GeneratorParams::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PostulateSummary {
    pub id: Option<PostulateId>,
    pub passed: usize,
    pub failed: usize,
    pub not_applicable: usize,
}

impl PostulateSummary {
    pub fn applicable(&self) -> usize {
        self.passed + self.failed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub config: AuditConfig,
    pub summary: Vec<PostulateSummary>,
    pub failures: Vec<PostulateVerdict>,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary_for(&self, id: PostulateId) -> Option<&PostulateSummary> {
        self.summary.iter().find(|s| s.id == Some(id))
    }
}

/// Seed of trial `trial` for postulate `id`, derived from the audit seed.
pub fn trial_seed(seed: u64, trial: usize, id: PostulateId) -> u64 {
    // splitmix64 finalizer over the packed inputs
    let mut z = seed
        .wrapping_add((trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((id as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs every configured postulate on `trials` generated instances. Trials
/// are split across threads; the report does not depend on the split.
pub fn run_audit(config: &AuditConfig) -> AuditReport {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(8);
    let trials: Vec<usize> = (0..config.trials).collect();
    let chunk = trials.len().div_ceil(workers).max(1);

    let mut verdicts: Vec<(usize, PostulateVerdict)> = std::thread::scope(|s| {
        let handles: Vec<_> = trials
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    let mut out = Vec::new();
                    for &t in part {
                        for &id in &config.ids {
                            let seed = trial_seed(config.seed, t, id);
                            let inst = build_instance(id, &config.params, seed);
                            let label = format!("seed {} trial {t}", config.seed);
                            out.push((t, check_postulate_labelled(id, &inst, label)));
                        }
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("audit worker panicked"))
            .collect()
    });
    verdicts.sort_by_key(|(t, v)| (*t, v.id));

    let mut summary: Vec<PostulateSummary> = config
        .ids
        .iter()
        .map(|&id| PostulateSummary {
            id: Some(id),
            ..Default::default()
        })
        .collect();
    let mut failures = Vec::new();
    for (_, verdict) in verdicts {
        let entry = summary
            .iter_mut()
            .find(|s| s.id == Some(verdict.id))
            .expect("configured id");
        match verdict.outcome {
            Outcome::Pass => entry.passed += 1,
            Outcome::Fail { .. } => {
                entry.failed += 1;
                failures.push(verdict);
            }
            Outcome::NotApplicable { .. } => entry.not_applicable += 1,
        }
    }
    AuditReport {
        config: config.clone(),
        summary,
        failures,
    }
}
