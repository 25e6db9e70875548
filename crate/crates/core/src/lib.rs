//! Lexicographic merging of possibilistic knowledge bases.
//!
//! A profile of weighted propositional bases is merged under an integrity
//! constraint into a classical base whose models are the constraint's models
//! with lexicographically maximal vectors of possibility degrees. The merge
//! is available model-theoretically ([`semantic`]) and as a level-by-level
//! syntactic construction with a trace ([`syntactic`]).

pub mod error;
pub mod logic;
pub mod possibilistic;
pub mod postulates;
pub mod reductions;
pub mod report;
pub mod semantic;
pub mod syntactic;
pub mod syntax;

pub use error::{Error, Result};
pub use logic::{Atom, Formula, Interpretation, Vocabulary};
pub use possibilistic::{PossibilisticKB, Profile, Weight, WeightedFormula};
