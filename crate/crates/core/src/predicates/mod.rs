//! Rule-based spatial relation classifier.

pub mod directional;
mod evaluate;
mod predicate;

pub use directional::{eval_directional, BoxedObject, DirectionalConfig, Directions};
pub use evaluate::{classify, eval_centered, eval_near, eval_touching, satisfies, PredicateConfig, PreparedAnchor};
pub use predicate::{Predicate, PredicateGoal, PredicateVector};
