use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// The nine pairwise spatial relations, in wire order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    LeftOf,
    RightOf,
    InFrontOf,
    Behind,
    Above,
    Below,
    Near,
    Touching,
    Centered,
}

impl Predicate {
    pub const COUNT: usize = 9;

    pub const ALL: [Predicate; Self::COUNT] = [
        Predicate::LeftOf,
        Predicate::RightOf,
        Predicate::InFrontOf,
        Predicate::Behind,
        Predicate::Above,
        Predicate::Below,
        Predicate::Near,
        Predicate::Touching,
        Predicate::Centered,
    ];

    pub const DIRECTIONAL: [Predicate; 6] = [
        Predicate::LeftOf,
        Predicate::RightOf,
        Predicate::InFrontOf,
        Predicate::Behind,
        Predicate::Above,
        Predicate::Below,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Predicate::LeftOf => "left_of",
            Predicate::RightOf => "right_of",
            Predicate::InFrontOf => "in_front_of",
            Predicate::Behind => "behind",
            Predicate::Above => "above",
            Predicate::Below => "below",
            Predicate::Near => "near",
            Predicate::Touching => "touching",
            Predicate::Centered => "centered",
        }
    }

    pub fn is_directional(self) -> bool {
        self.index() < 6
    }

    /// The directional relation that excludes this one for the same ordered pair.
    pub fn opposite(self) -> Option<Predicate> {
        match self {
            Predicate::LeftOf => Some(Predicate::RightOf),
            Predicate::RightOf => Some(Predicate::LeftOf),
            Predicate::InFrontOf => Some(Predicate::Behind),
            Predicate::Behind => Some(Predicate::InFrontOf),
            Predicate::Above => Some(Predicate::Below),
            Predicate::Below => Some(Predicate::Above),
            _ => None,
        }
    }

    fn is_horizontal(self) -> bool {
        self.index() < 4
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Predicate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Predicate::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPredicate(s.to_string()))
    }
}

/// Truth values for the nine relations. The rule engine emits only 0 or 1;
/// learned classifiers may emit probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredicateVector<T> {
    pub values: [T; Predicate::COUNT],
}

impl<T: Real> PredicateVector<T> {
    pub fn zeros() -> Self {
        Self { values: [T::zero(); Predicate::COUNT] }
    }

    pub fn from_bools(b: [bool; Predicate::COUNT]) -> Self {
        Self { values: b.map(|v| if v { T::one() } else { T::zero() }) }
    }

    pub fn get(&self, p: Predicate) -> T {
        self.values[p.index()]
    }

    pub fn set(&mut self, p: Predicate, v: bool) {
        self.values[p.index()] = if v { T::one() } else { T::zero() };
    }

    /// True when the value exceeds one half.
    pub fn holds(&self, p: Predicate) -> bool {
        self.get(p) > T::of(0.5)
    }
}

/// The relations a placement must satisfy, each with target value true.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredicateGoal {
    required: Vec<Predicate>,
}

impl PredicateGoal {
    /// Validates that the goal is non-empty and free of contradictions.
    pub fn new(required: impl IntoIterator<Item = Predicate>) -> Result<Self> {
        let mut required: Vec<Predicate> = required.into_iter().collect();
        required.sort();
        required.dedup();
        if required.is_empty() {
            return Err(Error::EmptyGoal);
        }
        let goal = Self { required };
        goal.check_satisfiable()?;
        Ok(goal)
    }

    pub fn single(p: Predicate) -> Self {
        Self { required: vec![p] }
    }

    pub fn required(&self) -> &[Predicate] {
        &self.required
    }

    pub fn contains(&self, p: Predicate) -> bool {
        self.required.binary_search(&p).is_ok()
    }

    pub fn directional(&self) -> impl Iterator<Item = Predicate> + '_ {
        self.required.iter().copied().filter(|p| p.is_directional())
    }

    fn check_satisfiable(&self) -> Result<()> {
        for p in &self.required {
            if let Some(o) = p.opposite() {
                if self.contains(o) {
                    return Err(Error::UnsatisfiableGoal(format!("{p} and {o} are mutually exclusive")));
                }
            }
            // Beside the anchor means the centroid clears the anchor box
            // horizontally, which rules out sharing its xy center.
            if p.is_horizontal() && self.contains(Predicate::Centered) {
                return Err(Error::UnsatisfiableGoal(format!("{p} and centered are mutually exclusive")));
            }
        }
        Ok(())
    }

    /// Goal as the dense target vector (1 for required indices, 0 elsewhere).
    pub fn target<T: Real>(&self) -> PredicateVector<T> {
        let mut v = PredicateVector::zeros();
        for p in &self.required {
            v.set(*p, true);
        }
        v
    }
}

impl FromStr for PredicateGoal {
    type Err = Error;
    /// Comma-separated predicate names, e.g. `"left_of,near"`.
    fn from_str(s: &str) -> Result<Self> {
        let preds = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(Predicate::from_str)
            .collect::<Result<Vec<_>>>()?;
        Self::new(preds)
    }
}

impl fmt::Display for PredicateGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.required.iter().map(|p| p.name()).collect();
        f.write_str(&names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_order_and_names() {
        let names: Vec<&str> = Predicate::ALL.iter().map(|p| p.name()).collect();
        assert_eq!(
            names,
            ["left_of", "right_of", "in_front_of", "behind", "above", "below", "near", "touching", "centered"]
        );
        for (i, p) in Predicate::ALL.iter().enumerate() {
            assert_eq!(p.index(), i);
            assert_eq!(p.name().parse::<Predicate>().unwrap(), *p);
        }
        assert!("sideways".parse::<Predicate>().is_err());
    }

    #[test]
    fn goal_parsing() {
        let g: PredicateGoal = "near, left_of".parse().unwrap();
        assert_eq!(g.required(), &[Predicate::LeftOf, Predicate::Near]);
        assert_eq!(g.to_string(), "left_of,near");
        assert_eq!("".parse::<PredicateGoal>(), Err(Error::EmptyGoal));
        assert!(matches!("left_of,right_of".parse::<PredicateGoal>(), Err(Error::UnsatisfiableGoal(_))));
        assert!(matches!("above,below".parse::<PredicateGoal>(), Err(Error::UnsatisfiableGoal(_))));
        assert!(matches!("behind,centered".parse::<PredicateGoal>(), Err(Error::UnsatisfiableGoal(_))));
        assert!("above,centered,touching".parse::<PredicateGoal>().is_ok());
    }

    #[test]
    fn target_vector() {
        let g: PredicateGoal = "right_of,touching".parse().unwrap();
        let t: PredicateVector<f64> = g.target();
        assert_eq!(t.values, [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    }
}
