//! The seven-grade likeliness scale.
//!
//! Grades run from 0 (impossible) to 6 (necessary) and form a bounded
//! distributive lattice under `max`/`min`, which is used as the (⊕, ⊗) pair of
//! a tropical semiring. The involution `x ↦ 6 − x` pairs likely with unlikely,
//! typical with conceivable and necessary with impossible.
//!
//! Probabilities are mapped onto the scale through six cut points spaced on
//! the log-odds (decibel) axis: starting from a base odds threshold `B` dB,
//! each inner cut divides the magnitude by √10, giving cuts at
//! `B, B/√10, B/10, −B/10, −B/√10, −B`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScaleError {
    #[error("likeliness grade {0} is outside 0..=6")]
    GradeOutOfRange(i64),
    #[error("conjunction of an empty sequence is not defined")]
    EmptyConjunction,
    #[error("base probability {0} must lie strictly between 0 and 0.5")]
    InvalidBase(f64),
    #[error("probability {0} must lie within [0, 1]")]
    InvalidProbability(f64),
    #[error("aggregation capacity is defined from grades 1, 2 or 3, not {0}")]
    InvalidCapacityGrade(u8),
    #[error("unknown grade name `{0}`")]
    UnknownName(String),
}

/// A grade on the 0..=6 likeliness scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Likeliness(u8);

const NAMES: [&str; 7] = [
    "impossible",
    "conceivable",
    "unlikely",
    "neutral",
    "likely",
    "typical",
    "necessary",
];

impl Likeliness {
    pub const IMPOSSIBLE: Likeliness = Likeliness(0);
    pub const CONCEIVABLE: Likeliness = Likeliness(1);
    pub const UNLIKELY: Likeliness = Likeliness(2);
    pub const NEUTRAL: Likeliness = Likeliness(3);
    pub const LIKELY: Likeliness = Likeliness(4);
    pub const TYPICAL: Likeliness = Likeliness(5);
    pub const NECESSARY: Likeliness = Likeliness(6);

    /// All seven grades in ascending order.
    pub const ALL: [Likeliness; 7] = [
        Self::IMPOSSIBLE,
        Self::CONCEIVABLE,
        Self::UNLIKELY,
        Self::NEUTRAL,
        Self::LIKELY,
        Self::TYPICAL,
        Self::NECESSARY,
    ];

    pub fn new(grade: i64) -> Result<Self, ScaleError> {
        if (0..=6).contains(&grade) {
            Ok(Likeliness(grade as u8))
        } else {
            Err(ScaleError::GradeOutOfRange(grade))
        }
    }

    pub fn grade(self) -> u8 {
        self.0
    }

    pub fn name(self) -> &'static str {
        NAMES[self.0 as usize]
    }

    pub fn from_name(name: &str) -> Result<Self, ScaleError> {
        NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| Likeliness(i as u8))
            .ok_or_else(|| ScaleError::UnknownName(name.to_string()))
    }

    /// The dual grade `6 − x`.
    pub fn dual(self) -> Self {
        Likeliness(6 - self.0)
    }

    /// `"n (name)"`, the human-readable rendering used by the CLI.
    pub fn describe(self) -> String {
        format!("{} ({})", self.0, self.name())
    }
}

impl fmt::Display for Likeliness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<i64> for Likeliness {
    type Error = ScaleError;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Likeliness::new(value)
    }
}

impl From<Likeliness> for u8 {
    fn from(l: Likeliness) -> u8 {
        l.0
    }
}

pub fn dual(x: Likeliness) -> Likeliness {
    x.dual()
}

/// Semiring addition: the maximum, with 0 for the empty sequence.
pub fn combine_or<I>(xs: I) -> Likeliness
where
    I: IntoIterator<Item = Likeliness>,
{
    xs.into_iter().max().unwrap_or(Likeliness::IMPOSSIBLE)
}

/// Semiring multiplication: the minimum. An empty sequence is rejected rather
/// than silently evaluating to necessity.
pub fn combine_and<I>(xs: I) -> Result<Likeliness, ScaleError>
where
    I: IntoIterator<Item = Likeliness>,
{
    xs.into_iter().min().ok_or(ScaleError::EmptyConjunction)
}

/// Total likeliness over a set of causes: `⊕_i l(B_i) ⊗ l(B_i → A)`.
pub fn total_likeliness(causes: &[(Likeliness, Likeliness)]) -> Likeliness {
    combine_or(causes.iter().map(|&(cause, implication)| cause.min(implication)))
}

/// Decibel log-odds, `10·log10(p / (1 − p))`.
pub fn log_odds_db(p: f64) -> f64 {
    10.0 * (p / (1.0 - p)).log10()
}

fn probability_from_db(db: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf(-db / 10.0))
}

/// The six probability cut points separating the seven grades.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySet {
    base_odds_db: f64,
    cuts: [f64; 6],
}

/// How many grade-k events it takes to reach the next grade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapacityRule {
    /// `n · c_k ≥ c_{k+1}`: the union bound, treating small probabilities as additive.
    #[default]
    Additive,
    /// `1 − (1 − c_k)^n ≥ c_{k+1}`: the union of `n` independent events.
    Independent,
}

impl BoundarySet {
    pub fn new(base_probability: f64) -> Result<Self, ScaleError> {
        if !(base_probability > 0.0 && base_probability < 0.5) {
            return Err(ScaleError::InvalidBase(base_probability));
        }
        let b = log_odds_db(base_probability);
        let c2 = probability_from_db(b / 10f64.sqrt());
        let c3 = probability_from_db(b / 10.0);
        // Upper half mirrors the lower half exactly.
        let cuts = [
            base_probability,
            c2,
            c3,
            1.0 - c3,
            1.0 - c2,
            1.0 - base_probability,
        ];
        Ok(BoundarySet {
            base_odds_db: b,
            cuts,
        })
    }

    pub fn base_odds_db(&self) -> f64 {
        self.base_odds_db
    }

    /// Cuts `c1..c6` in ascending order.
    pub fn cuts(&self) -> &[f64; 6] {
        &self.cuts
    }

    /// The lower cut of `grade`, i.e. `c_grade`; grade 0 has none.
    pub fn lower_cut(&self, grade: Likeliness) -> Option<f64> {
        match grade.grade() {
            0 => None,
            k => Some(self.cuts[k as usize - 1]),
        }
    }

    /// Intervals are closed below: grade 0 on `[0, c1)`, grade k on
    /// `[c_k, c_{k+1})`, grade 6 on `[c6, 1]`.
    pub fn grade_of(&self, p: f64) -> Result<Likeliness, ScaleError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ScaleError::InvalidProbability(p));
        }
        let k = self.cuts.iter().filter(|&&c| p >= c).count();
        Ok(Likeliness(k as u8))
    }

    /// Smallest `n` such that `n` events at the lower cut of `from_grade`
    /// reach the lower cut of the next grade.
    pub fn capacity(&self, from_grade: Likeliness, rule: CapacityRule) -> Result<u64, ScaleError> {
        let k = from_grade.grade();
        if !(1..=3).contains(&k) {
            return Err(ScaleError::InvalidCapacityGrade(k));
        }
        let lo = self.cuts[k as usize - 1];
        let hi = self.cuts[k as usize];
        let reaches = |n: u64| match rule {
            CapacityRule::Additive => n as f64 * lo >= hi,
            CapacityRule::Independent => -(n as f64 * (-lo).ln_1p()).exp_m1() >= hi,
        };
        let estimate = match rule {
            CapacityRule::Additive => hi / lo,
            CapacityRule::Independent => (-hi).ln_1p() / (-lo).ln_1p(),
        };
        let mut n = estimate.ceil().max(1.0) as u64;
        while n > 1 && reaches(n - 1) {
            n -= 1;
        }
        while !reaches(n) {
            n += 1;
        }
        Ok(n)
    }
}

pub fn boundaries(base_probability: f64) -> Result<BoundarySet, ScaleError> {
    BoundarySet::new(base_probability)
}

pub fn likeliness_from_probability(p: f64, bounds: &BoundarySet) -> Result<Likeliness, ScaleError> {
    bounds.grade_of(p)
}

pub fn aggregation_capacity(bounds: &BoundarySet, from_grade: Likeliness) -> Result<u64, ScaleError> {
    bounds.capacity(from_grade, CapacityRule::Additive)
}

/// The proverbial one-in-a-billion threshold.
pub const DEFAULT_BASE_PROBABILITY: f64 = 1e-9;
