//! Exhaustive checks of the structural statements behind the classification,
//! plus a resumable enumerator of adjacency preservers between tiny spaces.

mod enumerate;
mod indexed;
mod lemmas;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldDescriptor};
use crate::maps::Shape;

pub use enumerate::{
    classify_stream, classify_stream_parallel, enumerate_preservers, Checkpoint, EnumerationTask,
    PreserverSearch, StreamOptions, StreamOutcome, StreamSummary, CHECKPOINT_EVERY,
    MAX_ENUMERATION_SPACE,
};
pub use indexed::{IndexedSpace, MAX_INDEXED};
pub use lemmas::brute_force_endomorphisms;

/// Default cap on the number of instances a single report may check.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LemmaId {
    SubadjacentIdempotents,
    EqualRankAdjacent,
    Coadjacency,
    PencilIntersections,
    IdempotentInMeet,
    AdjacentMeet,
    AffineLines,
    RankAdditivity,
    LargeAdjacentSet,
    PencilAdjacencyCounts,
    Endomorphisms,
}

impl LemmaId {
    pub const ALL: [LemmaId; 11] = [
        LemmaId::SubadjacentIdempotents,
        LemmaId::EqualRankAdjacent,
        LemmaId::Coadjacency,
        LemmaId::PencilIntersections,
        LemmaId::IdempotentInMeet,
        LemmaId::AdjacentMeet,
        LemmaId::AffineLines,
        LemmaId::RankAdditivity,
        LemmaId::LargeAdjacentSet,
        LemmaId::PencilAdjacencyCounts,
        LemmaId::Endomorphisms,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::SubadjacentIdempotents => "3.1",
            LemmaId::EqualRankAdjacent => "3.2",
            LemmaId::Coadjacency => "3.3",
            LemmaId::PencilIntersections => "3.4",
            LemmaId::IdempotentInMeet => "3.5",
            LemmaId::AdjacentMeet => "3.6",
            LemmaId::AffineLines => "3.7",
            LemmaId::RankAdditivity => "rank-additivity",
            LemmaId::LargeAdjacentSet => "4.1",
            LemmaId::PencilAdjacencyCounts => "4.2",
            LemmaId::Endomorphisms => "eas",
        }
    }

    /// Statements that only make sense for square 2×2 matrices.
    fn square_two_only(self) -> bool {
        matches!(
            self,
            LemmaId::IdempotentInMeet | LemmaId::AdjacentMeet | LemmaId::AffineLines
        )
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownLemma(s.to_string()))
    }
}

impl Serialize for LemmaId {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LemmaId {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The parameter grid a report sweeps: one field and a list of shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaGrid {
    pub field: Field,
    pub shapes: Vec<Shape>,
}

impl LemmaGrid {
    pub fn new(field: &Field, shapes: Vec<Shape>) -> Self {
        LemmaGrid {
            field: field.clone(),
            shapes,
        }
    }

    /// The grid each statement is checked on by default. Binary fields get
    /// larger shapes since their spaces stay small.
    pub fn default_for(id: LemmaId, field: &Field) -> Self {
        let binary = field.order() == 2;
        let ternary = field.order() == 3;
        let mut shapes = vec![(2, 2)];
        match id {
            LemmaId::SubadjacentIdempotents if binary => shapes.extend([(2, 3), (3, 3)]),
            LemmaId::EqualRankAdjacent if binary => shapes.extend([(2, 3), (3, 3)]),
            LemmaId::Coadjacency | LemmaId::LargeAdjacentSet if binary => shapes.push((3, 3)),
            LemmaId::PencilIntersections | LemmaId::RankAdditivity => shapes.push((2, 3)),
            LemmaId::PencilAdjacencyCounts if binary => shapes.extend([(2, 3), (3, 3)]),
            LemmaId::PencilAdjacencyCounts if ternary => shapes.push((2, 3)),
            LemmaId::Endomorphisms => shapes.clear(),
            _ => {}
        }
        LemmaGrid::new(field, shapes)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub field: FieldDescriptor,
    pub shapes: Vec<[usize; 2]>,
    pub instances: u64,
    pub violations: Vec<String>,
    pub complete: bool,
    pub wall_time_ms: u64,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.complete && self.violations.is_empty()
    }
}

/// Instance counter and violation log shared by the sweeps.
#[derive(Debug)]
pub struct Tally {
    budget: u64,
    instances: u64,
    violations: Vec<String>,
    exhausted: bool,
}

impl Tally {
    pub fn new(budget: u64) -> Self {
        Tally {
            budget,
            instances: 0,
            violations: Vec::new(),
            exhausted: false,
        }
    }

    /// Counts one instance. Returns false once the budget is spent, after
    /// which the sweep should stop.
    pub fn tick(&mut self) -> bool {
        if self.instances >= self.budget {
            self.exhausted = true;
            return false;
        }
        self.instances += 1;
        true
    }

    pub fn violation(&mut self, what: String) {
        self.violations.push(what);
    }

    pub fn instances(&self) -> u64 {
        self.instances
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }
}

pub fn verify_lemma(id: LemmaId, grid: &LemmaGrid) -> Result<LemmaReport> {
    verify_lemma_with_budget(id, grid, DEFAULT_BUDGET)
}

/// Runs one statement over its grid. Running out of budget is not an error:
/// the report comes back with `complete` unset.
pub fn verify_lemma_with_budget(id: LemmaId, grid: &LemmaGrid, budget: u64) -> Result<LemmaReport> {
    let start = Instant::now();
    let field = &grid.field;
    let mut tally = Tally::new(budget);
    if id == LemmaId::Endomorphisms {
        lemmas::endomorphisms(field, &mut tally)?;
    }
    for &(m, n) in &grid.shapes {
        if m == 0 || n == 0 {
            return Err(Error::EmptyShape(m, n));
        }
        if id.square_two_only() && (m, n) != (2, 2) {
            return Err(Error::InvalidField(format!(
                "{id} is stated for 2x2 matrices only, got {m}x{n}"
            )));
        }
        match id {
            LemmaId::SubadjacentIdempotents => {
                lemmas::subadjacent_idempotents(field, m, n, &mut tally)?
            }
            LemmaId::EqualRankAdjacent => lemmas::equal_rank_adjacent(field, m, n, &mut tally)?,
            LemmaId::Coadjacency => lemmas::coadjacency(field, m, n, &mut tally)?,
            LemmaId::PencilIntersections => lemmas::pencil_intersections(field, m, n, &mut tally)?,
            LemmaId::IdempotentInMeet => lemmas::idempotent_in_meet(field, &mut tally)?,
            LemmaId::AdjacentMeet => lemmas::adjacent_meet_rank_two(field, &mut tally)?,
            LemmaId::AffineLines => lemmas::affine_lines(field, &mut tally)?,
            LemmaId::RankAdditivity => lemmas::rank_additivity(field, m, n, &mut tally)?,
            LemmaId::LargeAdjacentSet => lemmas::large_adjacent_set(field, m, n, &mut tally)?,
            LemmaId::PencilAdjacencyCounts => {
                lemmas::pencil_adjacency_counts(field, m, n, &mut tally)?
            }
            LemmaId::Endomorphisms => {}
        }
        if tally.exhausted() {
            break;
        }
    }
    Ok(LemmaReport {
        lemma: id,
        field: field.descriptor().clone(),
        shapes: grid.shapes.iter().map(|&(m, n)| [m, n]).collect(),
        instances: tally.instances,
        complete: !tally.exhausted,
        violations: tally.violations,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Every statement on its default grid, in id order.
pub fn verify_all(field: &Field) -> Result<Vec<LemmaReport>> {
    LemmaId::ALL
        .into_iter()
        .map(|id| verify_lemma(id, &LemmaGrid::default_for(id, field)))
        .collect()
}
