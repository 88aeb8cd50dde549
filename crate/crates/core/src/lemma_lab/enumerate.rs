//! Depth-first enumeration of adjacency preservers between tiny spaces.
//!
//! Domain matrices are assigned images in ascending code order. A prefix is
//! kept only if every assigned pair adjacent in the domain has adjacent
//! images. The search state is a prefix of image codes, which doubles as the
//! resume cursor:
//!
//! * a full cursor names a table that was already emitted, so resuming
//!   backtracks from it;
//! * a partial cursor names a consistent prefix whose subtree has not been
//!   explored yet, so resuming visits it.
//!
//! Checkpoints are only taken in those two states, which keeps resumption
//! exact.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::recover;
use crate::error::{Error, Result};
use crate::field::{Field, FieldDescriptor};
use crate::geometry::is_adjacent_set;
use crate::maps::{is_degenerate, TabulatedMap};
use crate::matrix::{Matrix, MatrixSpace};

/// Largest domain or codomain, in matrices, the enumerator accepts.
pub const MAX_ENUMERATION_SPACE: u64 = 16;

/// Default node interval between checkpoints.
pub const CHECKPOINT_EVERY: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationTask {
    pub field: FieldDescriptor,
    pub domain: [usize; 2],
    pub codomain: [usize; 2],
    /// Require the zero matrix to map to zero.
    pub fix_zero: bool,
}

impl EnumerationTask {
    pub fn new(
        field: &Field,
        domain: (usize, usize),
        codomain: (usize, usize),
        fix_zero: bool,
    ) -> Self {
        EnumerationTask {
            field: field.descriptor().clone(),
            domain: [domain.0, domain.1],
            codomain: [codomain.0, codomain.1],
            fix_zero,
        }
    }

    fn base_root(&self) -> Vec<u32> {
        if self.fix_zero {
            vec![0]
        } else {
            Vec::new()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSummary {
    pub emitted: u64,
    pub standard: u64,
    pub degenerate: u64,
    pub both: u64,
    pub neither: u64,
    pub unclassified_small: u64,
    pub nodes: u64,
    pub complete: bool,
}

impl StreamSummary {
    fn absorb(&mut self, other: &StreamSummary) {
        self.emitted += other.emitted;
        self.standard += other.standard;
        self.degenerate += other.degenerate;
        self.both += other.both;
        self.neither += other.neither;
        self.unclassified_small += other.unclassified_small;
        self.nodes += other.nodes;
    }
}

/// Everything needed to continue a run: `cursor` is empty once the run is
/// complete.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub task: EnumerationTask,
    pub cursor: Vec<u32>,
    pub summary: StreamSummary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Visit,
    Backtrack,
    Done,
}

enum Step {
    Emitted(TabulatedMap),
    Continue,
    Done,
}

pub struct PreserverSearch {
    task: EnumerationTask,
    field: Field,
    // for each domain vertex, its adjacent vertices with smaller code
    earlier: Vec<Vec<usize>>,
    cod_adj: Vec<Vec<bool>>,
    cod: Vec<Matrix>,
    root_len: usize,
    base_len: usize,
    assign: Vec<u32>,
    state: State,
    nodes: u64,
}

impl PreserverSearch {
    /// Searches the whole task.
    pub fn new(task: &EnumerationTask) -> Result<Self> {
        let root = task.base_root();
        PreserverSearch::subtree(task, root.clone(), root)
    }

    /// Continues a run from a checkpoint cursor.
    pub fn resume(task: &EnumerationTask, cursor: Vec<u32>) -> Result<Self> {
        PreserverSearch::subtree(task, task.base_root(), cursor)
    }

    /// Searches only below `root`, starting at `cursor` (which must extend
    /// `root`).
    fn subtree(task: &EnumerationTask, root: Vec<u32>, cursor: Vec<u32>) -> Result<Self> {
        let field = Field::new(task.field.clone())?;
        let dom = MatrixSpace::new(&field, task.domain[0], task.domain[1])?;
        let cod = MatrixSpace::new(&field, task.codomain[0], task.codomain[1])?;
        for (what, size) in [("domain", dom.size()), ("codomain", cod.size())] {
            if size > MAX_ENUMERATION_SPACE {
                return Err(Error::TaskTooLarge(format!(
                    "{what} has {size} matrices, at most {MAX_ENUMERATION_SPACE} are supported"
                )));
            }
        }
        let dom: Vec<Matrix> = dom.iter().collect();
        let cod: Vec<Matrix> = cod.iter().collect();
        let adjacent = |a: &Matrix, b: &Matrix| a.sub(b).expect("same shape").rank() == 1;
        let earlier = (0..dom.len())
            .map(|v| (0..v).filter(|&u| adjacent(&dom[u], &dom[v])).collect())
            .collect();
        let cod_adj = cod
            .iter()
            .map(|a| cod.iter().map(|b| adjacent(a, b)).collect())
            .collect();
        let mut search = PreserverSearch {
            task: task.clone(),
            field,
            earlier,
            cod_adj,
            cod,
            root_len: root.len(),
            base_len: task.base_root().len(),
            assign: Vec::new(),
            state: State::Visit,
            nodes: 0,
        };
        if cursor.len() < root.len()
            || cursor[..root.len()] != root[..]
            || cursor.len() > search.earlier.len()
        {
            return Err(Error::Malformed(format!(
                "cursor {cursor:?} does not extend {root:?}"
            )));
        }
        for &c in &cursor {
            if c as usize >= search.cod.len() || !search.fits(c) {
                return Err(Error::Malformed(format!(
                    "cursor {cursor:?} is not a consistent prefix"
                )));
            }
            search.assign.push(c);
        }
        if search.assign.len() == search.earlier.len() {
            search.state = State::Backtrack;
        }
        Ok(search)
    }

    pub fn task(&self) -> &EnumerationTask {
        &self.task
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Whether image `c` for the next vertex agrees with every assigned
    /// neighbour.
    fn fits(&self, c: u32) -> bool {
        let v = self.assign.len();
        self.earlier[v]
            .iter()
            .all(|&u| self.cod_adj[self.assign[u] as usize][c as usize])
    }

    fn next_candidate(&self, from: u32) -> Option<u32> {
        (from..self.cod.len() as u32).find(|&c| self.fits(c))
    }

    fn table(&self) -> TabulatedMap {
        let outputs = self
            .assign
            .iter()
            .map(|&c| self.cod[c as usize].clone())
            .collect();
        let [m, n] = self.task.domain;
        let [p, q] = self.task.codomain;
        TabulatedMap::new(&self.field, (m, n), (p, q), outputs)
            .expect("shapes checked at construction")
    }

    fn step(&mut self) -> Step {
        match self.state {
            State::Visit => {
                // the task root is not a node, so split runs count the same
                if self.assign.len() > self.base_len {
                    self.nodes += 1;
                }
                if self.assign.len() == self.earlier.len() {
                    self.state = State::Backtrack;
                    return Step::Emitted(self.table());
                }
                match self.next_candidate(0) {
                    Some(c) => self.assign.push(c),
                    None => self.state = State::Backtrack,
                }
                Step::Continue
            }
            State::Backtrack => {
                if self.assign.len() <= self.root_len {
                    self.state = State::Done;
                    return Step::Done;
                }
                let last = self.assign.pop().expect("nonempty above root");
                if let Some(c) = self.next_candidate(last + 1) {
                    self.assign.push(c);
                    self.state = State::Visit;
                }
                Step::Continue
            }
            State::Done => Step::Done,
        }
    }

    /// The current cursor, if the search sits in a state it can resume from.
    pub fn cursor(&self) -> Option<Vec<u32>> {
        match self.state {
            State::Visit if self.assign.len() < self.earlier.len() => Some(self.assign.clone()),
            State::Backtrack if self.assign.len() == self.earlier.len() => {
                Some(self.assign.clone())
            }
            State::Done => Some(Vec::new()),
            State::Visit | State::Backtrack => None,
        }
    }

    pub fn is_done(&self) -> bool {
        self.state == State::Done
    }

    /// Children of the search root: one prefix per admissible image of the
    /// first free vertex.
    fn partition(task: &EnumerationTask) -> Result<Vec<Vec<u32>>> {
        let search = PreserverSearch::new(task)?;
        if search.assign.len() == search.earlier.len() {
            return Ok(vec![search.assign]);
        }
        Ok((0..search.cod.len() as u32)
            .filter(|&c| search.fits(c))
            .map(|c| {
                let mut p = search.assign.clone();
                p.push(c);
                p
            })
            .collect())
    }
}

impl Iterator for PreserverSearch {
    type Item = TabulatedMap;

    fn next(&mut self) -> Option<TabulatedMap> {
        loop {
            match self.step() {
                Step::Emitted(t) => return Some(t),
                Step::Continue => {}
                Step::Done => return None,
            }
        }
    }
}

/// The stream of every adjacency preserver satisfying the task's
/// constraints, in lexicographic order of image codes.
pub fn enumerate_preservers(task: &EnumerationTask) -> Result<PreserverSearch> {
    PreserverSearch::new(task)
}

#[derive(Clone, Debug)]
pub struct StreamOptions {
    /// Wall-clock cap; `None` runs to completion.
    pub budget: Option<Duration>,
    pub resume: Option<Checkpoint>,
    pub checkpoint_every: u64,
}

impl Default for StreamOptions {
    fn default() -> Self {
        StreamOptions {
            budget: Some(Duration::from_secs(600)),
            resume: None,
            checkpoint_every: CHECKPOINT_EVERY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamOutcome {
    /// Where the run stopped; `summary.complete` tells whether it finished.
    pub checkpoint: Checkpoint,
}

impl StreamOutcome {
    pub fn summary(&self) -> &StreamSummary {
        &self.checkpoint.summary
    }
}

fn tally(map: &TabulatedMap, summary: &mut StreamSummary) -> Result<()> {
    summary.emitted += 1;
    let (m, n) = map.domain();
    let (p, q) = map.codomain();
    let degenerate = is_degenerate(map);
    if degenerate && !is_adjacent_set(&map.range())? {
        return Err(counterexample(
            "degenerate table with a non-adjacent range",
            map,
        ));
    }
    if m.min(n) < 2 || p.min(q) < 2 {
        if degenerate {
            summary.degenerate += 1;
        } else {
            summary.unclassified_small += 1;
        }
        return Ok(());
    }
    let standard = recover(map).is_ok();
    match (standard, degenerate) {
        (true, true) => summary.both += 1,
        (true, false) => summary.standard += 1,
        (false, true) => summary.degenerate += 1,
        (false, false) => {
            summary.neither += 1;
            return Err(counterexample(
                "table is neither standard nor degenerate",
                map,
            ));
        }
    }
    Ok(())
}

fn counterexample(what: &str, map: &TabulatedMap) -> Error {
    let table = serde_json::to_string(map).unwrap_or_default();
    Error::Counterexample(format!("{what}: {table}"))
}

/// Drives one search, classifying every emission into `summary`.
fn drive(
    search: &mut PreserverSearch,
    summary: &mut StreamSummary,
    deadline: Option<Instant>,
    every: u64,
    mut on_checkpoint: impl FnMut(&[u32], &StreamSummary),
) -> Result<Option<Vec<u32>>> {
    let every = every.max(1);
    let start_nodes = search.nodes;
    let mut next_checkpoint = every;
    let mut stopping = false;
    loop {
        let done = search.nodes - start_nodes;
        if done >= next_checkpoint || stopping {
            if let Some(cursor) = search.cursor() {
                let mut snapshot = *summary;
                snapshot.nodes += done;
                if stopping {
                    *summary = snapshot;
                    return Ok(Some(cursor));
                }
                on_checkpoint(&cursor, &snapshot);
                next_checkpoint += every;
            }
        }
        if !stopping && done.is_multiple_of(1024) && deadline.is_some_and(|d| Instant::now() >= d) {
            stopping = true;
        }
        match search.step() {
            Step::Emitted(map) => tally(&map, summary)?,
            Step::Continue => {}
            Step::Done => {
                summary.nodes += search.nodes - start_nodes;
                return Ok(None);
            }
        }
    }
}

/// Enumerates and classifies every preserver of the task on one thread.
/// Aborts with [`Error::Counterexample`] on a table that is neither
/// standard nor degenerate, or a degenerate table whose range is not an
/// adjacent set.
pub fn classify_stream(
    task: &EnumerationTask,
    options: &StreamOptions,
    mut on_checkpoint: impl FnMut(&Checkpoint),
) -> Result<StreamOutcome> {
    let deadline = options.budget.map(|b| Instant::now() + b);
    let (mut search, mut summary) = match &options.resume {
        Some(cp) => {
            check_resume(task, cp)?;
            (
                PreserverSearch::resume(task, cp.cursor.clone())?,
                cp.summary,
            )
        }
        None => (PreserverSearch::new(task)?, StreamSummary::default()),
    };
    if options
        .resume
        .as_ref()
        .is_some_and(|cp| cp.summary.complete)
    {
        return Ok(StreamOutcome {
            checkpoint: options.resume.clone().expect("checked"),
        });
    }
    let stopped = drive(
        &mut search,
        &mut summary,
        deadline,
        options.checkpoint_every,
        |cursor, snap| {
            on_checkpoint(&Checkpoint {
                task: task.clone(),
                cursor: cursor.to_vec(),
                summary: *snap,
            })
        },
    )?;
    summary.complete = stopped.is_none();
    let checkpoint = Checkpoint {
        task: task.clone(),
        cursor: stopped.unwrap_or_default(),
        summary,
    };
    on_checkpoint(&checkpoint);
    Ok(StreamOutcome { checkpoint })
}

fn check_resume(task: &EnumerationTask, cp: &Checkpoint) -> Result<()> {
    if &cp.task != task {
        return Err(Error::Malformed(
            "checkpoint belongs to a different task".into(),
        ));
    }
    Ok(())
}

/// [`classify_stream`] with the search tree split by the image of the first
/// free vertex and the subtrees run on the rayon pool. Subtree summaries
/// merge in subtree order; if the budget runs out, the checkpoint keeps the
/// finished subtrees before the first unfinished one plus that one's
/// progress, and later subtrees are redone on resume. The single checkpoint
/// is written once, at the end.
pub fn classify_stream_parallel(
    task: &EnumerationTask,
    options: &StreamOptions,
    mut on_checkpoint: impl FnMut(&Checkpoint),
) -> Result<StreamOutcome> {
    let deadline = options.budget.map(|b| Instant::now() + b);
    let base = task.base_root();
    let mut summary = StreamSummary::default();
    let mut resume_at: Option<Vec<u32>> = None;
    if let Some(cp) = &options.resume {
        check_resume(task, cp)?;
        if cp.summary.complete {
            return Ok(StreamOutcome {
                checkpoint: cp.clone(),
            });
        }
        summary = cp.summary;
        if cp.cursor.len() > base.len() {
            resume_at = Some(cp.cursor.clone());
        }
    }
    let key_len = base.len() + 1;
    let roots: Vec<Vec<u32>> = PreserverSearch::partition(task)?
        .into_iter()
        .filter(|r| {
            resume_at
                .as_ref()
                .is_none_or(|c| r[..] >= c[..key_len.min(c.len())])
        })
        .collect();
    let results: Vec<Result<(StreamSummary, Option<Vec<u32>>)>> = roots
        .par_iter()
        .map(|root| {
            let cursor = match &resume_at {
                Some(c) if c.len() >= root.len() && c[..root.len()] == root[..] => c.clone(),
                _ => root.clone(),
            };
            let mut search = PreserverSearch::subtree(task, root.clone(), cursor)?;
            let mut sub = StreamSummary::default();
            let stopped = drive(&mut search, &mut sub, deadline, u64::MAX, |_, _| {})?;
            Ok((sub, stopped))
        })
        .collect();
    let mut cursor = None;
    for result in results {
        let (sub, stopped) = result?;
        summary.absorb(&sub);
        if stopped.is_some() {
            cursor = stopped;
            break;
        }
    }
    summary.complete = cursor.is_none();
    let checkpoint = Checkpoint {
        task: task.clone(),
        cursor: cursor.unwrap_or_default(),
        summary,
    };
    on_checkpoint(&checkpoint);
    Ok(StreamOutcome { checkpoint })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::check_preserver;

    fn f2() -> Field {
        Field::prime(2).unwrap()
    }

    /// All tables by brute force, filtered by the forward preservation check.
    fn brute_force(task: &EnumerationTask) -> Vec<Vec<u64>> {
        let field = Field::new(task.field.clone()).unwrap();
        let dom = MatrixSpace::new(&field, task.domain[0], task.domain[1]).unwrap();
        let cod = MatrixSpace::new(&field, task.codomain[0], task.codomain[1]).unwrap();
        let (nd, nc) = (dom.size() as u32, cod.size());
        let mut out = Vec::new();
        for mut code in 0..nc.pow(nd) {
            let mut images = Vec::new();
            for _ in 0..nd {
                images.push(code % nc);
                code /= nc;
            }
            if task.fix_zero && images[0] != 0 {
                continue;
            }
            let outputs = images.iter().map(|&c| cod.get(c).unwrap()).collect();
            let map = TabulatedMap::new(
                &field,
                (task.domain[0], task.domain[1]),
                (task.codomain[0], task.codomain[1]),
                outputs,
            )
            .unwrap();
            if check_preserver(&map).preserves_adjacency {
                out.push(images);
            }
        }
        out.sort();
        out
    }

    fn emitted(task: &EnumerationTask) -> Vec<Vec<u64>> {
        enumerate_preservers(task)
            .unwrap()
            .map(|t| t.outputs().iter().map(Matrix::code).collect())
            .collect()
    }

    #[test]
    fn matches_brute_force_on_tiny_tasks() {
        let f = f2();
        for (dom, cod, fix) in [
            ((1, 2), (1, 2), false),
            ((2, 1), (1, 2), true),
            ((1, 2), (2, 2), false),
        ] {
            let task = EnumerationTask::new(&f, dom, cod, fix);
            // the stream is sorted, so it must equal the sorted brute force
            assert_eq!(emitted(&task), brute_force(&task), "{dom:?} -> {cod:?}");
        }
    }

    #[test]
    fn small_task_summary() {
        let task = EnumerationTask::new(&f2(), (1, 2), (1, 2), false);
        let out = classify_stream(&task, &StreamOptions::default(), |_| {}).unwrap();
        let s = out.summary();
        // every map of K4 into itself preserving adjacency is a bijection
        assert_eq!(s.emitted, 24);
        assert_eq!(s.degenerate + s.unclassified_small, 24);
        assert!(s.complete);
        assert!(out.checkpoint.cursor.is_empty());
    }

    #[test]
    fn resume_continues_the_exact_stream() {
        let task = EnumerationTask::new(&f2(), (1, 2), (2, 2), false);
        let all = emitted(&task);
        let mut search = PreserverSearch::new(&task).unwrap();
        let mut seen = Vec::new();
        let mut cursors = Vec::new();
        while let Some(t) = search.next() {
            seen.push(t.outputs().iter().map(Matrix::code).collect::<Vec<_>>());
            cursors.push(search.cursor().unwrap());
        }
        assert_eq!(seen, all);
        for (i, cursor) in cursors.iter().enumerate().step_by(37) {
            let rest: Vec<Vec<u64>> = PreserverSearch::resume(&task, cursor.clone())
                .unwrap()
                .map(|t| t.outputs().iter().map(Matrix::code).collect())
                .collect();
            assert_eq!(rest[..], all[i + 1..]);
        }
    }

    #[test]
    fn checkpoints_resume_to_the_same_summary() {
        let task = EnumerationTask::new(&f2(), (1, 2), (2, 2), false);
        let full = classify_stream(&task, &StreamOptions::default(), |_| {}).unwrap();
        let mut checkpoints = Vec::new();
        let opts = StreamOptions {
            checkpoint_every: 97,
            ..StreamOptions::default()
        };
        classify_stream(&task, &opts, |cp| checkpoints.push(cp.clone())).unwrap();
        assert!(checkpoints.len() > 2);
        for cp in checkpoints {
            let json = serde_json::to_string(&cp).unwrap();
            let cp: Checkpoint = serde_json::from_str(&json).unwrap();
            let opts = StreamOptions {
                resume: Some(cp),
                ..StreamOptions::default()
            };
            let resumed = classify_stream(&task, &opts, |_| {}).unwrap();
            assert_eq!(resumed.summary(), full.summary());
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let task = EnumerationTask::new(&f2(), (1, 2), (2, 2), false);
        let serial = classify_stream(&task, &StreamOptions::default(), |_| {}).unwrap();
        let parallel = classify_stream_parallel(&task, &StreamOptions::default(), |_| {}).unwrap();
        assert_eq!(serial.summary(), parallel.summary());
    }

    #[test]
    fn zero_budget_stops_at_a_resumable_cursor() {
        let task = EnumerationTask::new(&f2(), (1, 2), (2, 2), false);
        let full = classify_stream(&task, &StreamOptions::default(), |_| {}).unwrap();
        let opts = StreamOptions {
            budget: Some(Duration::ZERO),
            ..StreamOptions::default()
        };
        for parallel in [false, true] {
            let partial = if parallel {
                classify_stream_parallel(&task, &opts, |_| {}).unwrap()
            } else {
                classify_stream(&task, &opts, |_| {}).unwrap()
            };
            assert!(!partial.summary().complete);
            let opts = StreamOptions {
                resume: Some(partial.checkpoint),
                ..StreamOptions::default()
            };
            let resumed = if parallel {
                classify_stream_parallel(&task, &opts, |_| {}).unwrap()
            } else {
                classify_stream(&task, &opts, |_| {}).unwrap()
            };
            assert_eq!(resumed.summary(), full.summary());
        }
    }

    #[test]
    fn oversized_tasks_are_refused() {
        let task = EnumerationTask::new(&f2(), (2, 3), (2, 2), true);
        assert!(matches!(
            PreserverSearch::new(&task),
            Err(Error::TaskTooLarge(_))
        ));
    }

    #[test]
    fn inconsistent_cursor_is_refused() {
        let task = EnumerationTask::new(&f2(), (1, 2), (1, 2), false);
        // codes 1 and 2 are adjacent in the domain but both map to 1
        assert!(PreserverSearch::resume(&task, vec![0, 1, 1]).is_err());
    }
}
