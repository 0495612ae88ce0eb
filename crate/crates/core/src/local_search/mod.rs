//! CROSS-exchange local search on the giant tour.
//!
//! Two non-overlapping segments of the tour are swapped without reversal;
//! either segment may be empty, which turns the move into a relocation.
//! Segments may contain depot copies, so one move can exchange fragments of
//! different paths, split a path or merge two.

mod eval;

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{self, ExpandedGraph, GiantTour, HierarchicScore, ModelError};

pub(crate) use eval::TourCache;
use eval::{cmp_prize, Diff, Move};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSearchParams {
    /// Initial maximum segment length.
    pub ls_init: usize,
    /// Generations without improvement before the length grows.
    pub ls_wnd: usize,
    /// Length increment.
    pub ls_step: usize,
    /// Consecutive non-improving moves accepted before a descent stops.
    pub ni_cap: usize,
}

impl Default for LocalSearchParams {
    fn default() -> Self {
        LocalSearchParams {
            ls_init: 3,
            ls_wnd: 3,
            ls_step: 2,
            ni_cap: 5,
        }
    }
}

impl LocalSearchParams {
    /// Name of the first parameter that is not a positive integer.
    pub fn invalid_field(&self) -> Option<&'static str> {
        [
            ("ls_init", self.ls_init),
            ("ls_wnd", self.ls_wnd),
            ("ls_step", self.ls_step),
            ("ni_cap", self.ni_cap),
        ]
        .into_iter()
        .find(|&(_, v)| v == 0)
        .map(|(name, _)| name)
    }
}

/// Adaptive segment length, carried across generations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLengthState {
    pub current_max_len: usize,
    pub generations_since_improvement: usize,
}

impl ChainLengthState {
    pub fn new(params: &LocalSearchParams) -> Self {
        ChainLengthState {
            current_max_len: params.ls_init,
            generations_since_improvement: 0,
        }
    }
}

pub fn update_schedule(
    state: ChainLengthState,
    improved_this_generation: bool,
    params: &LocalSearchParams,
) -> ChainLengthState {
    if improved_this_generation {
        return ChainLengthState {
            generations_since_improvement: 0,
            ..state
        };
    }
    let count = state.generations_since_improvement + 1;
    if count >= params.ls_wnd {
        ChainLengthState {
            current_max_len: state.current_max_len + params.ls_step,
            generations_since_improvement: 0,
        }
    } else {
        ChainLengthState {
            generations_since_improvement: count,
            ..state
        }
    }
}

/// Exchange of the tour positions in `first` and `second`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrossMove {
    pub first: Range<usize>,
    pub second: Range<usize>,
}

impl CrossMove {
    fn normalized(&self, len: usize) -> Result<Move, ModelError> {
        let (a, b) = if self.first.start <= self.second.start {
            (&self.first, &self.second)
        } else {
            (&self.second, &self.first)
        };
        let invalid = |msg: &str| Err(ModelError::InvalidMove(format!("{self:?}: {msg}")));
        if a.start > a.end || b.start > b.end {
            return invalid("reversed range");
        }
        if a.is_empty() && b.is_empty() {
            return invalid("both segments are empty");
        }
        if a.start == 0 {
            return invalid("position 0 is fixed");
        }
        if a.end > b.start {
            return invalid("segments overlap");
        }
        if b.end > len {
            return invalid("segment out of bounds");
        }
        Ok(Move {
            i1: a.start,
            l1: a.len(),
            i2: b.start,
            l2: b.len(),
        })
    }
}

impl From<Move> for CrossMove {
    fn from(mv: Move) -> Self {
        CrossMove {
            first: mv.i1..mv.i1 + mv.l1,
            second: mv.i2..mv.i2 + mv.l2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveOutcome {
    pub tour: GiantTour,
    pub feasible: bool,
    /// Hierarchic score, present when the new tour is feasible.
    pub score: Option<HierarchicScore>,
}

/// Swaps the two segments of `mv` and re-propagates the result.
pub fn apply_move(
    tour: &GiantTour,
    mv: &CrossMove,
    graph: &ExpandedGraph,
    m: usize,
) -> Result<MoveOutcome, ModelError> {
    let order = mv.normalized(tour.len())?.apply(tour.order());
    let tour = GiantTour::new(order, graph)?;
    let feasible = tour.is_feasible();
    let score = feasible
        .then(|| model::score(&tour, graph, m))
        .transpose()?;
    Ok(MoveOutcome {
        tour,
        feasible,
        score,
    })
}

/// Every feasible non-trivial neighbour within segment length `max_len`,
/// in scan order with anchors taken left to right.
pub fn neighborhood_scores(
    tour: &GiantTour,
    graph: &ExpandedGraph,
    max_len: usize,
    m: usize,
) -> Vec<(CrossMove, HierarchicScore)> {
    let cache = TourCache::new(tour.order(), graph);
    let anchors: Vec<usize> = (1..tour.len()).collect();
    let mut out = Vec::new();
    cache.scan(&anchors, max_len, true, |mv, toks| {
        let prizes = cache.materialize(toks);
        out.push((mv.into(), HierarchicScore::from_path_prizes(&prizes, m)));
        false
    });
    out
}

/// The highest-scoring feasible neighbour; the first in scan order wins ties.
pub fn best_neighbor(
    tour: &GiantTour,
    graph: &ExpandedGraph,
    max_len: usize,
    m: usize,
) -> Option<(CrossMove, HierarchicScore)> {
    neighborhood_scores(tour, graph, max_len, m)
        .into_iter()
        .fold(None, |best, (mv, s)| match best {
            Some((_, ref b)) if s <= *b => best,
            _ => Some((mv, s)),
        })
}

struct NonImproving {
    mv: Move,
    diff: Diff,
    main: f64,
    prizes: Vec<f64>,
    zero_from: usize,
}

/// Runs the local search from `tour` and returns the best tour seen.
///
/// Anchors are visited in a fresh random order after every accepted move.
/// The first strictly improving neighbour is taken; if none exists the best
/// feasible non-improving neighbour is taken instead. The search stops once
/// `ni_cap` non-improving moves have been accepted since the last new best.
pub fn descend<R: Rng + ?Sized>(
    tour: GiantTour,
    graph: &ExpandedGraph,
    params: &LocalSearchParams,
    state: &ChainLengthState,
    m: usize,
    rng: &mut R,
) -> GiantTour {
    if !tour.is_feasible() || tour.len() < 3 {
        return tour;
    }
    let max_len = state.current_max_len;
    let mut cache = TourCache::new(tour.order(), graph);
    let mut current = score_of(&cache, m);
    let mut best = (tour, current.clone());
    let mut anchors: Vec<usize> = (1..best.0.len()).collect();
    let mut ni = 0;
    loop {
        anchors.shuffle(rng);
        let mut improving: Option<(Vec<usize>, HierarchicScore)> = None;
        let mut fallback: Option<NonImproving> = None;
        cache.scan(&anchors, max_len, false, |mv, toks| {
            let main = cache.main_sum(toks, m);
            let diff = cache.diff_current(toks, main, m);
            if diff.ord.is_gt() {
                let order = mv.apply(cache.order());
                let next = TourCache::new(&order, graph);
                let s = score_of(&next, m);
                if next.is_feasible() && s > current {
                    improving = Some((order, s));
                    return true;
                }
                return false;
            }
            let better = match &fallback {
                None => true,
                Some(f) => diff
                    .versus(&f.diff)
                    .unwrap_or_else(|| {
                        cmp_prize(main, f.main)
                            .then_with(|| cache.cmp_tail(toks, m, &f.prizes, f.zero_from, false))
                    })
                    .is_gt(),
            };
            if better {
                let prizes = cache.materialize(toks);
                let zero_from = prizes.iter().rposition(|&p| p != 0.0).map_or(0, |k| k + 1);
                fallback = Some(NonImproving {
                    mv,
                    diff,
                    main,
                    prizes,
                    zero_from,
                });
            }
            false
        });
        let (order, s) = match (improving, fallback) {
            (Some(found), _) => found,
            (None, Some(f)) => {
                let order = f.mv.apply(cache.order());
                let next = TourCache::new(&order, graph);
                if !next.is_feasible() {
                    break;
                }
                ni += 1;
                let s = score_of(&next, m);
                (order, s)
            }
            (None, None) => break,
        };
        cache = TourCache::new(&order, graph);
        current = s;
        if current > best.1 {
            let tour = GiantTour::new(order, graph).expect("moves preserve the permutation");
            best = (tour, current.clone());
            ni = 0;
        }
        if ni >= params.ni_cap {
            break;
        }
    }
    best.0
}

fn score_of(cache: &TourCache<'_>, m: usize) -> HierarchicScore {
    HierarchicScore::from_path_prizes(cache.prizes(), m)
}
