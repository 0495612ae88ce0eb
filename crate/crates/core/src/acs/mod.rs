//! Ant Colony System over the giant-tour model.
//!
//! Each generation sends `n_ants` ants out one after another. Every ant
//! builds a tour with the pseudo-random proportional rule, consuming trail
//! on the arcs it uses, and the tour is then improved by the local search.
//! After the generation only the best tour found so far deposits trail.

mod construct;
mod pheromone;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use construct::{
    desirability, exploitation_probability, feasible_candidates, transition_probabilities,
};
pub use pheromone::PheromoneMatrix;

use crate::bench::RunReport;
use crate::instance::Instance;
use crate::local_search::{self, ChainLengthState, LocalSearchParams};
use crate::model::{self, ExpandedGraph, GiantTour, HierarchicScore};

#[derive(Debug, Error, PartialEq)]
pub enum AcsError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsParams {
    /// Global trail update rate.
    pub rho: f64,
    /// Local trail update rate.
    pub psi: f64,
    pub n_ants: usize,
    /// Expected number of exploratory choices per construction.
    pub nhat: f64,
    /// Fleet size.
    pub m: usize,
    /// Wall-clock limit in seconds.
    pub time_limit: f64,
    pub seed: u64,
    pub ls: LocalSearchParams,
    /// Stop after this many generations.
    pub max_generations: Option<u64>,
    /// Stop as soon as the best first-`m` prize reaches this value.
    pub target_prize: Option<f64>,
}

impl Default for AcsParams {
    fn default() -> Self {
        AcsParams {
            rho: 0.1,
            psi: 0.1,
            n_ants: 10,
            nhat: 15.0,
            m: 1,
            time_limit: 60.0,
            seed: 0,
            ls: LocalSearchParams::default(),
            max_generations: None,
            target_prize: None,
        }
    }
}

impl AcsParams {
    pub fn validate(&self) -> Result<(), AcsError> {
        let bad = |name, reason: &str| {
            Err(AcsError::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho", "must lie strictly between 0 and 1");
        }
        if !(self.psi > 0.0 && self.psi < 1.0) {
            return bad("psi", "must lie strictly between 0 and 1");
        }
        if self.n_ants == 0 {
            return bad("n_ants", "must be at least 1");
        }
        if !(self.nhat >= 0.0 && self.nhat.is_finite()) {
            return bad("nhat", "must be a non-negative number");
        }
        if self.m == 0 {
            return bad("m", "must be at least 1");
        }
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return bad("time_limit", "must be a positive number of seconds");
        }
        if let Some(name) = self.ls.invalid_field() {
            return bad(name, "must be a positive integer");
        }
        Ok(())
    }
}

/// Best tour found during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct BestRecord {
    pub tour: GiantTour,
    pub score: HierarchicScore,
    /// First-`m` prize of `tour`.
    pub main_prize_best: f64,
    /// Seconds from the start of the run.
    pub found_at: f64,
    pub generation: u64,
}

impl BestRecord {
    fn new(
        tour: GiantTour,
        graph: &ExpandedGraph,
        m: usize,
        found_at: f64,
        generation: u64,
    ) -> Self {
        let score = model::score(&tour, graph, m).expect("solver tours are feasible");
        BestRecord {
            main_prize_best: score.main,
            tour,
            score,
            found_at,
            generation,
        }
    }
}

/// One ant's tour with the current trails.
pub fn construct<R: Rng + ?Sized>(
    graph: &ExpandedGraph,
    pheromone: &mut PheromoneMatrix,
    params: &AcsParams,
    rng: &mut R,
) -> GiantTour {
    let q0 = exploitation_probability(params.nhat, graph.expanded_size());
    construct::build(graph, pheromone, q0, Some(params.psi), rng)
}

fn initial_generation<R: Rng + ?Sized>(
    graph: &ExpandedGraph,
    params: &AcsParams,
    rng: &mut R,
) -> (PheromoneMatrix, f64, GiantTour) {
    let n = graph.expanded_size();
    let q0 = exploitation_probability(params.nhat, n);
    let mut uniform = PheromoneMatrix::new(n, 1.0);
    let mut best: Option<(f64, GiantTour)> = None;
    for ant in 0..params.n_ants {
        // the first ant is fully greedy
        let q = if ant == 0 { 1.0 } else { q0 };
        let tour = construct::build(graph, &mut uniform, q, None, rng);
        let prize = model::score(&tour, graph, params.m)
            .expect("constructed tours are feasible")
            .main;
        if best.as_ref().is_none_or(|(p, _)| prize > *p) {
            best = Some((prize, tour));
        }
    }
    let (profit_first, tour) = best.unwrap_or((0.0, GiantTour::empty()));
    let tau0 = if n == 0 {
        1.0
    } else if profit_first > 0.0 {
        1.0 / (profit_first * n as f64)
    } else {
        1.0 / n as f64
    };
    (PheromoneMatrix::new(n, tau0), profit_first, tour)
}

/// Runs one generation of constructions on uniform trails, the first of them
/// greedy, and sets every trail to `1 / (Profit_First * n)`, where
/// `Profit_First` is the best first-`m` prize among them. Returns the matrix and `Profit_First`.
pub fn init_pheromone<R: Rng + ?Sized>(
    graph: &ExpandedGraph,
    params: &AcsParams,
    rng: &mut R,
) -> (PheromoneMatrix, f64) {
    let (p, profit, _) = initial_generation(graph, params, rng);
    (p, profit)
}

/// Deposit along the arcs of the best tour.
pub fn global_update(pheromone: &mut PheromoneMatrix, best: &BestRecord, params: &AcsParams) {
    pheromone.reinforce(best.tour.order(), params.rho, best.main_prize_best);
}

/// Solves `instance` and reports the best tour found.
pub fn solve(instance: &Instance, params: &AcsParams) -> Result<(BestRecord, RunReport), AcsError> {
    params.validate()?;
    let start = Instant::now();
    let elapsed = || start.elapsed().as_secs_f64();
    let graph = ExpandedGraph::new(instance.clone());
    let m = params.m;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (mut pheromone, _, first) = initial_generation(&graph, params, &mut rng);
    let mut best = BestRecord::new(first, &graph, m, elapsed(), 0);
    let mut state = ChainLengthState::new(&params.ls);
    let mut generations = 0u64;
    let done = |best: &BestRecord, generations: u64| {
        graph.num_customers() == 0
            || params.max_generations.is_some_and(|g| generations >= g)
            || params
                .target_prize
                .is_some_and(|t| best.main_prize_best >= t - 1e-9)
    };
    while !done(&best, generations) && elapsed() < params.time_limit {
        let mut improved = false;
        for _ in 0..params.n_ants {
            if generations > 0 && elapsed() >= params.time_limit {
                break;
            }
            let tour = construct(&graph, &mut pheromone, params, &mut rng);
            let tour = local_search::descend(tour, &graph, &params.ls, &state, m, &mut rng);
            let score = model::score(&tour, &graph, m).expect("local search keeps feasibility");
            if score > best.score {
                best = BestRecord::new(tour, &graph, m, elapsed(), generations + 1);
                improved = true;
                if done(&best, generations) {
                    break;
                }
            }
        }
        global_update(&mut pheromone, &best, params);
        state = local_search::update_schedule(state, improved, &params.ls);
        generations += 1;
    }
    let routes = model::extract_routes(&best.tour, &graph, m).expect("best tour is feasible");
    let report = RunReport {
        instance: instance.name().to_string(),
        m,
        seed: params.seed,
        prize: best.main_prize_best,
        nodes: routes.num_customers(),
        found_at_s: best.found_at,
        elapsed_s: elapsed(),
        generations,
    };
    Ok((best, report))
}
