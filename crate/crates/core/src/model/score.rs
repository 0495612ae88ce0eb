use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{ExpandedGraph, GiantTour, ModelError};

/// Objective of the hierarchic problem, compared lexicographically.
///
/// `main` is the prize of the first `m` paths. `tail` lists the prizes of
/// paths `m+1, m+2, ...` in order with trailing zeros removed. Comparing two
/// scores is the same as comparing `main + sum_k M^(m-k) * tail_k` for any
/// `M` larger than every path prize, without ever forming the powers.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct HierarchicScore {
    pub main: f64,
    pub tail: Vec<f64>,
}

impl HierarchicScore {
    pub fn new(main: f64, mut tail: Vec<f64>) -> Self {
        while tail.last() == Some(&0.0) {
            tail.pop();
        }
        HierarchicScore { main, tail }
    }

    /// Score of a list of per-path prizes given in visitation order.
    pub fn from_path_prizes(prizes: &[f64], m: usize) -> Self {
        let split = m.min(prizes.len());
        HierarchicScore::new(prizes[..split].iter().sum(), prizes[split..].to_vec())
    }

    pub fn compare(&self, other: &Self) -> Ordering {
        cmp_f64(self.main, other.main).then_with(|| {
            let n = self.tail.len().max(other.tail.len());
            (0..n)
                .map(|k| {
                    let a = self.tail.get(k).copied().unwrap_or(0.0);
                    let b = other.tail.get(k).copied().unwrap_or(0.0);
                    cmp_f64(a, b)
                })
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

#[inline]
pub(crate) fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

impl PartialEq for HierarchicScore {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other).is_eq()
    }
}

impl Eq for HierarchicScore {}

impl PartialOrd for HierarchicScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HierarchicScore {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

/// The TOPTW solution carried by the first `m` paths of a giant tour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSet {
    /// Exactly `m` routes of instance node indices; unused vehicles have
    /// empty routes.
    pub routes: Vec<Vec<usize>>,
    pub total_prize: f64,
}

impl RouteSet {
    pub fn num_customers(&self) -> usize {
        self.routes.iter().map(Vec::len).sum()
    }
}

pub(crate) fn path_prizes(tour: &GiantTour, graph: &ExpandedGraph) -> Vec<f64> {
    let mut prizes = vec![0.0; tour.num_paths()];
    for (pos, &v) in tour.order().iter().enumerate() {
        prizes[tour.path_index()[pos]] += graph.prize(v);
    }
    prizes
}

fn require_feasible(tour: &GiantTour, graph: &ExpandedGraph) -> Result<(), ModelError> {
    match tour.first_violation(graph) {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

/// Hierarchic score of a feasible tour for a fleet of `m` vehicles.
pub fn score(
    tour: &GiantTour,
    graph: &ExpandedGraph,
    m: usize,
) -> Result<HierarchicScore, ModelError> {
    require_feasible(tour, graph)?;
    Ok(HierarchicScore::from_path_prizes(
        &path_prizes(tour, graph),
        m,
    ))
}

/// The routes of the first `m` paths, in instance indices.
pub fn extract_routes(
    tour: &GiantTour,
    graph: &ExpandedGraph,
    m: usize,
) -> Result<RouteSet, ModelError> {
    require_feasible(tour, graph)?;
    let mut routes: Vec<Vec<usize>> = tour
        .paths(graph)
        .into_iter()
        .take(m)
        .map(|p| p.into_iter().map(|v| graph.original(v)).collect())
        .collect();
    routes.resize(m, Vec::new());
    let total_prize = routes
        .iter()
        .flatten()
        .map(|&c| graph.base().node(c).prize)
        .sum();
    Ok(RouteSet {
        routes,
        total_prize,
    })
}
