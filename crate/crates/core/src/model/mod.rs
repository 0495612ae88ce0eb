//! Giant-tour solution model.
//!
//! The depot is replicated once per reachable customer. A solution is a
//! single permutation of all expanded nodes (customers plus depot copies)
//! that starts at a depot copy; every depot copy closes the current path and
//! opens the next one with the clock reset to zero. Paths are numbered in
//! visitation order: the first `m` carry the TOPTW objective, the rest are
//! ranked lexicographically behind them.

mod score;
mod tour;

pub use score::{extract_routes, score, HierarchicScore, RouteSet};
pub use tour::{propagate, GiantTour};

use thiserror::Error;

use crate::instance::Instance;

/// Slack allowed when comparing an arrival time against a window bound.
pub const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("tour has {got} nodes, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("expanded node {0} is missing or repeated")]
    NotPermutation(usize),
    #[error("tour must start at a depot copy")]
    MissingLeadingDepot,
    #[error("customer {id} (position {position}) is served at {arrival:.3}, after its window closes at {close:.3}")]
    Infeasible {
        position: usize,
        id: usize,
        arrival: f64,
        close: f64,
    },
    #[error("invalid move: {0}")]
    InvalidMove(String),
}

/// What an expanded index stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpandedNode {
    /// Index into the base instance.
    pub original: usize,
    pub is_depot: bool,
}

/// The base instance with the depot duplicated once per reachable customer.
///
/// Expanded indices `0..depot_copies` are the depot copies, followed by the
/// reachable customers in instance order. Unreachable customers are left out.
#[derive(Debug, Clone)]
pub struct ExpandedGraph {
    base: Instance,
    depot_copies: usize,
    map: Vec<ExpandedNode>,
    open: Vec<f64>,
    close: Vec<f64>,
    service: Vec<f64>,
    prize: Vec<f64>,
    travel: Vec<f64>,
}

pub fn expand(instance: &Instance) -> ExpandedGraph {
    ExpandedGraph::new(instance.clone())
}

impl ExpandedGraph {
    pub fn new(base: Instance) -> Self {
        let customers: Vec<usize> = base.reachable_customers().collect();
        let depot_copies = customers.len();
        let map: Vec<ExpandedNode> = std::iter::repeat_n(
            ExpandedNode {
                original: 0,
                is_depot: true,
            },
            depot_copies,
        )
        .chain(customers.iter().map(|&c| ExpandedNode {
            original: c,
            is_depot: false,
        }))
        .collect();
        let field = |f: fn(&crate::instance::Node) -> f64| -> Vec<f64> {
            map.iter().map(|e| f(base.node(e.original))).collect()
        };
        let open = field(|n| n.window_open);
        let close = field(|n| n.window_close);
        let service = field(|n| n.service_time);
        let prize = field(|n| n.prize);
        let travel = map
            .iter()
            .flat_map(|a| map.iter().map(|b| base.travel_time(a.original, b.original)))
            .collect();
        ExpandedGraph {
            base,
            depot_copies,
            map,
            open,
            close,
            service,
            prize,
            travel,
        }
    }

    pub fn base(&self) -> &Instance {
        &self.base
    }

    pub fn depot_copies(&self) -> usize {
        self.depot_copies
    }

    /// Number of tourable nodes: reachable customers plus depot copies.
    pub fn expanded_size(&self) -> usize {
        self.map.len()
    }

    pub fn num_customers(&self) -> usize {
        self.map.len() - self.depot_copies
    }

    pub fn node(&self, i: usize) -> ExpandedNode {
        self.map[i]
    }

    #[inline]
    pub fn is_depot(&self, i: usize) -> bool {
        i < self.depot_copies
    }

    #[inline]
    pub fn original(&self, i: usize) -> usize {
        self.map[i].original
    }

    /// Expanded indices of the customers.
    pub fn customers(&self) -> std::ops::Range<usize> {
        self.depot_copies..self.map.len()
    }

    /// Expanded index of an instance customer, if it is reachable.
    pub fn expanded_of(&self, original: usize) -> Option<usize> {
        self.map[self.depot_copies..]
            .iter()
            .position(|e| e.original == original)
            .map(|p| p + self.depot_copies)
    }

    #[inline]
    pub fn travel(&self, i: usize, j: usize) -> f64 {
        self.travel[i * self.map.len() + j]
    }

    #[inline]
    pub fn open(&self, i: usize) -> f64 {
        self.open[i]
    }

    #[inline]
    pub fn close(&self, i: usize) -> f64 {
        self.close[i]
    }

    #[inline]
    pub fn service(&self, i: usize) -> f64 {
        self.service[i]
    }

    #[inline]
    pub fn prize(&self, i: usize) -> f64 {
        self.prize[i]
    }

    pub fn horizon(&self) -> f64 {
        self.base.horizon()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Node;

    fn node(id: usize, x: f64, open: f64, close: f64) -> Node {
        Node {
            id,
            x,
            y: 0.0,
            prize: 1.0,
            window_open: open,
            window_close: close,
            service_time: 0.0,
        }
    }

    #[test]
    fn three_feasible_customers_give_six_nodes() {
        let inst = Instance::new(
            "t",
            vec![
                node(0, 0.0, 0.0, 0.0),
                node(1, 1.0, 0.0, 10.0),
                node(2, 2.0, 0.0, 10.0),
                node(3, 3.0, 0.0, 10.0),
            ],
        )
        .unwrap();
        let g = expand(&inst);
        assert_eq!(g.depot_copies(), 3);
        assert_eq!(g.expanded_size(), 6);
        assert_eq!(g.travel(0, 1), 0.0);
        assert_eq!(g.travel(0, 3), 1.0);
        assert_eq!(g.travel(2, 4), 2.0);
        assert_eq!(g.expanded_of(2), Some(4));
    }

    #[test]
    fn unreachable_customers_are_dropped() {
        let inst = Instance::new(
            "t",
            vec![
                node(0, 0.0, 0.0, 0.0),
                node(1, 5.0, 0.0, 4.0),
                node(2, 2.0, 0.0, 10.0),
            ],
        )
        .unwrap();
        let g = expand(&inst);
        assert_eq!(g.depot_copies(), 1);
        assert_eq!(g.expanded_size(), 2);
        assert_eq!(g.original(1), 2);
        assert_eq!(g.expanded_of(1), None);
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::new("t", vec![node(0, 0.0, 0.0, 0.0)]).unwrap();
        let g = expand(&inst);
        assert_eq!(g.expanded_size(), 0);
    }
}
