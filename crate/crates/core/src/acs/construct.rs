use rand::Rng;

use super::PheromoneMatrix;
use crate::model::{ExpandedGraph, GiantTour, TIME_EPS};

/// Heuristic attractiveness of moving from `i` (served from `v_i`) to `j`.
///
/// `p_j / (max(t_ij, a_j - v_i - s_i) * (b_j - v_i - s_i - t_ij) + 1)`: high
/// prizes, short waits and tight remaining slack are favoured.
pub fn desirability(graph: &ExpandedGraph, i: usize, j: usize, v_i: f64) -> f64 {
    let ready = v_i + graph.service(i);
    let t = graph.travel(i, j);
    let wait = t.max(graph.open(j) - ready);
    let slack = (graph.close(j) - ready - t).max(0.0);
    graph.prize(j) / (wait * slack + 1.0)
}

/// Unvisited customers that can still be served in time after `current`,
/// in increasing index order.
pub fn feasible_candidates(
    graph: &ExpandedGraph,
    visited: &[bool],
    current: usize,
    v_current: f64,
) -> Vec<usize> {
    let mut out = Vec::new();
    push_candidates(graph, visited, current, v_current, &mut out);
    out
}

fn push_candidates(
    graph: &ExpandedGraph,
    visited: &[bool],
    current: usize,
    v_current: f64,
    out: &mut Vec<usize>,
) {
    let ready = v_current + graph.service(current);
    out.extend(
        graph.customers().filter(|&j| {
            !visited[j] && ready + graph.travel(current, j) <= graph.close(j) + TIME_EPS
        }),
    );
}

/// Selection probabilities of the exploratory rule over `candidates`.
pub fn transition_probabilities(
    graph: &ExpandedGraph,
    pheromone: &PheromoneMatrix,
    current: usize,
    v_current: f64,
    candidates: &[usize],
) -> Vec<f64> {
    let w: Vec<f64> = candidates
        .iter()
        .map(|&j| pheromone.get(current, j) * desirability(graph, current, j, v_current))
        .collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.into_iter().map(|x| x / total).collect()
    } else {
        vec![1.0 / candidates.len() as f64; candidates.len()]
    }
}

/// Probability of taking the greedy choice: `1 - nhat / n`, clamped.
pub fn exploitation_probability(nhat: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    (1.0 - nhat / n as f64).clamp(0.0, 1.0)
}

/// Builds one giant tour. When `psi` is given, each traversed arc receives
/// the local trail update.
pub(crate) fn build<R: Rng + ?Sized>(
    graph: &ExpandedGraph,
    pheromone: &mut PheromoneMatrix,
    q0: f64,
    psi: Option<f64>,
    rng: &mut R,
) -> GiantTour {
    let n = graph.expanded_size();
    if n == 0 {
        return GiantTour::empty();
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut candidates = Vec::with_capacity(graph.num_customers());
    let mut weights = Vec::with_capacity(graph.num_customers());
    let mut next_depot = 1;
    let mut current = 0;
    let mut time = 0.0;
    visited[0] = true;
    order.push(0);
    while order.len() < n {
        candidates.clear();
        push_candidates(graph, &visited, current, time, &mut candidates);
        let next = if candidates.is_empty() {
            next_depot += 1;
            next_depot - 1
        } else {
            weights.clear();
            weights.extend(
                candidates
                    .iter()
                    .map(|&j| pheromone.get(current, j) * desirability(graph, current, j, time)),
            );
            if rng.gen::<f64>() < q0 {
                argmax(&candidates, &weights)
            } else {
                roulette(&candidates, &weights, rng)
            }
        };
        if let Some(psi) = psi {
            pheromone.local_update(current, next, psi);
        }
        time = if graph.is_depot(next) {
            0.0
        } else {
            (time + graph.service(current) + graph.travel(current, next)).max(graph.open(next))
        };
        visited[next] = true;
        order.push(next);
        current = next;
    }
    GiantTour::new(order, graph).expect("construction yields a permutation")
}

fn argmax(candidates: &[usize], weights: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..candidates.len() {
        if weights[k] > weights[best] {
            best = k;
        }
    }
    candidates[best]
}

fn roulette<R: Rng + ?Sized>(candidates: &[usize], weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return argmax(candidates, weights);
    }
    let mut r = rng.gen::<f64>() * total;
    for (k, &w) in weights.iter().enumerate() {
        if r < w {
            return candidates[k];
        }
        r -= w;
    }
    let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
    candidates[last]
}
