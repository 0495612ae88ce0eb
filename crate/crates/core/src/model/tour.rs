use super::{ExpandedGraph, ModelError, TIME_EPS};

/// A permutation of every expanded node, starting at a depot copy, together
/// with the service start time and path number of each position.
#[derive(Debug, Clone, PartialEq)]
pub struct GiantTour {
    order: Vec<usize>,
    arrival: Vec<f64>,
    path_index: Vec<usize>,
    feasible: bool,
}

impl GiantTour {
    /// Validates `order` as a permutation starting with a depot copy and
    /// propagates arrival times along it. Time-window violations do not make
    /// this fail; check [`GiantTour::is_feasible`].
    pub fn new(order: Vec<usize>, graph: &ExpandedGraph) -> Result<Self, ModelError> {
        let n = graph.expanded_size();
        if order.len() != n {
            return Err(ModelError::WrongLength {
                got: order.len(),
                expected: n,
            });
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(ModelError::NotPermutation(v));
            }
            seen[v] = true;
        }
        if let Some(&first) = order.first() {
            if !graph.is_depot(first) {
                return Err(ModelError::MissingLeadingDepot);
            }
        }
        let (arrival, path_index, feasible) = simulate(&order, graph);
        Ok(GiantTour {
            order,
            arrival,
            path_index,
            feasible,
        })
    }

    /// The tour containing only depot copies (or nothing at all).
    pub fn empty() -> Self {
        GiantTour {
            order: Vec::new(),
            arrival: Vec::new(),
            path_index: Vec::new(),
            feasible: true,
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    /// Service start time at each position (`v_i`); zero at depot copies.
    pub fn arrival(&self) -> &[f64] {
        &self.arrival
    }

    /// Zero-based path number of each position. A depot copy belongs to the
    /// path it opens.
    pub fn path_index(&self) -> &[usize] {
        &self.path_index
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    pub fn num_paths(&self) -> usize {
        self.path_index.last().map_or(0, |&k| k + 1)
    }

    /// Customers (expanded indices) of each path in visitation order.
    pub fn paths(&self, graph: &ExpandedGraph) -> Vec<Vec<usize>> {
        let mut paths = vec![Vec::new(); self.num_paths()];
        for (pos, &v) in self.order.iter().enumerate() {
            if !graph.is_depot(v) {
                paths[self.path_index[pos]].push(v);
            }
        }
        paths
    }

    /// First position whose service start lies outside its window.
    pub fn first_violation(&self, graph: &ExpandedGraph) -> Option<ModelError> {
        self.order.iter().enumerate().find_map(|(pos, &v)| {
            let arrival = self.arrival[pos];
            (arrival > graph.close(v) + TIME_EPS).then(|| ModelError::Infeasible {
                position: pos,
                id: graph.base().node(graph.original(v)).id,
                arrival,
                close: graph.close(v),
            })
        })
    }
}

/// Arrival (service start) times along `tour` and whether every customer is
/// served inside its window. Each depot copy restarts the clock at zero;
/// between consecutive nodes `v_j = max(v_i + s_i + t_ij, a_j)`.
pub fn propagate(tour: &GiantTour, graph: &ExpandedGraph) -> (Vec<f64>, bool) {
    let (arrival, _, feasible) = simulate(&tour.order, graph);
    (arrival, feasible)
}

pub(crate) fn simulate(order: &[usize], graph: &ExpandedGraph) -> (Vec<f64>, Vec<usize>, bool) {
    let mut arrival = Vec::with_capacity(order.len());
    let mut path_index = Vec::with_capacity(order.len());
    let mut feasible = true;
    let mut path = 0usize;
    let mut prev: Option<usize> = None;
    let mut time = 0.0;
    for (pos, &v) in order.iter().enumerate() {
        if graph.is_depot(v) {
            if pos > 0 {
                path += 1;
            }
            time = 0.0;
        } else {
            let p = prev.expect("tour starts with a depot copy");
            time = (time + graph.service(p) + graph.travel(p, v)).max(graph.open(v));
            if time > graph.close(v) + TIME_EPS {
                feasible = false;
            }
        }
        arrival.push(time);
        path_index.push(path);
        prev = Some(v);
    }
    (arrival, path_index, feasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Instance, Node};
    use crate::model::expand;

    fn single(open: f64, close: f64) -> ExpandedGraph {
        let nodes = vec![
            Node {
                id: 0,
                x: 0.0,
                y: 0.0,
                prize: 0.0,
                window_open: 0.0,
                window_close: 0.0,
                service_time: 0.0,
            },
            Node {
                id: 1,
                x: 4.0,
                y: 0.0,
                prize: 7.0,
                window_open: open,
                window_close: close,
                service_time: 0.0,
            },
        ];
        expand(&Instance::new("one", nodes).unwrap())
    }

    #[test]
    fn waiting_for_window() {
        let g = single(10.0, 20.0);
        let t = GiantTour::new(vec![0, 1], &g).unwrap();
        assert_eq!(t.arrival(), &[0.0, 10.0]);
        assert!(t.is_feasible());
    }

    #[test]
    fn late_arrival() {
        // A lone customer with t_01 = 4 > b = 3 is never tourable.
        assert_eq!(single(0.0, 3.0).expanded_size(), 0);

        // Reachable on its own (t_02 = 3 <= 5) but late after customer 1:
        // 4 + 7 = 11 > 5.
        let mut nodes = single(0.0, 100.0).base().nodes().to_vec();
        nodes.push(Node {
            id: 2,
            x: -3.0,
            y: 0.0,
            prize: 1.0,
            window_open: 0.0,
            window_close: 5.0,
            service_time: 0.0,
        });
        let g = expand(&Instance::new("two", nodes).unwrap());
        let late = GiantTour::new(vec![0, 2, 3, 1], &g).unwrap();
        let (arrival, feasible) = propagate(&late, &g);
        assert_eq!(arrival, vec![0.0, 4.0, 11.0, 0.0]);
        assert!(!feasible);
        assert!(matches!(
            late.first_violation(&g),
            Some(ModelError::Infeasible {
                position: 2,
                id: 2,
                ..
            })
        ));
        let fine = GiantTour::new(vec![0, 3, 1, 2], &g).unwrap();
        assert!(fine.is_feasible());
        assert_eq!(fine.path_index(), &[0, 0, 1, 1]);
        assert_eq!(fine.paths(&g), vec![vec![3], vec![2]]);
    }

    #[test]
    fn rejects_bad_orders() {
        let g = single(0.0, 20.0);
        assert_eq!(
            GiantTour::new(vec![1, 0], &g),
            Err(ModelError::MissingLeadingDepot)
        );
        assert_eq!(
            GiantTour::new(vec![0, 0], &g),
            Err(ModelError::NotPermutation(0))
        );
        assert_eq!(
            GiantTour::new(vec![0], &g),
            Err(ModelError::WrongLength {
                got: 1,
                expected: 2
            })
        );
    }
}
