#![allow(dead_code)]

use rand::Rng;
use toptw::acs::{self, AcsParams, PheromoneMatrix};
use toptw::instance::{Instance, Node};
use toptw::model::{ExpandedGraph, GiantTour};

/// Random instance with `k` customers on a 100 x 100 grid, Solomon-like
/// prizes, service times and windows.
pub fn random_instance<R: Rng>(rng: &mut R, k: usize, name: &str) -> Instance {
    let mut nodes = vec![Node {
        id: 0,
        x: 50.0,
        y: 50.0,
        prize: 0.0,
        window_open: 0.0,
        window_close: 0.0,
        service_time: 0.0,
    }];
    for id in 1..=k {
        let x = rng.gen_range(0.0..100.0f64).round();
        let y = rng.gen_range(0.0..100.0f64).round();
        let center = rng.gen_range(20.0..200.0f64).round();
        let half = rng.gen_range(5.0..60.0f64).round();
        nodes.push(Node {
            id,
            x,
            y,
            prize: rng.gen_range(1..=5) as f64 * 10.0,
            window_open: (center - half).max(0.0),
            window_close: center + half,
            service_time: [0.0, 5.0, 10.0][rng.gen_range(0..3)],
        });
    }
    Instance::new(name, nodes).unwrap()
}

/// A feasible tour built with fully random choices.
pub fn random_tour<R: Rng>(graph: &ExpandedGraph, rng: &mut R) -> GiantTour {
    let mut p = PheromoneMatrix::new(graph.expanded_size().max(1), 1.0);
    let params = AcsParams {
        nhat: 1e9,
        ..AcsParams::default()
    };
    acs::construct(graph, &mut p, &params, rng)
}

/// Order with every depot copy replaced by the same marker.
pub fn shape(order: &[usize], graph: &ExpandedGraph) -> Vec<Option<usize>> {
    order
        .iter()
        .map(|&v| (!graph.is_depot(v)).then_some(v))
        .collect()
}

/// Path of a file under the repository's `data/` directory.
pub fn data_path(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
}

/// Every line of a file that consists of exactly `fields` numbers.
pub fn numeric_rows(rel: &str, fields: usize) -> Vec<Vec<f64>> {
    std::fs::read_to_string(data_path(rel))
        .unwrap()
        .lines()
        .filter_map(|l| {
            let v: Result<Vec<f64>, _> = l.split_whitespace().map(str::parse).collect();
            v.ok().filter(|v| v.len() == fields)
        })
        .collect()
}

/// Tour whose leading paths hold the given instance customers in order.
pub fn tour_from_paths(graph: &ExpandedGraph, paths: &[&[usize]]) -> GiantTour {
    let mut depots = 0..graph.depot_copies();
    let mut order = Vec::new();
    for p in paths {
        order.push(depots.next().unwrap());
        order.extend(p.iter().map(|&c| graph.expanded_of(c).unwrap()));
    }
    order.extend(depots);
    GiantTour::new(order, graph).unwrap()
}

/// Node with no service time.
pub fn node(id: usize, x: f64, y: f64, prize: f64, open: f64, close: f64) -> Node {
    Node {
        id,
        x,
        y,
        prize,
        window_open: open,
        window_close: close,
        service_time: 0.0,
    }
}
