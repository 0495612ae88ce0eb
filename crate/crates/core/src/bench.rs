//! Run reports, suite aggregation, CSV output and solution files.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;
use crate::model::{RouteSet, TIME_EPS};

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub m: usize,
    pub seed: u64,
    /// First-`m` prize of the best tour.
    pub prize: f64,
    /// Customers served by the first `m` paths of the best tour.
    pub nodes: usize,
    pub found_at_s: f64,
    pub elapsed_s: f64,
    pub generations: u64,
}

/// One CSV row: a report tagged with its run number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub instance: String,
    pub m: usize,
    pub run: usize,
    pub seed: u64,
    pub prize: f64,
    pub nodes: usize,
    pub found_at_s: f64,
    pub elapsed_s: f64,
    pub generations: u64,
}

impl CsvRow {
    pub fn new(run: usize, r: &RunReport) -> Self {
        CsvRow {
            instance: r.instance.clone(),
            m: r.m,
            run,
            seed: r.seed,
            prize: r.prize,
            nodes: r.nodes,
            found_at_s: r.found_at_s,
            elapsed_s: r.elapsed_s,
            generations: r.generations,
        }
    }

    pub fn report(&self) -> RunReport {
        RunReport {
            instance: self.instance.clone(),
            m: self.m,
            seed: self.seed,
            prize: self.prize,
            nodes: self.nodes,
            found_at_s: self.found_at_s,
            elapsed_s: self.elapsed_s,
            generations: self.generations,
        }
    }
}

pub fn write_csv<W: io::Write>(out: W, rows: &[CsvRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<CsvRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Statistics of the runs on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub instance: String,
    pub m: usize,
    pub runs: usize,
    pub prize_min: f64,
    pub prize_avg: f64,
    pub prize_max: f64,
    /// Customers served by the best run.
    pub best_nodes: usize,
    pub time_min: f64,
    pub time_avg: f64,
    pub time_max: f64,
}

impl InstanceSummary {
    /// Panics if `runs` is empty.
    pub fn from_runs(runs: &[RunReport]) -> Self {
        assert!(!runs.is_empty(), "no runs to summarise");
        let n = runs.len() as f64;
        let prizes = runs.iter().map(|r| r.prize);
        let times = runs.iter().map(|r| r.found_at_s);
        let best = runs
            .iter()
            .fold(&runs[0], |b, r| if r.prize > b.prize { r } else { b });
        InstanceSummary {
            instance: runs[0].instance.clone(),
            m: runs[0].m,
            runs: runs.len(),
            prize_min: prizes.clone().fold(f64::INFINITY, f64::min),
            prize_avg: prizes.clone().sum::<f64>() / n,
            prize_max: prizes.fold(f64::NEG_INFINITY, f64::max),
            best_nodes: best.nodes,
            time_min: times.clone().fold(f64::INFINITY, f64::min),
            time_avg: times.clone().sum::<f64>() / n,
            time_max: times.fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Aggregates for a whole suite, plus the instances that could not be run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub summaries: Vec<InstanceSummary>,
    pub failures: Vec<(String, String)>,
}

impl SuiteReport {
    /// Groups rows by (instance, m) in order of first appearance.
    pub fn from_rows(rows: &[CsvRow]) -> Self {
        let mut keys: Vec<(String, usize)> = Vec::new();
        for r in rows {
            let key = (r.instance.clone(), r.m);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let summaries = keys
            .into_iter()
            .map(|(name, m)| {
                let runs: Vec<RunReport> = rows
                    .iter()
                    .filter(|r| r.instance == name && r.m == m)
                    .map(CsvRow::report)
                    .collect();
                InstanceSummary::from_runs(&runs)
            })
            .collect();
        SuiteReport {
            summaries,
            failures: Vec::new(),
        }
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<16} {:>3} {:>4} {:>9} {:>9} {:>9} {:>6} {:>9} {:>9} {:>9}",
            "instance", "m", "runs", "min", "avg", "max", "nodes", "t_min", "t_avg", "t_max"
        );
        for r in &self.summaries {
            let _ = writeln!(
                s,
                "{:<16} {:>3} {:>4} {:>9.1} {:>9.1} {:>9.1} {:>6} {:>9.2} {:>9.2} {:>9.2}",
                r.instance,
                r.m,
                r.runs,
                r.prize_min,
                r.prize_avg,
                r.prize_max,
                format!("({})", r.best_nodes),
                r.time_min,
                r.time_avg,
                r.time_max
            );
        }
        for (name, err) in &self.failures {
            let _ = writeln!(s, "{name:<16} FAILED: {err}");
        }
        s
    }
}

/// A route listing as read from a solution file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Solution {
    /// Customer ids of each route.
    pub routes: Vec<Vec<usize>>,
    /// Value of a `# prize` comment, if present.
    pub claimed_prize: Option<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SolutionError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// One route per line, customer ids separated by spaces; empty routes are
/// written as empty lines. A trailing comment carries the prize.
pub fn format_solution(instance: &Instance, routes: &RouteSet) -> String {
    let mut s = format!("# instance {}\n", instance.name());
    for route in &routes.routes {
        let ids: Vec<String> = route
            .iter()
            .map(|&c| instance.node(c).id.to_string())
            .collect();
        s.push_str(&ids.join(" "));
        s.push('\n');
    }
    let _ = writeln!(s, "# prize {}", routes.total_prize);
    s
}

/// Blank lines and comments other than `# prize` are ignored.
pub fn parse_solution(text: &str) -> Result<Solution, SolutionError> {
    let mut sol = Solution::default();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let malformed = |message: String| SolutionError::Malformed {
            line: k + 1,
            message,
        };
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("prize") {
                let v = v.trim();
                sol.claimed_prize = Some(
                    v.parse()
                        .map_err(|_| malformed(format!("bad prize {v:?}")))?,
                );
            }
            continue;
        }
        let route = line
            .split_whitespace()
            .map(|f| {
                f.parse()
                    .map_err(|_| malformed(format!("bad customer id {f:?}")))
            })
            .collect::<Result<Vec<usize>, _>>()?;
        sol.routes.push(route);
    }
    Ok(sol)
}

#[derive(Debug, Error, PartialEq)]
pub enum Violation {
    #[error("route {route}: unknown customer id {id}")]
    UnknownCustomer { route: usize, id: usize },
    #[error("route {route}: the depot (id {id}) cannot be visited inside a route")]
    DepotInRoute { route: usize, id: usize },
    #[error("customer {id} is visited more than once")]
    Repeated { id: usize },
    #[error("route {route}: customer {id} is served at {arrival:.3}, after its window closes at {close:.3}")]
    LateArrival {
        route: usize,
        id: usize,
        arrival: f64,
        close: f64,
    },
    #[error("route {route} returns to the depot at {arrival:.3}, after the horizon {horizon:.3}")]
    LateReturn {
        route: usize,
        arrival: f64,
        horizon: f64,
    },
    #[error("{routes} non-empty routes exceed the fleet size {m}")]
    TooManyRoutes { routes: usize, m: usize },
    #[error("claimed prize {claimed} differs from the verified prize {verified}")]
    PrizeMismatch { claimed: f64, verified: f64 },
}

/// Re-checks a solution against `instance` and returns its prize. Routes are
/// numbered from 1 in messages.
pub fn validate_solution(
    instance: &Instance,
    solution: &Solution,
    m: Option<usize>,
) -> Result<f64, Violation> {
    let used = solution.routes.iter().filter(|r| !r.is_empty()).count();
    if let Some(m) = m {
        if used > m {
            return Err(Violation::TooManyRoutes { routes: used, m });
        }
    }
    let mut seen = HashSet::new();
    let mut total = 0.0;
    for (r, route) in solution.routes.iter().enumerate() {
        let route_no = r + 1;
        let mut last = 0;
        let mut time = 0.0;
        for &id in route {
            let c = instance.index_of_id(id).ok_or(Violation::UnknownCustomer {
                route: route_no,
                id,
            })?;
            if c == 0 {
                return Err(Violation::DepotInRoute {
                    route: route_no,
                    id,
                });
            }
            if !seen.insert(c) {
                return Err(Violation::Repeated { id });
            }
            let node = instance.node(c);
            let prev = instance.node(last);
            time = (time + prev.service_time + instance.travel_time(last, c)).max(node.window_open);
            if time > node.window_close + TIME_EPS {
                return Err(Violation::LateArrival {
                    route: route_no,
                    id,
                    arrival: time,
                    close: node.window_close,
                });
            }
            total += node.prize;
            last = c;
        }
        if last != 0 {
            let back = time + instance.node(last).service_time + instance.travel_time(last, 0);
            if back > instance.horizon() + TIME_EPS {
                return Err(Violation::LateReturn {
                    route: route_no,
                    arrival: back,
                    horizon: instance.horizon(),
                });
            }
        }
    }
    if let Some(claimed) = solution.claimed_prize {
        if (claimed - total).abs() > 1e-6 * total.abs().max(1.0) {
            return Err(Violation::PrizeMismatch {
                claimed,
                verified: total,
            });
        }
    }
    Ok(total)
}
