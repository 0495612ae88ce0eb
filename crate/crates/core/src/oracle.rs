//! Exact TOPTW by exhaustive enumeration, for instances with a handful of
//! customers.
//!
//! Every feasible visiting sequence is enumerated depth-first from the depot,
//! pruning a sequence as soon as one of its customers is reached late. The
//! best combination of at most `m` pairwise disjoint feasible customer sets
//! is then found by enumerating submasks.

use thiserror::Error;

use crate::instance::Instance;
use crate::model::{RouteSet, TIME_EPS};

/// Largest reachable-customer count accepted.
pub const MAX_CUSTOMERS: usize = 9;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{customers} reachable customers exceed the cap of {cap}")]
    TooLarge { customers: usize, cap: usize },
    #[error("customer cap {0} is above the supported maximum of {MAX_CUSTOMERS}")]
    CapTooLarge(usize),
    #[error("fleet size must be at least 1")]
    NoVehicles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub optimal_prize: f64,
    pub optimal_routes: RouteSet,
    /// Feasible sequences plus set combinations examined.
    pub explored: u64,
}

pub fn brute_force(
    instance: &Instance,
    m: usize,
    customer_cap: usize,
) -> Result<ExactResult, OracleError> {
    if customer_cap > MAX_CUSTOMERS {
        return Err(OracleError::CapTooLarge(customer_cap));
    }
    if m == 0 {
        return Err(OracleError::NoVehicles);
    }
    let customers: Vec<usize> = instance.reachable_customers().collect();
    let k = customers.len();
    if k > customer_cap {
        return Err(OracleError::TooLarge {
            customers: k,
            cap: customer_cap,
        });
    }

    let mut search = Sequences {
        instance,
        customers: &customers,
        route_of: vec![None; 1 << k],
        stack: Vec::with_capacity(k),
        explored: 0,
    };
    search.extend(0, 0, 0.0);
    let Sequences {
        route_of,
        mut explored,
        ..
    } = search;

    let prize_of: Vec<f64> = (0..1usize << k)
        .map(|mask| {
            (0..k)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| instance.node(customers[b]).prize)
                .sum()
        })
        .collect();
    let full = (1usize << k) - 1;
    let paths = m.min(k.max(1));
    // best[j][s]: top prize of at most j disjoint feasible sets inside s
    let mut best = vec![vec![0.0f64; 1 << k]; paths + 1];
    let mut pick = vec![vec![0usize; 1 << k]; paths + 1];
    for j in 1..=paths {
        for s in 0..=full {
            let (mut top, mut arg) = (best[j - 1][s], 0);
            // non-empty submasks containing the lowest bit of s
            if s != 0 {
                let low = s & s.wrapping_neg();
                let rest = s ^ low;
                let mut sub = rest;
                loop {
                    let t = sub | low;
                    explored += 1;
                    if route_of[t].is_some() {
                        let v = prize_of[t] + best[j - 1][s ^ t];
                        if v > top {
                            top = v;
                            arg = t;
                        }
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & rest;
                }
                let without_low = best[j][rest];
                if without_low > top {
                    top = without_low;
                    arg = usize::MAX;
                }
            }
            best[j][s] = top;
            pick[j][s] = arg;
        }
    }

    let mut routes = Vec::new();
    let (mut j, mut s) = (paths, full);
    while j > 0 && s != 0 {
        match pick[j][s] {
            0 => j -= 1,
            usize::MAX => s &= s - 1,
            t => {
                let seq = route_of[t].as_ref().expect("picked sets are feasible");
                routes.push(seq.iter().map(|&b| customers[b]).collect::<Vec<_>>());
                s ^= t;
                j -= 1;
            }
        }
    }
    routes.resize(m, Vec::new());
    let total_prize = routes
        .iter()
        .flatten()
        .map(|&c| instance.node(c).prize)
        .sum();
    Ok(ExactResult {
        optimal_prize: best[paths][full],
        optimal_routes: RouteSet {
            routes,
            total_prize,
        },
        explored,
    })
}

struct Sequences<'a> {
    instance: &'a Instance,
    customers: &'a [usize],
    route_of: Vec<Option<Vec<usize>>>,
    stack: Vec<usize>,
    explored: u64,
}

impl Sequences<'_> {
    /// `time` is the service end at the last node of the current sequence.
    fn extend(&mut self, mask: usize, last: usize, time: f64) {
        self.explored += 1;
        if self.route_of[mask].is_none() {
            self.route_of[mask] = Some(self.stack.clone());
        }
        for b in 0..self.customers.len() {
            if mask >> b & 1 == 1 {
                continue;
            }
            let c = self.customers[b];
            let node = self.instance.node(c);
            let arrival = (time + self.instance.travel_time(last, c)).max(node.window_open);
            if arrival > node.window_close + TIME_EPS {
                continue;
            }
            self.stack.push(b);
            self.extend(mask | 1 << b, c, arrival + node.service_time);
            self.stack.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Node;

    fn node(id: usize, x: f64, prize: f64, open: f64, close: f64) -> Node {
        Node {
            id,
            x,
            y: 0.0,
            prize,
            window_open: open,
            window_close: close,
            service_time: 0.0,
        }
    }

    #[test]
    fn no_customers() {
        let inst = Instance::new("e", vec![node(0, 0.0, 0.0, 0.0, 0.0)]).unwrap();
        let r = brute_force(&inst, 2, 9).unwrap();
        assert_eq!(r.optimal_prize, 0.0);
        assert_eq!(r.optimal_routes.routes, vec![Vec::<usize>::new(); 2]);
    }

    #[test]
    fn single_customer() {
        let inst = Instance::new(
            "one",
            vec![node(0, 0.0, 0.0, 0.0, 0.0), node(1, 3.0, 7.0, 0.0, 10.0)],
        )
        .unwrap();
        for m in 1..4 {
            assert_eq!(brute_force(&inst, m, 9).unwrap().optimal_prize, 7.0);
        }
    }

    #[test]
    fn opposite_windows_need_two_vehicles() {
        // 1 and 2 lie on opposite sides and both close at time 5
        let inst = Instance::new(
            "two",
            vec![
                node(0, 0.0, 0.0, 0.0, 0.0),
                node(1, 4.0, 3.0, 0.0, 5.0),
                node(2, -4.0, 5.0, 0.0, 5.0),
            ],
        )
        .unwrap();
        assert_eq!(brute_force(&inst, 1, 9).unwrap().optimal_prize, 5.0);
        let two = brute_force(&inst, 2, 9).unwrap();
        assert_eq!(two.optimal_prize, 8.0);
        assert_eq!(two.optimal_routes.total_prize, 8.0);
    }

    #[test]
    fn size_limits() {
        let inst = Instance::new(
            "one",
            vec![node(0, 0.0, 0.0, 0.0, 0.0), node(1, 3.0, 7.0, 0.0, 10.0)],
        )
        .unwrap();
        assert_eq!(
            brute_force(&inst, 1, 0),
            Err(OracleError::TooLarge {
                customers: 1,
                cap: 0
            })
        );
        assert_eq!(brute_force(&inst, 1, 10), Err(OracleError::CapTooLarge(10)));
        assert_eq!(brute_force(&inst, 0, 9), Err(OracleError::NoVehicles));
    }
}
