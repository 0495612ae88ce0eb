//! Instance data model and parsers for the Solomon and Cordeau benchmark layouts.
//!
//! Node 0 is always the depot. It stands for both the start and the end of
//! every path, so its window is `[0, horizon]` and it carries no prize or
//! service time. Customers are `1..=num_customers()` in file order.
//!
//! Travel times are plain Euclidean distances in full double precision;
//! nothing is rounded or truncated.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Identifier as written in the source file.
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub prize: f64,
    pub window_open: f64,
    pub window_close: f64,
    pub service_time: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("instance has no depot node")]
    NoDepot,
    #[error("node {id}: window [{open}, {close}] is empty")]
    EmptyWindow { id: usize, open: f64, close: f64 },
    #[error("node {id}: {field} must be finite and non-negative, got {value}")]
    BadValue {
        id: usize,
        field: &'static str,
        value: f64,
    },
    #[error("node {id}: coordinates must be finite")]
    BadCoordinates { id: usize },
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("node limit {requested} exceeds the {available} customers in the file")]
    NodeLimit { requested: usize, available: usize },
    #[error("unexpected end of input: {0}")]
    Truncated(&'static str),
    #[error(transparent)]
    Invalid(#[from] InstanceError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// A validated TOPTW instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    nodes: Vec<Node>,
    horizon: f64,
    travel: Vec<f64>,
}

impl Instance {
    /// Builds an instance from a depot (first element) and its customers.
    ///
    /// The depot's prize, service time and window are overwritten so that it
    /// matches the path endpoints: prize 0, service 0, window `[0, horizon]`,
    /// where `horizon = max_i (b_i + s_i + t_i0)` over customers (0 when there
    /// are none).
    pub fn new(name: impl Into<String>, mut nodes: Vec<Node>) -> Result<Self, InstanceError> {
        if nodes.is_empty() {
            return Err(InstanceError::NoDepot);
        }
        for node in &nodes {
            if !node.x.is_finite() || !node.y.is_finite() {
                return Err(InstanceError::BadCoordinates { id: node.id });
            }
            for (field, value) in [
                ("prize", node.prize),
                ("service time", node.service_time),
                ("window open", node.window_open),
            ] {
                if !value.is_finite() || value < 0.0 {
                    return Err(InstanceError::BadValue {
                        id: node.id,
                        field,
                        value,
                    });
                }
            }
            if node.window_close.is_nan() || node.window_open > node.window_close {
                return Err(InstanceError::EmptyWindow {
                    id: node.id,
                    open: node.window_open,
                    close: node.window_close,
                });
            }
        }

        let n = nodes.len();
        let mut travel = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean(&nodes[i], &nodes[j]);
                travel[i * n + j] = d;
                travel[j * n + i] = d;
            }
        }

        let horizon = (1..n)
            .map(|i| nodes[i].window_close + nodes[i].service_time + travel[i * n])
            .fold(0.0, f64::max);
        if !horizon.is_finite() {
            let id = nodes[1..]
                .iter()
                .find(|c| !c.window_close.is_finite())
                .map_or(0, |c| c.id);
            return Err(InstanceError::BadValue {
                id,
                field: "window close",
                value: f64::INFINITY,
            });
        }

        let depot = &mut nodes[0];
        depot.prize = 0.0;
        depot.service_time = 0.0;
        depot.window_open = 0.0;
        depot.window_close = horizon;

        Ok(Instance {
            name: name.into(),
            nodes,
            horizon,
            travel,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn depot(&self) -> &Node {
        &self.nodes[0]
    }

    /// Number of nodes including the depot.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num_customers() == 0
    }

    pub fn num_customers(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Planning horizon `T`: the latest time any path can end at the depot.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    #[inline]
    pub fn travel_time(&self, i: usize, j: usize) -> f64 {
        self.travel[i * self.nodes.len() + j]
    }

    /// Whether customer `i` can be served at all, i.e. `t_0i <= b_i`.
    /// Unreachable customers stay in the instance but are never routed.
    pub fn is_reachable(&self, i: usize) -> bool {
        i != 0 && self.travel_time(0, i) <= self.nodes[i].window_close
    }

    pub fn reachable_customers(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.nodes.len()).filter(move |&i| self.is_reachable(i))
    }

    /// Sum of all customer prizes.
    pub fn total_prize(&self) -> f64 {
        self.nodes[1..].iter().map(|c| c.prize).sum()
    }

    /// Index of the node carrying file identifier `id`.
    pub fn index_of_id(&self, id: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Canonical text dump in the Solomon layout. Parsing it back with
    /// [`parse_solomon`] reproduces this instance exactly.
    pub fn to_solomon_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.name);
        out.push_str("\nVEHICLE\nNUMBER     CAPACITY\n  1          0\n\nCUSTOMER\n");
        out.push_str(
            "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME\n\n",
        );
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {} {}",
                n.id, n.x, n.y, n.prize, n.window_open, n.window_close, n.service_time
            );
        }
        out
    }
}

fn euclidean(a: &Node, b: &Node) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Which benchmark layout a file uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceFormat {
    SolomonDerived,
    CordeauDerived,
}

impl InstanceFormat {
    pub fn parse(
        self,
        name: &str,
        text: &str,
        node_limit: Option<usize>,
    ) -> Result<Instance, ParseError> {
        match self {
            InstanceFormat::SolomonDerived => parse_solomon_named(name, text, node_limit),
            InstanceFormat::CordeauDerived => parse_cordeau_named(name, text, node_limit),
        }
    }
}

impl FromStr for InstanceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "solomon" => Ok(InstanceFormat::SolomonDerived),
            "cordeau" => Ok(InstanceFormat::CordeauDerived),
            other => Err(format!(
                "unknown format `{other}` (expected solomon or cordeau)"
            )),
        }
    }
}

/// Reads and parses an instance file. The instance is named after the file
/// stem; for Solomon files with a node limit the limit is appended
/// (`c101_50`).
pub fn load(
    path: &Path,
    format: InstanceFormat,
    node_limit: Option<usize>,
) -> Result<Instance, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".to_string());
    let name = match node_limit {
        Some(k) => format!("{stem}_{k}"),
        None => stem,
    };
    format.parse(&name, &text, node_limit)
}

fn malformed(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Malformed {
        line,
        message: message.into(),
    }
}

fn numbers(line_no: usize, line: &str) -> Result<Vec<f64>, ParseError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| malformed(line_no, format!("`{tok}` is not a number")))
        })
        .collect()
}

fn as_id(line_no: usize, value: f64) -> Result<usize, ParseError> {
    if value >= 0.0 && value.fract() == 0.0 {
        Ok(value as usize)
    } else {
        Err(malformed(
            line_no,
            format!("`{value}` is not a valid node id"),
        ))
    }
}

/// Parses a Solomon VRPTW file. The first customer row is the depot; each
/// customer's demand becomes its prize. With `node_limit = Some(k)` only the
/// first `k` customers after the depot are kept.
pub fn parse_solomon(text: &str, node_limit: Option<usize>) -> Result<Instance, ParseError> {
    let name = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("")
        .to_string();
    parse_solomon_named(&name, text, node_limit)
}

fn parse_solomon_named(
    name: &str,
    text: &str,
    node_limit: Option<usize>,
) -> Result<Instance, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let mut seen_name = false;
    loop {
        let (no, line) = lines
            .next()
            .ok_or(ParseError::Truncated("missing VEHICLE block"))?;
        if line.is_empty() {
            continue;
        }
        if line.eq_ignore_ascii_case("VEHICLE") {
            break;
        }
        if seen_name {
            return Err(malformed(no, format!("expected `VEHICLE`, found `{line}`")));
        }
        seen_name = true;
    }

    // NUMBER / CAPACITY header followed by one row of two numbers.
    let (no, header) = next_nonempty(&mut lines, "missing vehicle header")?;
    if !header.to_ascii_uppercase().starts_with("NUMBER") {
        return Err(malformed(no, "expected `NUMBER CAPACITY` header"));
    }
    let (no, fleet) = next_nonempty(&mut lines, "missing vehicle data")?;
    if numbers(no, fleet)?.len() != 2 {
        return Err(malformed(no, "vehicle row must hold NUMBER and CAPACITY"));
    }

    let (no, line) = next_nonempty(&mut lines, "missing CUSTOMER block")?;
    if !line.eq_ignore_ascii_case("CUSTOMER") {
        return Err(malformed(
            no,
            format!("expected `CUSTOMER`, found `{line}`"),
        ));
    }
    let (no, header) = next_nonempty(&mut lines, "missing customer header")?;
    if !header.to_ascii_uppercase().starts_with("CUST") {
        return Err(malformed(no, "expected customer table header"));
    }

    let mut nodes = Vec::new();
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let v = numbers(no, line)?;
        if v.len() != 7 {
            return Err(malformed(
                no,
                format!("customer row has {} fields, expected 7", v.len()),
            ));
        }
        nodes.push(Node {
            id: as_id(no, v[0])?,
            x: v[1],
            y: v[2],
            prize: v[3],
            window_open: v[4],
            window_close: v[5],
            service_time: v[6],
        });
    }
    if nodes.is_empty() {
        return Err(ParseError::Truncated("customer table has no depot row"));
    }
    apply_limit(&mut nodes, node_limit)?;
    Ok(Instance::new(name, nodes)?)
}

fn next_nonempty<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    what: &'static str,
) -> Result<(usize, &'a str), ParseError> {
    lines
        .find(|(_, l)| !l.is_empty())
        .ok_or(ParseError::Truncated(what))
}

fn apply_limit(nodes: &mut Vec<Node>, node_limit: Option<usize>) -> Result<(), ParseError> {
    if let Some(k) = node_limit {
        let available = nodes.len() - 1;
        if k > available {
            return Err(ParseError::NodeLimit {
                requested: k,
                available,
            });
        }
        nodes.truncate(k + 1);
    }
    Ok(())
}

/// Parses a Cordeau multi-depot/periodic file (`pr01`–`pr20` layout).
///
/// Layout: a `type m n t` header, `t` lines of `D Q`, then one row per node:
/// `i x y d q f a <a visit combinations> [e l]`. `d` is the service duration
/// and the demand `q` becomes the prize. Frequency and visit-combination
/// fields are ignored: every customer is active on the same day.
///
/// The depot is either a leading row with id 0 or, in the original
/// multi-depot files, the first of the `t` depot rows that follow the
/// customers. Rows without window columns get the window `[0, D]` of the
/// first `D Q` line.
pub fn parse_cordeau(text: &str) -> Result<Instance, ParseError> {
    parse_cordeau_named("", text, None)
}

fn parse_cordeau_named(
    name: &str,
    text: &str,
    node_limit: Option<usize>,
) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (no, header) = lines
        .next()
        .ok_or(ParseError::Truncated("missing header"))?;
    let h = numbers(no, header)?;
    if h.len() < 4 {
        return Err(malformed(no, "header must be `type m n t`"));
    }
    let n_customers = as_id(no, h[2])?;
    let n_days = as_id(no, h[3])?.max(1);

    let mut max_duration = None;
    for _ in 0..n_days {
        let (no, line) = lines
            .next()
            .ok_or(ParseError::Truncated("missing D Q lines"))?;
        let v = numbers(no, line)?;
        if v.len() != 2 {
            return Err(malformed(no, "expected `D Q` line"));
        }
        max_duration.get_or_insert(v[0]);
    }
    let max_duration = max_duration.unwrap_or(0.0);

    let rows: Vec<(usize, Vec<f64>)> = lines
        .map(|(no, line)| numbers(no, line).map(|v| (no, v)))
        .collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Err(ParseError::Truncated("no node rows"));
    }

    let depot_first = rows[0].1.first() == Some(&0.0);
    let (depot_row, customer_rows) = if depot_first {
        if rows.len() < n_customers + 1 {
            return Err(ParseError::Truncated("fewer customer rows than announced"));
        }
        (&rows[0], &rows[1..=n_customers])
    } else {
        if rows.len() < n_customers + 1 {
            return Err(ParseError::Truncated("missing depot rows"));
        }
        (&rows[n_customers], &rows[..n_customers])
    };

    let mut nodes = Vec::with_capacity(n_customers + 1);
    nodes.push(cordeau_node(depot_row, true, max_duration)?);
    for row in customer_rows {
        nodes.push(cordeau_node(row, false, max_duration)?);
    }
    apply_limit(&mut nodes, node_limit)?;
    Ok(Instance::new(name, nodes)?)
}

fn cordeau_node(
    (no, v): &(usize, Vec<f64>),
    is_depot: bool,
    max_duration: f64,
) -> Result<Node, ParseError> {
    let no = *no;
    if v.len() < 7 {
        return Err(malformed(
            no,
            format!("row has {} fields, expected at least 7", v.len()),
        ));
    }
    let combos = as_id(no, v[6])?;
    let base = 7 + combos;
    let window = match v.len() {
        len if len == base + 2 => (v[base], v[base + 1]),
        len if len == base => {
            if !is_depot && max_duration <= 0.0 {
                return Err(malformed(
                    no,
                    "row has no time window and the file gives no route duration",
                ));
            }
            (0.0, max_duration)
        }
        len => {
            return Err(malformed(
                no,
                format!("row has {len} fields, expected {base} or {}", base + 2),
            ))
        }
    };
    Ok(Node {
        id: as_id(no, v[0])?,
        x: v[1],
        y: v[2],
        service_time: v[3],
        prize: v[4],
        window_open: window.0,
        window_close: window.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "TINY

VEHICLE
NUMBER     CAPACITY
  2          100

CUSTOMER
CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME

    0      0          0          0          0       1000          0
    1      3          4         10          0         20          5
    2      6          8         20         30         40          1
    3     30         40          5          0         10          0
";

    #[test]
    fn three_four_five() {
        let inst = parse_solomon(TINY, None).unwrap();
        assert_eq!(inst.travel_time(0, 1), 5.0);
        assert_eq!(inst.travel_time(1, 1), 0.0);
        assert_eq!(inst.travel_time(1, 2), 5.0);
    }

    #[test]
    fn depot_is_normalised() {
        let inst = parse_solomon(TINY, None).unwrap();
        assert_eq!(inst.name(), "TINY");
        assert_eq!(inst.num_customers(), 3);
        // max(20+5+5, 40+1+10, 10+0+50)
        assert_eq!(inst.horizon(), 60.0);
        let d = inst.depot();
        assert_eq!((d.window_open, d.window_close), (0.0, 60.0));
        assert_eq!(d.prize, 0.0);
    }

    #[test]
    fn unreachable_customer_is_kept_but_flagged() {
        let inst = parse_solomon(TINY, None).unwrap();
        assert!(inst.is_reachable(1));
        assert!(inst.is_reachable(2));
        assert!(!inst.is_reachable(3));
        assert_eq!(inst.reachable_customers().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn depot_only_file() {
        let text = TINY.split("    1 ").next().unwrap();
        let inst = parse_solomon(text, None).unwrap();
        assert_eq!(inst.num_customers(), 0);
        assert_eq!(inst.horizon(), 0.0);
    }

    #[test]
    fn node_limit() {
        let inst = parse_solomon(TINY, Some(1)).unwrap();
        assert_eq!(inst.num_customers(), 1);
        assert_eq!(inst.horizon(), 30.0);
        match parse_solomon(TINY, Some(4)) {
            Err(ParseError::NodeLimit {
                requested: 4,
                available: 3,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_row_names_line() {
        let bad = TINY.replace(
            "    2      6          8         20",
            "    2      6          x         20",
        );
        match parse_solomon(&bad, None) {
            Err(ParseError::Malformed { line: 12, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let short = TINY.replace(
            "30         40          5          0         10          0",
            "30 40",
        );
        match parse_solomon(&short, None) {
            Err(ParseError::Malformed { line: 13, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_header_is_reported() {
        let bad = TINY.replace("CUSTOMER\n", "CUSTOMERS\n");
        assert!(matches!(
            parse_solomon(&bad, None),
            Err(ParseError::Malformed { line: 7, .. })
        ));
        assert!(matches!(
            parse_solomon("C101\n", None),
            Err(ParseError::Truncated(_))
        ));
    }

    #[test]
    fn empty_window_rejected() {
        let bad = TINY.replace("30         40          1", "50         40          1");
        assert!(matches!(
            parse_solomon(&bad, None),
            Err(ParseError::Invalid(InstanceError::EmptyWindow {
                id: 2,
                ..
            }))
        ));
    }

    #[test]
    fn canonical_dump_round_trips() {
        let inst = parse_solomon(TINY, None).unwrap();
        let again = parse_solomon(&inst.to_solomon_text(), None).unwrap();
        assert_eq!(inst, again);
    }

    const CORDEAU_TW: &str = "6 1 3 1
  0  200
  0  -1.044   2.000  0  0  0  0    0  1000
  1 -29.730  64.136  2 12  1  4  1  2  4  8  399  525
  2 -30.664   5.463  7  8  1  4  1  2  4  8  121  299
  3  51.642   5.469 21 16  1  4  1  2  4  8  389  483
";

    const CORDEAU_MD: &str = "2 1 2 2
500 200
500 200
  1 -29.730  64.136  2 12 1 4 1 2 4 8
  2 -30.664   5.463  7  8 1 4 1 2 4 8
  3  21.387  17.105  0  0 0 0
  4 -36.118  49.097  0  0 0 0
";

    #[test]
    fn cordeau_with_windows() {
        let inst = parse_cordeau(CORDEAU_TW).unwrap();
        assert_eq!(inst.num_customers(), 3);
        let c1 = inst.node(1);
        assert_eq!((c1.service_time, c1.prize), (2.0, 12.0));
        assert_eq!((c1.window_open, c1.window_close), (399.0, 525.0));
        assert_eq!(inst.depot().id, 0);
    }

    #[test]
    fn cordeau_multi_depot_without_windows() {
        let inst = parse_cordeau(CORDEAU_MD).unwrap();
        assert_eq!(inst.num_customers(), 2);
        assert_eq!(inst.depot().id, 3);
        assert_eq!((inst.depot().x, inst.depot().y), (21.387, 17.105));
        let c2 = inst.node(2);
        assert_eq!((c2.window_open, c2.window_close), (0.0, 500.0));
        assert_eq!((c2.service_time, c2.prize), (7.0, 8.0));
    }

    #[test]
    fn cordeau_bad_field_count() {
        let bad = CORDEAU_TW.replace("399  525", "399");
        assert!(matches!(
            parse_cordeau(&bad),
            Err(ParseError::Malformed { line: 4, .. })
        ));
    }

    #[test]
    fn format_from_str() {
        assert_eq!(
            "Solomon".parse::<InstanceFormat>(),
            Ok(InstanceFormat::SolomonDerived)
        );
        assert_eq!(
            "cordeau".parse::<InstanceFormat>(),
            Ok(InstanceFormat::CordeauDerived)
        );
        assert!("tsplib".parse::<InstanceFormat>().is_err());
    }
}
