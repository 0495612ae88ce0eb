mod common;

use common::{data_path, node, numeric_rows};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toptw::instance::{self, parse_cordeau, parse_solomon, Instance, InstanceFormat, ParseError};

fn dist(a: &[f64], b: &[f64]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Horizon recomputed from raw Solomon rows `[id, x, y, q, a, b, s]`.
fn raw_horizon(rows: &[Vec<f64>]) -> f64 {
    rows[1..]
        .iter()
        .map(|r| r[5] + r[6] + dist(&r[1..3], &rows[0][1..3]))
        .fold(0.0, f64::max)
}

fn c101() -> Instance {
    instance::load(
        &data_path("solomon/c101.txt"),
        InstanceFormat::SolomonDerived,
        None,
    )
    .unwrap()
}

#[test]
fn c101_golden() {
    let inst = c101();
    assert_eq!(inst.num_customers(), 100);
    assert_eq!(inst.name(), "c101");
    let rows = numeric_rows("solomon/c101.txt", 7);
    assert_eq!(rows.len(), 101);
    assert!((inst.horizon() - raw_horizon(&rows)).abs() < 1e-9);
    for (n, r) in inst.nodes().iter().zip(&rows).skip(1) {
        assert_eq!(n.prize, r[3]);
        assert_eq!(
            (n.window_open, n.window_close, n.service_time),
            (r[4], r[5], r[6])
        );
    }
    let depot = inst.depot();
    assert_eq!((depot.prize, depot.window_open), (0.0, 0.0));
    assert_eq!(depot.window_close, inst.horizon());
}

#[test]
fn node_limit_keeps_leading_customers() {
    let inst = instance::load(
        &data_path("solomon/c101.txt"),
        InstanceFormat::SolomonDerived,
        Some(5),
    )
    .unwrap();
    assert_eq!(inst.num_customers(), 5);
    assert_eq!(inst.name(), "c101_5");
    let rows = numeric_rows("solomon/c101.txt", 7);
    assert!((inst.horizon() - raw_horizon(&rows[..6])).abs() < 1e-9);
}

#[test]
fn node_limit_beyond_file() {
    let text = std::fs::read_to_string(data_path("solomon/c101.txt")).unwrap();
    assert!(matches!(
        parse_solomon(&text, Some(101)),
        Err(ParseError::NodeLimit {
            requested: 101,
            available: 100
        })
    ));
}

#[test]
fn depot_only_file() {
    let text =
        "D\n\nVEHICLE\nNUMBER CAPACITY\n 1 10\n\nCUSTOMER\nCUST NO. XCOORD.\n\n 0 1 2 0 0 50 0\n";
    let inst = parse_solomon(text, None).unwrap();
    assert_eq!(inst.num_customers(), 0);
    assert_eq!(inst.horizon(), 0.0);
}

#[test]
fn malformed_row_names_line() {
    let text = "D\n\nVEHICLE\nNUMBER CAPACITY\n 1 10\n\nCUSTOMER\nCUST NO. XCOORD.\n\n 0 1 2 0 0 50 0\n 1 1 x 0 0 50 0\n";
    let err = parse_solomon(text, None).unwrap_err();
    assert!(
        matches!(err, ParseError::Malformed { line: 11, .. }),
        "{err}"
    );
    assert!(err.to_string().starts_with("line 11:"));
}

#[test]
fn cordeau_counts() {
    for (file, customers) in [("cordeau/pr01.txt", 48), ("cordeau/pr06.txt", 288)] {
        let inst = instance::load(&data_path(file), InstanceFormat::CordeauDerived, None).unwrap();
        assert_eq!(inst.num_customers(), customers, "{file}");
    }
}

#[test]
fn pr01_rows_match_file() {
    let text = std::fs::read_to_string(data_path("cordeau/pr01.txt")).unwrap();
    let inst = parse_cordeau(&text).unwrap();
    let lines: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .filter(|v: &Vec<f64>| !v.is_empty())
        .collect();
    let duration = lines[1][0];
    let customers = &lines[5..53];
    for (n, r) in inst.nodes()[1..].iter().zip(customers) {
        assert_eq!(n.id as f64, r[0]);
        assert_eq!(
            (n.x, n.y, n.service_time, n.prize),
            (r[1], r[2], r[3], r[4])
        );
        assert!(n.window_open <= n.window_close, "customer {}", n.id);
        assert_eq!((n.window_open, n.window_close), (0.0, duration));
    }
    let depot = &lines[53];
    assert_eq!((inst.depot().x, inst.depot().y), (depot[1], depot[2]));
}

#[test]
fn every_file_respects_horizon() {
    for (dir, format) in [
        ("solomon", InstanceFormat::SolomonDerived),
        ("cordeau", InstanceFormat::CordeauDerived),
    ] {
        for entry in std::fs::read_dir(data_path(dir)).unwrap() {
            let path = entry.unwrap().path();
            let inst = instance::load(&path, format, None).unwrap();
            assert!(inst.num_customers() > 0);
            for n in &inst.nodes()[1..] {
                assert!(inst.horizon() >= n.window_close, "{}", path.display());
            }
        }
    }
}

#[test]
fn travel_examples() {
    let inst = Instance::new(
        "t",
        vec![
            node(0, 0.0, 0.0, 0.0, 0.0, 0.0),
            node(1, 3.0, 4.0, 1.0, 0.0, 100.0),
        ],
    )
    .unwrap();
    assert_eq!(inst.travel_time(0, 1), 5.0);
    assert_eq!(inst.travel_time(1, 1), 0.0);

    let inst = c101();
    let rows = numeric_rows("solomon/c101.txt", 7);
    assert_eq!(inst.travel_time(1, 2), dist(&rows[1][1..3], &rows[2][1..3]));
    for i in 0..inst.len() {
        assert_eq!(inst.travel_time(i, i), 0.0);
    }
}

#[test]
fn travel_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for inst in [
        c101(),
        instance::load(
            &data_path("cordeau/pr06.txt"),
            InstanceFormat::CordeauDerived,
            None,
        )
        .unwrap(),
    ] {
        for _ in 0..1000 {
            let i = rng.gen_range(0..inst.len());
            let j = rng.gen_range(0..inst.len());
            assert_eq!(inst.travel_time(i, j), inst.travel_time(j, i));
            assert!(inst.travel_time(i, j) >= 0.0);
        }
    }
}

#[test]
fn unreachable_customer_is_kept_but_flagged() {
    // t_01 = 4 but the window closes at 3
    let inst = Instance::new(
        "u",
        vec![
            node(0, 0.0, 0.0, 0.0, 0.0, 0.0),
            node(1, 4.0, 0.0, 5.0, 0.0, 3.0),
            node(2, 1.0, 0.0, 5.0, 0.0, 3.0),
        ],
    )
    .unwrap();
    assert_eq!(inst.num_customers(), 2);
    assert!(!inst.is_reachable(1));
    assert!(inst.is_reachable(2));
    assert_eq!(inst.reachable_customers().collect::<Vec<_>>(), vec![2]);
}

#[test]
fn format_names() {
    assert_eq!("solomon".parse(), Ok(InstanceFormat::SolomonDerived));
    assert_eq!("Cordeau".parse(), Ok(InstanceFormat::CordeauDerived));
    assert!("csv".parse::<InstanceFormat>().is_err());
}

fn arb_instance() -> impl Strategy<Value = Instance> {
    let customer = (
        -100.0..100.0f64,
        -100.0..100.0f64,
        0u32..50,
        0.0..500.0f64,
        0.0..200.0f64,
        0.0..20.0f64,
    );
    (
        proptest::collection::vec(customer, 0..12),
        -50.0..50.0f64,
        -50.0..50.0f64,
    )
        .prop_map(|(cs, dx, dy)| {
            let mut nodes = vec![node(0, dx, dy, 0.0, 0.0, 0.0)];
            for (k, (x, y, q, a, w, s)) in cs.into_iter().enumerate() {
                let mut n = node(k + 1, x, y, q as f64, a, a + w);
                n.service_time = s;
                nodes.push(n);
            }
            Instance::new("roundtrip", nodes).unwrap()
        })
}

proptest! {
    #[test]
    fn solomon_dump_round_trips(inst in arb_instance()) {
        let back = parse_solomon(&inst.to_solomon_text(), None).unwrap();
        prop_assert_eq!(back, inst);
    }
}
