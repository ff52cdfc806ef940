use plap_cli::record::{fmt_num, read_csv, write_csv, write_json_lines, Geometry, RunRecord};
use proptest::option;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e12..1e12f64,
        (-300i32..300, 1.0..10.0f64).prop_map(|(e, m)| m * 10f64.powi(e)),
        Just(0.0),
    ]
}

fn geometry() -> impl Strategy<Value = Geometry> {
    prop_oneof![
        Just(Geometry::Ball),
        Just(Geometry::Interval),
        Just(Geometry::Square)
    ]
}

prop_compose! {
    fn record()(
        geometry in geometry(),
        dim in 1usize..6,
        p in finite(),
        q in finite(),
        mu in option::of(finite()),
        eps in option::of(finite()),
        mesh in 2usize..5000,
        mu_q in option::of(finite()),
        lambda_upper in option::of(finite()),
        iters in 0usize..10_000_000,
        seconds in 0.0..1e4f64,
        converged in any::<bool>(),
        lambda_exact in option::of(finite()),
        rel_error in option::of(finite()),
        warning in option::of("[a-z ;,\"]{0,20}"),
        error in option::of("[a-z ()=.]{0,20}"),
    ) -> RunRecord {
        RunRecord {
            geometry, dim, p, q, mu, eps, mesh, mu_q, lambda_upper, iters, seconds,
            converged, lambda_exact, rel_error, warning, error,
        }
    }
}

fn same_to_15_digits(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => fmt_num(x) == fmt_num(y) && (x - y).abs() <= 1e-14 * x.abs(),
        _ => false,
    }
}

proptest! {
    #[test]
    fn json_round_trip_is_identity(r in record()) {
        let line = r.to_json_line();
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(RunRecord::from_json_line(&line).unwrap(), r);
    }

    #[test]
    fn json_lines_round_trip(rs in prop::collection::vec(record(), 0..5)) {
        let mut buf = Vec::new();
        write_json_lines(&mut buf, &rs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back: Vec<RunRecord> = text.lines().map(|l| RunRecord::from_json_line(l).unwrap()).collect();
        prop_assert_eq!(back, rs);
    }

    #[test]
    fn csv_round_trip_to_printed_precision(rs in prop::collection::vec(record(), 1..5)) {
        let mut buf = Vec::new();
        write_csv(&mut buf, &rs).unwrap();
        let back = read_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.len(), rs.len());
        let oracle = rs.iter().any(|r| r.lambda_exact.is_some());
        for (a, b) in rs.iter().zip(&back) {
            prop_assert_eq!(a.geometry, b.geometry);
            prop_assert_eq!(a.dim, b.dim);
            prop_assert_eq!(a.mesh, b.mesh);
            prop_assert_eq!(a.iters, b.iters);
            prop_assert_eq!(a.converged, b.converged);
            for (x, y) in [
                (Some(a.p), Some(b.p)),
                (Some(a.q), Some(b.q)),
                (a.mu, b.mu),
                (a.eps, b.eps),
                (a.mu_q, b.mu_q),
                (a.lambda_upper, b.lambda_upper),
                (Some(a.seconds), Some(b.seconds)),
            ] {
                prop_assert!(same_to_15_digits(x, y), "{:?} vs {:?}", x, y);
            }
            if oracle {
                prop_assert!(same_to_15_digits(a.lambda_exact, b.lambda_exact));
                prop_assert!(same_to_15_digits(a.rel_error, b.rel_error));
            }
        }
    }

    #[test]
    fn printed_numbers_are_fixed_points(x in finite()) {
        let s = fmt_num(x);
        let y: f64 = s.parse().unwrap();
        prop_assert_eq!(fmt_num(y), s);
    }
}
