use fronthaul_latency::experiment::{
    bound_curves, cmd_sweep, ExperimentConfig, OutputFormat, SweepParameter, SweepRequest,
};

fn config(policy: &str) -> ExperimentConfig {
    ExperimentConfig::from_json_str(&format!(
        r#"{{
            "topology": {{"n_paths": 10, "path_capacity_bps": 1e8}},
            "classes": [
                {{"name": "urllc", "packet_size_bits": 4000, "arrival_rate": 8000, "k": 2}},
                {{"name": "embb", "packet_size_bits": 12000, "arrival_rate": 4000, "k": 2}}
            ],
            "policy": {policy},
            "tau_grid": {{"min": 1e-6, "max": 1e-1, "points": 120, "spacing": "log"}},
            "packets": 20000
        }}"#
    ))
    .unwrap()
}

fn non_increasing(series: &[(f64, Option<f64>)]) -> bool {
    series.windows(2).all(|w| match (w[0].1, w[1].1) {
        (Some(a), Some(b)) => b <= a,
        (None, _) => true,
        (Some(_), None) => false,
    })
}

#[test]
fn latency_falls_with_bandwidth_and_paths() {
    let dir = tempfile::tempdir().unwrap();
    let bw = config(r#"{"type": "orthogonal_bandwidth", "fractions": [0.5, 0.5]}"#);
    let values = [0.3, 0.5, 0.7];
    let req = SweepRequest {
        parameter: SweepParameter::BwU,
        values: &values,
        class: None,
        simulate: false,
    };
    let report = cmd_sweep(&bw, &req, dir.path(), OutputFormat::Csv).unwrap();
    for curve in ["lower", "upper"] {
        for r in [0.99999, 0.999999] {
            let s = report.series(curve, r);
            assert_eq!(s.len(), 3);
            assert!(non_increasing(&s), "{curve} {r}: {s:?}");
        }
    }

    let path = config(r#"{"type": "orthogonal_path", "paths": [5, 5]}"#);
    let values = [3.0, 5.0, 7.0];
    let req = SweepRequest {
        parameter: SweepParameter::NU,
        values: &values,
        class: Some("embb"),
        simulate: false,
    };
    let report = cmd_sweep(&path, &req, dir.path(), OutputFormat::Json).unwrap();
    assert_eq!(report.class, "embb");
    for curve in ["lower", "upper"] {
        assert!(non_increasing(&report.series(curve, 0.999999)));
    }
}

#[test]
fn single_value_matches_direct_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(r#"{"type": "orthogonal_path", "paths": [5, 5]}"#);
    let req = SweepRequest {
        parameter: SweepParameter::K,
        values: &[2.0],
        class: Some("urllc"),
        simulate: false,
    };
    cmd_sweep(&cfg, &req, dir.path(), OutputFormat::Csv).unwrap();
    let direct = bound_curves(&cfg).unwrap();
    let swept = std::fs::read_to_string(dir.path().join("k_2/urllc_upper.csv")).unwrap();
    let swept = fronthaul_latency::forkjoin::DelayCurve::parse_any(&swept).unwrap();
    assert_eq!(swept.points(), direct[0].upper.points());
}

#[test]
fn sweep_rejects_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(r#"{"type": "orthogonal_path", "paths": [5, 5]}"#);
    for (p, v) in [
        (SweepParameter::K, 1.5),
        (SweepParameter::K, 6.0),
        (SweepParameter::NU, 11.0),
        (SweepParameter::BwU, 0.5),
    ] {
        let req = SweepRequest {
            parameter: p,
            values: &[v],
            class: None,
            simulate: false,
        };
        assert!(
            cmd_sweep(&cfg, &req, dir.path(), OutputFormat::Csv).is_err(),
            "{p:?} {v}"
        );
    }
    let shared = config(r#"{"type": "non_orthogonal"}"#);
    let req = SweepRequest {
        parameter: SweepParameter::K,
        values: &[1.0],
        class: None,
        simulate: false,
    };
    assert!(cmd_sweep(&shared, &req, dir.path(), OutputFormat::Csv).is_err());
    let req = SweepRequest {
        parameter: SweepParameter::K,
        values: &[1.0, 3.0],
        class: None,
        simulate: true,
    };
    let report = cmd_sweep(&shared, &req, dir.path(), OutputFormat::Csv).unwrap();
    assert!(report.rows.iter().all(|r| r.curve == "sim"));
}
