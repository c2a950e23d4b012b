use std::path::Path;

use atcg_core::io::*;
use atcg_core::prelude::*;

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn synthetic_embeddings_round_trip() {
    let spec = SyntheticSpec {
        clusters: 4,
        points_per_cluster: 7,
        dim: 3,
        cluster_spread: 0.8,
        inter_cluster_distance: 3.0,
        seed: 11,
    };
    let emb = gen_synthetic(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("emb.csv");
    write_embeddings(&emb, std::fs::File::create(&path).unwrap()).unwrap();
    let back = load_embeddings(&path).unwrap();
    assert_eq!((back.len(), back.dim()), (28, 3));
    for p in 0..emb.len() {
        for (a, b) in emb.row(p).iter().zip(back.row(p)) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
    assert_eq!(gen_synthetic(&spec).unwrap().row(5), emb.row(5));
}

#[test]
fn run_outputs_match_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"{{"objective": "facility_rbf", "clusters": 3, "points_per_cluster": 5, "dim": 2,
            "cluster_spread": 0.5, "inter_cluster_distance": 3.0, "T": 25, "tau": 0.4,
            "K": 30, "seed": 9, "sigma": 1.0, "output_dir": {:?}}}"#,
        dir.path().display().to_string()
    );
    let cfg = ExperimentConfig::from_json(&text).unwrap();
    let out = run_experiment(&cfg).unwrap();
    let trace = &out.trace;

    let traj = read_rows(&dir.path().join("trajectory.csv"));
    let comm = read_rows(&dir.path().join("communication.csv"));
    let active = read_rows(&dir.path().join("active.csv"));
    for rows in [&traj, &comm, &active] {
        assert_eq!(rows.len(), 25);
        let ts: Vec<usize> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
        assert_eq!(ts, (1..=25).collect::<Vec<_>>());
    }
    let cum: Vec<usize> = comm.iter().map(|r| r[1].parse().unwrap()).collect();
    let tot: Vec<usize> = active.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(cum.windows(2).all(|w| w[0] <= w[1]));
    assert!(tot.windows(2).all(|w| w[0] <= w[1]));
    for (k, r) in trace.records.iter().enumerate() {
        assert_eq!(traj[k][1].parse::<f64>().unwrap(), r.f_value);
        assert_eq!(cum[k], r.cumulative_embeddings);
        let eta_min: f64 = active[k][2].parse().unwrap();
        assert_eq!(eta_min, r.eta.iter().copied().fold(f64::INFINITY, f64::min));
    }

    let summary: Summary =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary, out.summary);
    assert_eq!(summary.c_t, trace.final_embeddings());
    assert_eq!(summary.final_f, trace.final_value());
    assert_eq!(summary.rounded_set, trace.rounded_set.members());
    assert_eq!((summary.tau, summary.horizon, summary.samples, summary.seed), (0.4, 25, 30, 9));
    assert!(summary.c_total.is_some());
}

#[test]
fn cg_rows_leave_eta_blank() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::from_json(
        r#"{"objective": "modular", "weights": [1, 2, 3, 4, 5], "partition_sizes": [2, 3],
            "algorithm": "cg", "T": 8, "gradient_mode": "exact"}"#,
    )
    .unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    run_experiment(&cfg).unwrap();
    let text = std::fs::read_to_string(dir.path().join("active.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(',')));
}

#[test]
fn stats_round_trip_through_traces() {
    let emb = Embeddings::from_rows(&[vec![0.0], vec![0.1], vec![1.0], vec![1.1]]).unwrap();
    let f = FacilityLocation::from_embeddings(&emb, 0.5).unwrap();
    let m = PartitionMatroid::unit(GroundSet::new(&[2, 2]).unwrap());
    let traces: Vec<_> = (0..6).map(|s| atcg(&f, &m, &RunConfig::monte_carlo(15, 0.5, 10, s)).unwrap()).collect();
    let stats = eta_stats_from_traces(&traces).unwrap();
    let mut buf = Vec::new();
    write_stats(&stats, &mut buf).unwrap();
    let back = parse_stats(buf.as_slice()).unwrap();
    assert_eq!(back.eta_bar, stats.eta_bar);
    assert_eq!(back.sigma, stats.sigma);
    let b = expected_comm_bound(&back, 0.5, 15, 2).unwrap();
    assert_eq!(b, expected_comm_bound(&stats, 0.5, 15, 2).unwrap());
}

#[test]
fn config_errors_are_reported() {
    assert!(ExperimentConfig::from_json(r#"{"objective": "modular", "weights": [1], "bogus": 1}"#).is_err());
    assert!(ExperimentConfig::from_json(r#"{"objective": "modular"}"#).is_err());
    assert!(ExperimentConfig::from_json(r#"{"objective": "modular", "weights": [1], "tau": 0}"#).is_err());
    let e = ExperimentConfig::from_json(r#"{"objective": "facility_rbf", "data_path": "/no/such/file.csv"}"#);
    assert!(e.is_err());
}
