use nfbm::experiments::{
    analyze_point, csv_header, read_csv, run_distance_sweep, run_dof_sweep, run_snr_sweep,
    write_csv, ExperimentConfig, SweepRow,
};
use nfbm::{Error, C64};

fn small_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.tx_num_elements = 16;
    c.rx_num_elements = 16;
    c.distance = 0.1;
    c.distance_points = vec![0.05, 0.1, 0.2, 1.0];
    c.snr_distance_points = vec![0.05, 0.2];
    c.snr_points = vec![0.0, 10.0, 20.0];
    c.mc_samples = 5_000;
    c
}

fn assert_close_rows(a: &[SweepRow], b: &[SweepRow]) {
    assert_eq!(a.len(), b.len());
    let close = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => (x - y).abs() <= 1e-8 * x.abs().max(1.0),
        (None, None) => true,
        _ => false,
    };
    for (r, s) in a.iter().zip(b) {
        assert_eq!(r.dof, s.dof);
        assert_eq!(r.k, s.k);
        for (x, y) in [
            (r.frequency_hz, s.frequency_hz),
            (r.distance_m, s.distance_m),
            (r.snr_db, s.snr_db),
            (r.c_bm_asymptotic, s.c_bm_asymptotic),
            (r.c_bbs, s.c_bbs),
            (r.gap, s.gap),
            (r.se_mc_mean, s.se_mc_mean),
            (r.se_mc_stderr, s.se_mc_stderr),
        ] {
            assert!(close(x, y), "{x:?} vs {y:?}");
        }
    }
}

#[test]
fn snr_sweep_cardinality_order_and_invariants() {
    let config = small_config();
    let rows = run_snr_sweep(&config).unwrap();
    assert_eq!(rows.len(), 2 * 3);
    let mut i = 0;
    for &d in &config.snr_distance_points {
        for &s in &config.snr_points {
            assert_eq!(rows[i].distance_m, Some(d));
            assert_eq!(rows[i].snr_db, Some(s));
            assert_eq!(rows[i].frequency_hz, None);
            i += 1;
        }
    }
    for r in &rows {
        let bm = r.c_bm_asymptotic.unwrap();
        let bbs = r.c_bbs.unwrap();
        assert!(bbs <= bm);
        assert!((r.gap.unwrap() - (bm - bbs)).abs() <= 1e-12);
        let se = r.se_mc_stderr.unwrap();
        assert!(r.se_mc_mean.unwrap() <= bm + 3.0 * se, "{r:?}");
        assert_eq!(r.k, Some(r.dof));
    }
}

#[test]
fn distance_sweep_rows_follow_grid() {
    let config = small_config();
    let rows = run_distance_sweep(&config).unwrap();
    assert_eq!(rows.len(), config.distance_points.len());
    for (r, &d) in rows.iter().zip(&config.distance_points) {
        assert_eq!(r.distance_m, Some(d));
        assert_eq!(r.snr_db, Some(config.snr_db));
        assert!(r.se_mc_mean.is_some());
    }
    // dof never grows as the link gets longer on this grid
    assert!(rows.windows(2).all(|w| w[0].dof >= w[1].dof));
}

#[test]
fn dof_sweep_orders_frequency_then_distance() {
    let config = small_config();
    let rows = run_dof_sweep(&config).unwrap();
    assert_eq!(rows.len(), 3 * 4);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.frequency_hz, Some(config.frequency_points[i / 4]));
        assert_eq!(r.distance_m, Some(config.distance_points[i % 4]));
        assert!(r.c_bm_asymptotic.is_none() && r.k.is_none());
    }
}

#[test]
fn csv_round_trip_and_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config();
    let rows = run_snr_sweep(&config).unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_csv(&rows, &a).unwrap();
    write_csv(&run_snr_sweep(&config).unwrap(), &b).unwrap();
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(
        text.lines().next().unwrap(),
        "distance_m,snr_db,dof,k,c_bm_asymptotic,c_bbs,gap,se_mc_mean,se_mc_stderr"
    );
    assert_close_rows(&rows, &read_csv(&a).unwrap());
}

#[test]
fn dof_csv_leaves_capacity_cells_empty() {
    let dir = tempfile::tempdir().unwrap();
    let rows = run_dof_sweep(&small_config()).unwrap();
    assert_eq!(
        csv_header(&rows),
        ["frequency_hz", "distance_m", "dof", "k", "c_bm_asymptotic", "c_bbs", "gap", "se_mc_mean", "se_mc_stderr"]
    );
    let path = dir.path().join("dof.csv");
    write_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",,,,,,")), "{text}");
    assert_close_rows(&rows, &read_csv(&path).unwrap());
}

#[test]
fn single_row_csv_has_two_lines() {
    let dir = tempfile::tempdir().unwrap();
    let row = analyze_point(&small_config(), false).unwrap().row();
    let path = dir.path().join("one.csv");
    write_csv(&[row], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
    assert!(write_csv(&[], dir.path().join("none.csv")).is_err());
}

#[test]
fn single_antenna_has_one_degree_of_freedom() {
    let mut config = small_config();
    config.tx_num_elements = 1;
    config.rx_num_elements = 1;
    let a = analyze_point(&config, false).unwrap();
    assert_eq!(a.decomposition.dof, 1);
    assert_eq!(a.report.c_bm_asymptotic, a.report.c_bbs);
    assert_eq!(a.report.gap, 0.0);
}

#[test]
fn far_field_without_scatterer_has_no_gap() {
    let mut config = small_config();
    config.distance = 1e6;
    config.reflection_coefficient = C64::new(0.0, 0.0);
    let a = analyze_point(&config, true).unwrap();
    assert_eq!(a.candidates.len(), 1);
    assert_eq!(a.activation.probabilities, vec![1.0]);
    assert_eq!(a.report.gap, 0.0);
}

#[test]
fn frequency_ordering_of_dof_in_near_field() {
    let mut config = small_config();
    config.tx_num_elements = 64;
    config.rx_num_elements = 64;
    config.distance_points = vec![0.3, 0.6, 1.2];
    let rows = run_dof_sweep(&config).unwrap();
    for j in 0..3 {
        let dofs: Vec<usize> = (0..3).map(|f| rows[f * 3 + j].dof).collect();
        assert!(dofs[2] >= dofs[1] && dofs[1] >= dofs[0], "{dofs:?}");
    }
}

#[test]
fn failing_point_names_its_coordinate() {
    let mut config = small_config();
    config.scatterer_offset_axial = Some(0.5);
    config.distance = 1.0;
    config.distance_points = vec![1.0, 0.3];
    let err = run_distance_sweep(&config).unwrap_err();
    assert!(matches!(err, Error::SweepPoint { .. }));
    assert!(err.to_string().contains("distance_m=0.3"), "{err}");
    assert!(err.is_usage());
}

#[test]
fn shipped_default_config_matches_defaults() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.cfg");
    assert_eq!(ExperimentConfig::from_file(path).unwrap(), ExperimentConfig::default());
}
