use leoshare_core::config::preset;
use leoshare_core::scenario::{Direction, UserClass};
use leoshare_core::sweep::{
    read_csv, run_sweep, summary_json, write_csv, write_outputs, SweepSpec,
};

fn spec(grid: Vec<f64>, trials: u64) -> SweepSpec {
    let mut s = SweepSpec::from_file(preset(UserClass::Handheld)).unwrap();
    s.grid = grid;
    s.trials = trials;
    s
}

#[test]
fn single_point_analytic_sweep_gives_one_row() {
    let mut s = spec(vec![10.0], 0);
    s.directions = vec![Direction::Ul];
    let r = run_sweep(&s).unwrap();
    assert!(r.failures.is_empty());
    assert_eq!(r.rows.len(), 2);
    for row in &r.rows {
        assert_eq!(row.ratio, 10.0);
        assert!(row.analytic_se.is_some());
        assert!(row.mc_se.is_none() && row.mc_stderr.is_none());
    }
}

#[test]
fn csv_round_trip_is_exact() {
    let r = run_sweep(&spec(vec![1.0, 3.0], 300)).unwrap();
    let mut buf = Vec::new();
    write_csv(&r.rows, &mut buf).unwrap();
    let back = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, r.rows);
    let header = String::from_utf8(buf).unwrap();
    assert!(header.starts_with("config,ratio,analytic_se,mc_se,mc_stderr,trials,seed"));
}

#[test]
fn analytic_sweeps_are_byte_identical() {
    let s = spec(vec![1.0, 3.0], 0);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let files: Vec<(Vec<u8>, Vec<u8>)> = dirs
        .iter()
        .map(|d| {
            let (csv, json) = write_outputs(&run_sweep(&s).unwrap(), d.path()).unwrap();
            (std::fs::read(csv).unwrap(), std::fs::read(json).unwrap())
        })
        .collect();
    assert_eq!(files[0], files[1]);
    let r = run_sweep(&s).unwrap();
    assert!(summary_json(&r).contains("crossings"));
}

#[test]
fn invalid_grids_are_rejected() {
    for grid in [vec![], vec![10.0, 1.0], vec![0.0, 1.0]] {
        assert!(run_sweep(&spec(grid, 0)).is_err());
    }
}
