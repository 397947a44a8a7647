use std::path::Path;
use std::process::Command as Proc;
use torus_vortex::harmonic::build_harmonic_map;
use torus_vortex::io::plot::render_plot;
use torus_vortex::io::tables::{read_table, trajectory_rows, write_trajectory};
use torus_vortex::io::{read_field, run_command, Command, RunConfig};
use torus_vortex::reduced::integrate;
use torus_vortex::{ExecPolicy, GreenEvaluator, MomentumVector, SimParams, VortexConfig};

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_torus-vortex"))
}

fn config(command: Command, out: &Path) -> RunConfig {
    RunConfig {
        command: Some(command),
        out: out.to_path_buf(),
        ..Default::default()
    }
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reduce_with_zero_time_keeps_the_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .args(["reduce", "--t-final", "0", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let (header, rows) = read_table(&dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(header.len(), 18);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!((r[0], r[1], r[2]), (0.0, 0.3, 0.5));
    // starts from rest
    assert_eq!((r[5], r[6], r[11], r[12]), (0.0, 0.0, 0.0, 0.0));
    let meta = json(&dir.path().join("metadata.json"));
    assert_eq!(meta["command"], "reduce");
    assert_eq!(meta["config"]["params"]["t_final"], 0.0);
    assert_eq!(meta["digest"].as_str().unwrap().len(), 64);
}

#[test]
fn trajectory_csv_round_trips_bitwise() {
    let g = GreenEvaluator::default();
    let cfg = VortexConfig::dipole_default();
    let q = MomentumVector::canonical(&cfg);
    let p = SimParams::new(1.0 / 400.0, 0.05, 1e-3, 0.05).unwrap();
    let t = integrate(&g, &cfg, &q, &p).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    write_trajectory(&t, &path).unwrap();
    let (_, rows) = read_table(&path).unwrap();
    let want = trajectory_rows(&t);
    assert_eq!(rows.len(), want.len());
    for (a, b) in rows.iter().zip(&want) {
        let a: Vec<u64> = a.iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = b.iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
    }

    let mut empty = t.clone();
    empty.samples.clear();
    empty.diagnostics.clear();
    write_trajectory(&empty, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("t,x_1,y_1,lx_1,ly_1,vx_1,vy_1,"));
}

#[test]
fn sweep_writes_four_runs_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_command(&config(Command::Sweep, a.path())).unwrap();
    let mut cb = config(Command::Sweep, b.path());
    cb.parallel = false;
    run_command(&cb).unwrap();
    let trajectories: Vec<&String> = ra.artifacts.iter().filter(|n| n.starts_with("trajectory_")).collect();
    assert_eq!(trajectories.len(), 4);
    for name in &ra.artifacts {
        if name.ends_with(".csv") || name.ends_with(".svg") {
            let x = std::fs::read(a.path().join(name)).unwrap();
            let y = std::fs::read(b.path().join(name)).unwrap();
            assert!(x == y, "{name} differs");
        }
    }
    let (ma, mb) = (
        json(&a.path().join("metadata.json")),
        json(&b.path().join("metadata.json")),
    );
    assert_eq!(ma["digest"], mb["digest"]);
    assert_eq!(ma["results"]["deviation_decreasing"], true);
    let svg = std::fs::read_to_string(a.path().join("plot.svg")).unwrap();
    assert_eq!(svg.matches("font-size=\"12\">mu = ").count(), 4);
}

#[test]
fn invalid_config_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.toml");
    std::fs::write(
        &conf,
        "[vortices]\npositions = [[0.3, 0.5], [0.7, 0.5]]\ndegrees = [1, -1]\nq0 = [0.1, 0.0]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let st = bin()
        .arg("reduce")
        .arg("--config")
        .arg(&conf)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let rec = json(&out.join("error.json"));
    assert_eq!(rec["kind"], "ConfigError");
    assert!(rec["message"].as_str().unwrap().contains("lattice"));
    assert!(!out.join("trajectory.csv").exists());

    // unreadable config file
    let st = bin()
        .args(["gamma", "--config", "/nonexistent/run.toml", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn module_errors_get_their_own_status() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.toml");
    // a wildly unstable PDE step trips the Hamiltonian guard
    std::fs::write(
        &conf,
        "[pde]\ngrid = 64\ncompare_interval = 0.01\n[params]\neps = 0.1\nmu = 0.01\ndt = 0.05\nt_final = 0.5\n",
    )
    .unwrap();
    let st = bin()
        .arg("pde-compare")
        .arg("--config")
        .arg(&conf)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    let rec = json(&dir.path().join("error.json"));
    assert_eq!(st.status.code(), Some(rec["exit_code"].as_i64().unwrap() as i32));
    assert_ne!(st.status.code(), Some(0));
    assert_ne!(st.status.code(), Some(2));
}

#[test]
fn gamma_report_respects_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_command(&config(Command::Gamma, dir.path())).unwrap();
    assert_eq!(r.results["upper_bound_satisfied"], true);
    assert!(r.results["methods_difference"].as_f64().unwrap() < 1e-3);
    assert!(dir.path().join("gamma.json").exists());
}

#[test]
fn verify_harmonic_snapshot_matches_the_map() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(Command::VerifyHarmonic, dir.path());
    c.harmonic.grid = 64;
    c.harmonic.pairing_grid = 0;
    let r = run_command(&c).unwrap();
    assert_eq!(r.results["pairing"], serde_json::Value::Null);
    let f = read_field(&dir.path().join("harmonic_field.bin")).unwrap();
    let cfg = VortexConfig::dipole_default();
    let m = build_harmonic_map(
        &GreenEvaluator::default(),
        64,
        &cfg,
        &MomentumVector::canonical(&cfg),
        ExecPolicy::Sequential,
    )
    .unwrap();
    assert_eq!(f, m.field);
}

#[test]
fn pde_compare_writes_its_report() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .args([
            "pde-compare",
            "--grid",
            "64",
            "--eps",
            "0.1",
            "--mu",
            "0.0025",
            "--t-final",
            "0.02",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let rep = json(&dir.path().join("compare_report.json"));
    assert_eq!(rep["window_end"], "completed");
    assert_eq!(rep["tracking_losses"], 0);
    assert!(rep["stable_dt"].as_f64().unwrap() > 0.0);
    let (header, rows) = read_table(&dir.path().join("compare.csv")).unwrap();
    assert_eq!(header[0], "t");
    assert!(rows.len() >= 5);
    assert_eq!(read_field(&dir.path().join("field_initial.bin")).unwrap().n(), 64);
}

#[test]
fn stationary_pair_plots_two_glyphs_only() {
    let g = GreenEvaluator::default();
    let cfg = VortexConfig::dipole_default();
    let q = MomentumVector::canonical(&cfg);
    let p = SimParams::new(0.01, 0.05, 1e-4, 0.0).unwrap();
    let t = integrate(&g, &cfg, &q, &p).unwrap();
    let svg = render_plot(&[t], &["still".into()]).unwrap();
    assert_eq!(svg.matches("class=\"glyph plus\"").count(), 1);
    assert_eq!(svg.matches("class=\"glyph cross\"").count(), 1);
    assert_eq!(svg.matches("<polyline").count(), 0);
}

#[test]
fn plotted_paths_never_span_a_seam() {
    // mu = 0 dipole travels in y and wraps through y = 1
    let g = GreenEvaluator::default();
    let cfg = VortexConfig::dipole_default();
    let q = MomentumVector::canonical(&cfg);
    let p = SimParams::new(0.0, 0.05, 1e-3, 1.0).unwrap();
    let t = integrate(&g, &cfg, &q, &p).unwrap();
    let svg = render_plot(&[t], &["mu = 0".into()]).unwrap();
    let lines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).collect();
    // two vortex paths, each cut at least once, plus the time series
    assert!(lines.len() > 4);
    for l in lines {
        let pts = l.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        let ys: Vec<f64> = pts
            .split(' ')
            .map(|p| p.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        for w in ys.windows(2) {
            // half the 240 px panel
            assert!((w[1] - w[0]).abs() < 120.0, "{l}");
        }
    }
}

mod properties {
    use proptest::prelude::*;
    use torus_vortex::io::plot::split_at_seams;
    use torus_vortex::io::snapshot::{field_bytes, field_from_bytes};
    use torus_vortex::io::tables::fmt_num;
    use torus_vortex::GridField;

    proptest! {
        #[test]
        fn written_numbers_parse_back_exactly(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            prop_assert_eq!(fmt_num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }

        #[test]
        fn seam_split_keeps_every_point_and_no_jumps(
            pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 0..60)
        ) {
            let segs = split_at_seams(&pts);
            let flat: Vec<(f64, f64)> = segs.iter().flatten().cloned().collect();
            prop_assert_eq!(flat, pts);
            for s in &segs {
                prop_assert!(!s.is_empty());
                for w in s.windows(2) {
                    prop_assert!((w[1].0 - w[0].0).abs() <= 0.5 && (w[1].1 - w[0].1).abs() <= 0.5);
                }
            }
        }

        #[test]
        fn snapshots_round_trip(n in 1usize..12, seed in any::<u64>()) {
            let f = GridField::from_fn(n, |x| {
                let a = (seed as f64).sin() * 10.0 + x.x * 3.0 - x.y;
                num_complex::Complex64::new(a.cos(), a.sin() * 1e-300)
            });
            prop_assert_eq!(field_from_bytes(&field_bytes(&f)).unwrap(), f);
        }
    }
}
