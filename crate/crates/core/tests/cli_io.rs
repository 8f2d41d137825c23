//! Config files, output files and the command-line binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hubbard_ring::basis::Spin;
use hubbard_ring::cli::output::{csv_header, read_csv_file, RESOLVED_CONFIG_FILE};
use hubbard_ring::cli::{execute, load_config, RunConfig};
use hubbard_ring::error::{EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL};
use hubbard_ring::scenarios::ScenarioKind;

const BIN: &str = env!("CARGO_BIN_EXE_hubbard-ring");

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).env_remove("HUBBARD_RING_OUT").output().expect("binary runs")
}

fn short_config(dir: &Path, scenario: &str, extra: &str) -> RunConfig {
    let text = format!(
        "scenario = \"{scenario}\"\n{extra}\n[time]\nt_max = 4.0\n[output]\ndir = \"{}\"\nplots = false\n",
        dir.display()
    );
    RunConfig::parse(&text).unwrap()
}

#[test]
fn empty_config_resolves_to_defaults() {
    let cfg = RunConfig::parse("scenario = \"barrier-comparison\"\n").unwrap();
    let p = cfg.spec.params;
    assert_eq!((p.hopping, p.interaction, p.barrier.height, p.barrier.alpha), (1.0, 10.0, 20.0, 0.5));
    assert_eq!(cfg.spec.sector.sites(), 8);
    assert_eq!((cfg.spec.sector.n_up(), cfg.spec.sector.n_dn()), (2, 1));
    assert_eq!((cfg.spec.settings.grid.t_max(), cfg.spec.settings.grid.dt()), (40.0, 0.05));
}

#[test]
fn csv_round_trip_reproduces_records() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path(), "direction-flip", "");
    let report = execute(&cfg).unwrap();
    let hubbard_ring::scenarios::ScenarioOutput::DirectionFlip(runs) = &report.output else { panic!() };
    let table = read_csv_file(&tmp.path().join("direction-flip_A.csv")).unwrap();
    assert_eq!(table.header, csv_header(8));
    assert_eq!(table.rows.len(), runs[0].records.len());
    for (row, rec) in table.rows.iter().zip(&runs[0].records) {
        let expected: Vec<f64> = [rec.t, rec.current_up, rec.current_dn, rec.charge_up, rec.charge_dn]
            .into_iter()
            .chain(rec.density.iter().copied())
            .chain(rec.density_up.iter().copied())
            .chain(rec.density_dn.iter().copied())
            .collect();
        for (got, want) in row.iter().zip(&expected) {
            // half a unit in the 12th significant digit
            assert!((got - want).abs() <= 5e-12 * want.abs(), "{got} vs {want}");
        }
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("direction-flip_A.json")).unwrap()).unwrap();
    let first = json["records"][1].as_object().unwrap();
    assert_eq!(first.keys().cloned().collect::<Vec<_>>(), csv_header(8));
    assert_eq!(first["Q_up"].as_f64().unwrap(), runs[0].records[1].charge(Spin::Up));
}

#[test]
fn exact_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        execute(&short_config(dir, "barrier-comparison", "")).unwrap();
    }
    for name in ["barrier-comparison_alpha-0.5.csv", "barrier-comparison_alpha-1.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn alpha_scan_files_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(
        tmp.path(),
        "alpha-scan",
        "configs = [\"A\"]\n[scan]\nalpha_min = 0.4\nalpha_max = 0.6\nalpha_step = 0.1\n",
    );
    execute(&cfg).unwrap();
    for a in ["0.4", "0.5", "0.6"] {
        assert!(tmp.path().join(format!("alpha-scan_A_alpha-{a}.csv")).exists());
    }
    let summary = read_csv_file(&tmp.path().join("alpha-scan_A_summary.csv")).unwrap();
    assert_eq!(summary.header, ["alpha", "Qbar_up", "Qbar_dn", "counterprop_flag"]);
    assert_eq!(summary.column("alpha").unwrap(), vec![0.4, 0.5, 0.6]);
    for row in &summary.rows {
        assert_eq!(row[3], if row[1] * row[2] < 0.0 { 1.0 } else { 0.0 });
    }
    assert!(!tmp.path().join("alpha-scan_B_summary.csv").exists());
}

#[test]
fn resolved_config_echo_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path(), "custom", "[initial]\nkind = \"fock\"\ndoublons = [4]\nup = [8]\n");
    execute(&cfg).unwrap();
    let echoed = load_config(&tmp.path().join(RESOLVED_CONFIG_FILE)).unwrap();
    assert_eq!(echoed, cfg);
    assert_eq!(echoed.spec.kind, ScenarioKind::Custom);
}

#[test]
fn list_scenarios_and_selftest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin(&["list-scenarios"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in ScenarioKind::ALL {
        assert!(text.contains(kind.name()));
    }
    let out = bin(&["selftest"], tmp.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.contains("[PASS]") && !text.contains("[FAIL]"));
}

#[test]
fn run_writes_data_then_plots() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("cfg.toml"), "scenario = \"barrier-comparison\"\n[time]\nt_max = 2.0\n").unwrap();
    let out = bin(&["run", "cfg.toml", "--out", "res"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res = tmp.path().join("res");
    for panel in ["a", "b", "c", "d"] {
        assert!(res.join(format!("barrier-comparison_{panel}.svg")).exists());
    }
    assert!(res.join("barrier-comparison_alpha-0.5.csv").exists());
    assert!(res.join("barrier-comparison_alpha-0.5.json").exists());
    assert!(res.join("summary.json").exists());

    let out = bin(&["run", "cfg.toml", "--out", "quiet", "--no-plots", "--mode", "krylov"], tmp.path());
    assert!(out.status.success());
    let quiet = tmp.path().join("quiet");
    assert!(quiet.join("barrier-comparison_alpha-1.csv").exists());
    assert!(!quiet.join("barrier-comparison_a.svg").exists());
    assert!(fs::read_to_string(quiet.join(RESOLVED_CONFIG_FILE)).unwrap().contains("mode = \"krylov\""));
}

#[test]
fn output_directory_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("cfg.toml"),
        "scenario = \"direction-flip\"\n[time]\nt_max = 1.0\n[output]\nplots = false\n",
    )
    .unwrap();
    let run = |env: Option<&str>, args: &[&str]| {
        let mut cmd = Command::new(BIN);
        cmd.args(["run", "cfg.toml"]).args(args).current_dir(tmp.path()).env_remove("HUBBARD_RING_OUT");
        if let Some(dir) = env {
            cmd.env("HUBBARD_RING_OUT", dir);
        }
        assert!(cmd.status().unwrap().success());
    };
    run(None, &[]);
    assert!(tmp.path().join("out/direction-flip_A.csv").exists());
    run(Some("from-env"), &[]);
    assert!(tmp.path().join("from-env/direction-flip_A.csv").exists());
    run(Some("from-env-2"), &["--out", "from-flag"]);
    assert!(tmp.path().join("from-flag/direction-flip_A.csv").exists());
    assert!(!tmp.path().join("from-env-2").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| bin(args, tmp.path()).status.code().unwrap();

    fs::write(tmp.path().join("neg.toml"), "[model]\nalpha = -0.5\n").unwrap();
    let out = bin(&["run", "neg.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("model.alpha") && err.contains("line 2"), "{err}");

    fs::write(tmp.path().join("odd.toml"), "[model]\nsites = 7\n").unwrap();
    assert_eq!(code(&["run", "odd.toml"]), EXIT_CONFIG);
    fs::write(tmp.path().join("j.toml"), "[model]\nJ = 0\n").unwrap();
    assert_eq!(code(&["run", "j.toml"]), EXIT_CONFIG);
    assert_eq!(code(&["run", "missing.toml"]), EXIT_IO);

    // output directory below a regular file cannot be created
    fs::write(tmp.path().join("blocker"), "").unwrap();
    fs::write(tmp.path().join("ok.toml"), "[time]\nt_max = 0.5\n").unwrap();
    assert_eq!(code(&["run", "ok.toml", "--out", "blocker/sub", "--no-plots"]), EXIT_IO);

    fs::write(
        tmp.path().join("krylov.toml"),
        "[time]\nt_max = 0.5\n[propagator]\nmode = \"krylov\"\nkrylov_dim = 2\nkrylov_tol = 1e-300\n",
    )
    .unwrap();
    assert_eq!(code(&["run", "krylov.toml", "--no-plots"]), EXIT_NUMERICAL);
    assert!(!tmp.path().join("out").exists());
}
