//! End-to-end behaviour of the command-line front end.

use std::path::Path;
use std::process::{Command as Process, Output};

use lightlike::cli::{run, Command, ReportDocument, RunConfig, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

const HYPERPLANE_TOML: &str = r#"
n = 3
q = 2

[hypersurface]
defining = "x1 - y3"

[hypersurface.frame]
xi = ["2", "0", "0", "0", "0", "2", "2*y1"]
N = ["-1", "0", "0", "0", "0", "1", "-y1"]
V = ["0", "0", "-2", "-2", "0", "0", "-2*y3"]
U = ["0", "0", "-1", "1", "0", "0", "-y3"]
D0 = [["0", "2", "0", "0", "0", "0", "2*y2"], ["0", "0", "0", "0", "2", "0", "0"]]

[sampling]
seed = 7
count = 12
"#;

fn lightlike(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_lightlike"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn parse(out: &Output) -> ReportDocument {
    ReportDocument::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn classify_exhibits_obstructions_and_exits_zero() {
    let out = lightlike(&[
        "--fixture",
        "hyperplane-x1-y3",
        "--command",
        "classify",
        "--points",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_PASS));
    let doc = parse(&out);
    let find = |n: &str| doc.checks.iter().find(|c| c.name == n).unwrap();
    let umbilic = find("totally_umbilic");
    assert!(umbilic.expected_failure && umbilic.pass && !umbilic.holds());
    assert!(umbilic.witnesses.contains_key("|u(U)-1|"));
    assert!(find("contact_screen_conformal").pass);
    let table = String::from_utf8(out.stderr).unwrap();
    assert!(table.contains("totally_umbilic") && table.contains("exhibit"));
}

#[test]
fn strict_obstructions_turn_exhibits_into_failures() {
    let out = lightlike(&[
        "--fixture",
        "hyperplane-x1-y3",
        "--command",
        "classify",
        "--points",
        "10",
        "--strict-obstructions",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_FAIL));
    assert!(parse(&out).metadata.strict_obstructions);
}

#[test]
fn curvature_on_standard_structure() {
    let out = lightlike(&["--fixture", "standard-structure", "--command", "curvature"]);
    assert_eq!(out.status.code(), Some(EXIT_PASS));
    let doc = parse(&out);
    let fit = doc
        .checks
        .iter()
        .find(|c| c.name == "space_form_fit")
        .unwrap();
    assert!((fit.witnesses["c_estimate"] + 3.0).abs() < 1e-6);
}

#[test]
fn unattainable_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "tight.toml",
        "n = 3\nq = 2\n[tolerances]\nanalytic = 1e-300\n",
    );
    let out = lightlike(&[&cfg, "--command", "verify-sasakian", "--points", "5"]);
    assert_eq!(out.status.code(), Some(EXIT_FAIL));
    assert!(parse(&out).summary.fail_count > 0);
}

#[test]
fn tol_flag_overrides_analytic_tolerance() {
    let out = lightlike(&[
        "--fixture",
        "standard-structure",
        "--command",
        "verify-sasakian",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_FAIL));
}

#[test]
fn malformed_expression_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        "n = 3\nq = 2\n[hypersurface]\ndefining = \"x1 - * y3\"\n",
    );
    let out = lightlike(&[&cfg, "--command", "identities"]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("position 5"));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(
        dir.path(),
        "unknown.toml",
        "n = 3\nq = 2\ncolour = \"red\"\n",
    );
    let off_surface = write_config(
        dir.path(),
        "off.toml",
        "n = 3\nq = 2\n[hypersurface]\ndefining = \"x1*x1 + y1*y1 - x3*x3 - y3*y3 + 1\"\n",
    );
    let missing = dir.path().join("absent.toml");
    for args in [
        vec![unknown.as_str()],
        vec![missing.to_str().unwrap()],
        vec!["--fixture", "no-such-fixture"],
        vec![],
        vec!["--fixture", "standard-structure", "--command", "theorems"],
        vec![off_surface.as_str(), "--command", "identities"],
    ] {
        let out = lightlike(&args);
        assert_eq!(
            out.status.code(),
            Some(EXIT_ERROR),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn output_flag_writes_file_and_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "hyperplane.toml", HYPERPLANE_TOML);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = lightlike(&[&cfg, "--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(EXIT_PASS));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn report_round_trips_bit_exactly() {
    let doc = run(Command::All, RunConfig::from_toml(HYPERPLANE_TOML).unwrap()).unwrap();
    let text = doc.to_json().unwrap();
    let back = ReportDocument::from_json(&text).unwrap();
    assert_eq!(back, doc);
    for (x, y) in back.checks.iter().zip(&doc.checks) {
        assert_eq!(x.max_residual.to_bits(), y.max_residual.to_bits());
    }
    assert_eq!(back.to_json().unwrap(), text);
}

#[test]
fn all_is_the_concatenation_of_the_commands() {
    let config = RunConfig::from_toml(HYPERPLANE_TOML).unwrap();
    let all = run(Command::All, config.clone()).unwrap();
    let mut parts = Vec::new();
    for c in Command::INDIVIDUAL {
        parts.extend(run(c, config.clone()).unwrap().checks);
    }
    assert_eq!(all.checks.len(), parts.len());
    for (a, b) in all.checks.iter().zip(&parts) {
        assert_eq!(a.name, b.name);
        assert_eq!(a.pass, b.pass);
        assert!(
            (a.max_residual - b.max_residual).abs() <= 1e-12,
            "{}",
            a.name
        );
    }
    let s = &all.summary;
    assert_eq!(
        s.pass_count + s.fail_count + s.vacuous_count,
        all.checks.len()
    );
}

#[test]
fn all_without_hypersurface_runs_ambient_commands_only() {
    let doc = run(
        Command::All,
        RunConfig::fixture("standard-structure").unwrap(),
    )
    .unwrap();
    assert!(doc.checks.iter().any(|c| c.name == "sasakian_condition"));
    assert!(doc
        .checks
        .iter()
        .any(|c| c.name == "phi_sectional_curvature"));
    assert!(!doc.checks.iter().any(|c| c.name == "u_of_u"));
    assert_eq!(doc.exit_code(), EXIT_PASS);
}

#[test]
fn all_notes_inapplicable_theorems() {
    let config = RunConfig::from_toml(
        "n = 3\nq = 2\n[hypersurface]\ndefining = \"x1 - y3\"\n[sampling]\ncount = 8\n",
    )
    .unwrap();
    let doc = run(Command::All, config).unwrap();
    assert!(doc
        .metadata
        .notes
        .iter()
        .any(|n| n.starts_with("theorems skipped")));
    assert!(!doc.checks.iter().any(|c| c.name == "omega_U"));
}

#[test]
fn config_hash_tracks_overrides() {
    let base = RunConfig::fixture("hyperplane-x1-y3").unwrap();
    let mut other = base.clone();
    other.sampling.seed += 1;
    let a = run(Command::VerifySasakian, base).unwrap();
    let b = run(Command::VerifySasakian, other).unwrap();
    assert_ne!(a.metadata.config_hash, b.metadata.config_hash);
    assert_eq!(a.metadata.config_hash.len(), 64);
}
