use index_transform::cli::{run, DiscreteRecord, GridTable, VerifyOutput};
use std::path::Path;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["index-transform"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn table(text: &str) -> GridTable {
    GridTable::from_csv(text).unwrap()
}

fn builtin_text() -> String {
    index_transform::registry::Registry::builtin().to_toml_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn transform_matches_closed_form_image() {
    // (1+x)^{-3/2} with b = c = 1/2 has the image |Γ(1+is)|²/Γ(3/2)² = 4πs/(π sinh(πs)).
    let r = cli(&["transform", "--b", "0.5", "--c", "0.5", "--f", "pow1p(-1.5)", "--s-grid", "0:3:7"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let t = table(&r.out);
    assert_eq!(t.columns, ["s", "ghat"]);
    for row in &t.rows {
        let s = row[0];
        let want = if s == 0.0 { 4.0 / std::f64::consts::PI } else { 4.0 * s / (std::f64::consts::PI * s).sinh() };
        assert!((row[1] - want).abs() < 1e-9 * want, "s={s}: {} vs {want}", row[1]);
    }
}

#[test]
fn zero_function_gives_zero_column() {
    let r = cli(&["transform", "--b", "0.7", "--c", "0.4", "--f", "0", "--s-grid", "0:5:6"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(table(&r.out).rows.iter().all(|row| row[1] == 0.0));
}

#[test]
fn preset_equals_explicit_parameters() {
    let a = cli(&["transform", "--preset", "1,2", "--f", "exp(-x)", "--s-grid", "0:2:5"]);
    let b = cli(&["transform", "--b", "0.25", "--c", "0.75", "--f", "exp(-x)", "--s-grid", "0:2:5"]);
    assert_eq!(a.code, 0, "{}", a.err);
    assert_eq!(a.out, b.out);
}

#[test]
fn transform_then_invert_recovers_the_function() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("g.csv");
    let r = cli(&["transform", "--b", "0.5", "--c", "0.5", "--f", "exp(-x)", "--s-grid", "0:60:1201", "-o", path(&spec)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let back = cli(&["invert", "--b", "0.5", "--c", "0.5", "--input", path(&spec), "--x-grid", "0.2:3:8"]);
    assert_eq!(back.code, 0, "{}", back.err);
    for row in table(&back.out).rows {
        let want = (-row[0]).exp();
        assert!((row[1] - want).abs() < 1e-4 * want, "x={}: {} vs {want}", row[0], row[1]);
    }
}

#[test]
fn mixed_regime_round_trip_uses_the_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("g.csv");
    let side = dir.path().join("g.json");
    let r = cli(&["transform", "--b", "-0.4", "--c", "1.1", "--f", "exp(-x)", "--s-grid", "0:60:1201", "-o", path(&spec)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let default_side = dir.path().join("g.csv.discrete.json");
    let records: Vec<DiscreteRecord> = serde_json::from_str(&std::fs::read_to_string(&default_side).unwrap()).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].m, 0);
    assert!(records[0].norm_sq > 0.0);
    std::fs::rename(&default_side, &side).unwrap();

    let missing = cli(&["invert", "--b", "-0.4", "--c", "1.1", "--input", path(&spec)]);
    assert_eq!(missing.code, 2);
    assert!(missing.err.contains("sidecar"), "{}", missing.err);

    let back = cli(&["invert", "--b", "-0.4", "--c", "1.1", "--input", path(&spec), "--sidecar", path(&side), "--x-grid", "0.2:3:8"]);
    assert_eq!(back.code, 0, "{}", back.err);
    for row in table(&back.out).rows {
        let want = (-row[0]).exp();
        assert!((row[1] - want).abs() < 1e-4 * want, "x={}: {} vs {want}", row[0], row[1]);
    }
}

#[test]
fn mixed_regime_transform_needs_somewhere_to_write_coefficients() {
    let r = cli(&["transform", "--b", "-0.4", "--c", "1.1", "--f", "exp(-x)", "--s-grid", "0:1:2"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("sidecar"));
}

#[test]
fn invert_of_zero_spectrum_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("zero.csv");
    std::fs::write(&spec, "s,ghat\n0,0\n1,0\n2,0\n").unwrap();
    let r = cli(&["invert", "--b", "0.5", "--c", "0.5", "--input", path(&spec), "--x-grid", "0:4:5"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(table(&r.out).rows.iter().all(|row| row[1] == 0.0));
}

#[test]
fn verify_dbw_is_deterministic_and_passes() {
    let args = ["verify", "--suite", "dbw", "--trials", "5", "--seed", "7", "--json"];
    let a = cli(&args);
    let b = cli(&args);
    assert_eq!(a.code, 0, "{}", a.out);
    assert_eq!(a.out, b.out);
    let parsed: VerifyOutput = serde_json::from_str(&a.out).unwrap();
    assert!(parsed.passed);
    assert_eq!(parsed.reports.len(), 6 * 5);
    assert_eq!(parsed.seed, 7);
}

#[test]
fn verify_none_is_empty_and_succeeds() {
    let r = cli(&["verify", "--suite", "none", "--json"]);
    assert_eq!(r.code, 0);
    let parsed: VerifyOutput = serde_json::from_str(&r.out).unwrap();
    assert!(parsed.reports.is_empty() && parsed.passed);
    let plain = cli(&["verify", "--suite", "none"]);
    assert!(plain.out.contains("0 checks, 0 failed"));
}

#[test]
fn verify_rejects_unknown_suite() {
    assert_eq!(cli(&["verify", "--suite", "nonsense"]).code, 2);
}

#[test]
fn verify_reports_failure_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("reg.toml");
    let text = builtin_text().replacen("calibration_constant = 2.0", "calibration_constant = 3.0", 1);
    assert_ne!(text, builtin_text());
    std::fs::write(&reg, text).unwrap();
    let r = cli(&["verify", "--suite", "dbw", "--trials", "1", "--registry", path(&reg)]);
    assert_eq!(r.code, 1, "{}", r.out);
    assert!(r.out.contains("FAIL"));
}

#[test]
fn update_registry_writes_requested_path() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("reg.toml");
    std::fs::write(&reg, builtin_text()).unwrap();
    let r = cli(&["verify", "--suite", "dbw", "--trials", "2", "--registry", path(&reg), "--update-registry"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let written = index_transform::registry::Registry::parse(&std::fs::read_to_string(&reg).unwrap()).unwrap();
    assert_eq!(written.entries().len(), index_transform::registry::Registry::builtin().entries().len());
    assert_eq!(written.get("DBW").unwrap().calibration_constant, Some(2.0));
}

#[test]
fn poly_examples() {
    let r = cli(&["poly", "--family", "jacobi", "--alpha", "0", "--beta", "0", "--degree", "1", "--grid", "0:1:3"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let t = table(&r.out);
    assert_eq!(t.columns.len(), 3);
    assert_eq!(t.rows[2][2], 1.0);
    assert_eq!(t.rows[0][2], -1.0);

    let w = cli(&["poly", "--family", "wilson", "--a", "0.7", "--b", "0.9", "--c", "1.1", "--d", "1.3", "--degree", "0", "--grid", "0:3:4"]);
    assert_eq!(w.code, 0, "{}", w.err);
    assert!(table(&w.out).rows.iter().all(|row| row[1] == 1.0));

    let bad = cli(&["poly", "--family", "romanovski", "--b", "-0.4", "--c", "1.1", "--degree", "1"]);
    assert_eq!(bad.code, 2);
    let ok = cli(&["poly", "--family", "romanovski", "--b", "-1.3", "--c", "2.0", "--degree", "1"]);
    assert_eq!(ok.code, 0, "{}", ok.err);
}

#[test]
fn poly_norms_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let norms = dir.path().join("norms.json");
    let r = cli(&["poly", "--family", "wilson", "--a", "0.7", "--b", "0.9", "--c", "1.1", "--d", "1.3", "--degree", "2", "--norms", path(&norms)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&norms).unwrap()).unwrap();
    assert!(v.as_array().map(|a| a.len() == 3).unwrap_or(false), "{v}");
}

#[test]
fn help_lists_flags_for_every_command() {
    let cases: [(&str, &[&str]); 5] = [
        ("transform", &["--b", "--c", "--preset", "--f", "--s-grid", "--sidecar", "--output", "--tol-rel", "--config"]),
        ("invert", &["--input", "--sidecar", "--x-grid", "--output"]),
        ("verify", &["--suite", "--seed", "--trials", "--json", "--registry", "--update-registry"]),
        ("poly", &["--family", "--degree", "--grid", "--alpha", "--beta", "--norms"]),
        ("", &["transform", "invert", "verify", "poly"]),
    ];
    for (cmd, flags) in cases {
        let args: Vec<&str> = if cmd.is_empty() { vec!["--help"] } else { vec![cmd, "--help"] };
        let r = cli(&args);
        assert_eq!(r.code, 0, "{cmd}");
        for f in flags {
            assert!(r.out.contains(f), "{cmd} --help lacks {f}");
        }
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cli(&["transform", "--b", "abc", "--c", "1"]).code, 2);
    assert_eq!(cli(&["transform", "--b", "0.5", "--c", "0.5", "--f", "exp("]).code, 2);
    assert_eq!(cli(&["frobnicate"]).code, 2);
    assert_eq!(cli(&["transform", "--b", "0.5", "--c", "0.5", "--f", "1", "--s-grid", "3:1:0"]).code, 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("q.conf");
    std::fs::write(&conf, "# quadrature\ntol_rel = 1e-3\nx_max = 50\n").unwrap();
    let coarse = cli(&["transform", "--b", "0.5", "--c", "0.5", "--f", "pow1p(-1.5)", "--s-grid", "1:1:1", "--config", path(&conf)]);
    let fine = cli(&["transform", "--b", "0.5", "--c", "0.5", "--f", "pow1p(-1.5)", "--s-grid", "1:1:1", "--config", path(&conf), "--tol-rel", "1e-12", "--x-max", "1e4"]);
    assert_eq!(coarse.code, 0, "{}", coarse.err);
    assert_eq!(fine.code, 0, "{}", fine.err);
    let want = 4.0 / std::f64::consts::PI.sinh();
    let fine_v = table(&fine.out).rows[0][1];
    assert!((fine_v - want).abs() < 1e-9 * want);
    assert_ne!(coarse.out, fine.out);
}

#[test]
fn csv_output_round_trips_byte_identically() {
    let r = cli(&["transform", "--b", "0.3", "--c", "1.2", "--f", "bump(0,2)", "--s-grid", "0:4:9"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(table(&r.out).to_csv().unwrap(), r.out);
}

#[test]
fn sampled_function_input() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("f.csv");
    let mut text = String::from("x,f\n");
    for k in 0..=400 {
        let x = k as f64 * 0.005;
        let v = if x > 0.0 && x < 2.0 { (-1.0 / (x * (2.0 - x))).exp() } else { 0.0 };
        text.push_str(&format!("{x},{v}\n"));
    }
    std::fs::write(&samples, text).unwrap();
    let a = cli(&["transform", "--b", "0.5", "--c", "0.5", "--f", path(&samples), "--s-grid", "0:2:3"]);
    let b = cli(&["transform", "--b", "0.5", "--c", "0.5", "--f", "bump(0,2)", "--s-grid", "0:2:3"]);
    assert_eq!(a.code, 0, "{}", a.err);
    for (ra, rb) in table(&a.out).rows.iter().zip(table(&b.out).rows) {
        assert!((ra[1] - rb[1]).abs() < 1e-6 * rb[1].abs().max(1e-3), "{} vs {}", ra[1], rb[1]);
    }
}
