use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superquant"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str], config_path: Option<&Path>) -> Output {
    let mut c = bin();
    c.args(args);
    if let Some(p) = config_path {
        c.arg("--config").arg(p);
    }
    c.output().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn verify_kahler_passes_on_quadratic() {
    let o = run(&["verify-kahler"], Some(&config("f1_kahler.toml")));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["result"]["k"], 2);
    let names: Vec<&str> = v["result"]["dolbeault"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["dolbeault_even", "dolbeault_odd"]);
}

#[test]
fn verify_kahler_reports_convexity_refutation() {
    let o = run(&["verify-kahler"], Some(&config("quartic_kahler.toml")));
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["result"]["refutation"]["point"], serde_json::json!([0.0]));
}

#[test]
fn malformed_expression_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "bad.toml", "[dims]\nn = 1\nm = 0\n[potential]\nexpression = \"x1 +\"\n");
    let o = run(&["verify-kahler"], Some(&p));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 5"));
}

#[test]
fn missing_and_unknown_config_keys_exit_two() {
    assert_eq!(run(&["classify"], None).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "typo.toml", "[dims]\nn = 1\nm = 0\nq = 4\n");
    assert_eq!(run(&["classify"], Some(&p)).status.code(), Some(2));
    let p = write_config(
        dir.path(),
        "unordered.toml",
        "[dims]\nn = 1\nm = 0\n[potential]\nbuiltin = \"quadratic\"\n[weights]\ntorus = [[2, -2]]\n",
    );
    assert_eq!(run(&["classify"], Some(&p)).status.code(), Some(2));
}

#[test]
fn classify_hyperbolic_irreducible_case() {
    let o = run(&["classify", "--format", "csv"], Some(&config("f2_classify.toml")));
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 49);
    let occurs: Vec<_> = rows.iter().filter(|r| r[2] == "occurs").collect();
    assert_eq!(occurs.len(), 1);
    assert_eq!(occurs[0][..2], ["3".to_string(), "-2".to_string()]);
}

#[test]
fn classify_quadratic_box() {
    let o = run(&["classify", "--format", "csv"], Some(&config("f1_classify.toml")));
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r[2] == "occurs"));
}

#[test]
fn empty_box_gives_header_only_csv() {
    let o = run(&["classify", "--format", "csv"], Some(&config("empty_box.toml")));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "t1,t2,verdict,integral,integral_value,integral_error,attainment,attainment_point,attainment_residual,disagreement\n"
    );
}

#[test]
fn oracle_disagreement_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // The minimiser at x = 2 lies outside the escape radius, so Newton
    // reports divergence while the integral converges.
    let p = write_config(
        dir.path(),
        "dis.toml",
        "[dims]\nn = 1\nm = 0\n[potential]\nbuiltin = \"quadratic\"\n[weights]\ntorus = [[-4, -4]]\n[bergman.newton]\nescape_radius = 0.5\n",
    );
    let o = run(&["classify"], Some(&p));
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["result"]["discrepancies"].as_array().unwrap().len(), 1);
}

#[test]
fn model_check_exit_codes() {
    let o = run(&["model-check"], Some(&config("f1_model.toml")));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["confirmed"], true);
    assert_eq!(v["result"]["entries"].as_array().unwrap().len(), 56);

    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        "f2.toml",
        "[dims]\nn = 2\nm = 0\n[potential]\nbuiltin = \"hyperbolic\"\nmu = [3.0, -2.0]\nepsilon = 0.5\n[weights]\ntorus = [[2, 4], [-3, -1]]\n",
    );
    assert_eq!(run(&["model-check"], Some(&p)).status.code(), Some(1));
    assert_eq!(run(&["model-check"], Some(&config("empty_box.toml"))).status.code(), Some(0));
}

#[test]
fn berezin_eval_examples() {
    for (element, expected) in [("5*ztop + 3*zeta1", "5"), ("zeta1", "0"), ("(zeta1)*(i*zbar1)", "i")] {
        let o = run(&["berezin-eval", element, "-k", "1"], None);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), expected, "{element}");
    }
    assert_eq!(run(&["berezin-eval", "zeta3", "-k", "1"], None).status.code(), Some(2));
}

#[test]
fn selftest_detects_corrupted_sign_table() {
    assert_eq!(run(&["selftest"], None).status.code(), Some(0));
    let o = run(&["selftest", "--inject-sign-fault"], None);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL sign_table"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("f2_classify.toml");
    let mut bytes = Vec::new();
    for run_dir in ["a", "b"] {
        let out = dir.path().join(run_dir);
        let o = run(
            &["classify", "--format", "both", "--seed", "11", "--out", out.to_str().unwrap()],
            Some(&cfg),
        );
        assert_eq!(o.status.code(), Some(0));
        bytes.push((
            std::fs::read(out.join("classify.json")).unwrap(),
            std::fs::read(out.join("classify.csv")).unwrap(),
        ));
    }
    assert_eq!(bytes[0], bytes[1]);
    let v: serde_json::Value = serde_json::from_slice(&bytes[0].0).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn seed_changes_kahler_samples_and_hash() {
    let a = json(&run(&["verify-kahler", "--seed", "1"], Some(&config("f1_kahler.toml"))));
    let b = json(&run(&["verify-kahler", "--seed", "2"], Some(&config("f1_kahler.toml"))));
    assert_ne!(a["result"]["points"], b["result"]["points"]);
    assert_ne!(a["config_hash"], b["config_hash"]);
}

#[test]
fn both_format_without_out_dir_is_rejected() {
    let o = run(&["classify", "--format", "both"], Some(&config("f1_classify.toml")));
    assert_eq!(o.status.code(), Some(2));
}
