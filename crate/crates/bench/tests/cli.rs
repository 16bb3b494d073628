use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use taylorsolve::detect_pattern;
use taylorsolve::problems::{brusselator_steady, BrusselatorConfig};
use taylorsolve_bench::table::csv_header;
use taylorsolve_bench::Experiment;

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(args)
        .output()
        .expect("bench binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/results.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(json: &str) -> Value {
    let value: Value = serde_json::from_str(json).expect("output is JSON");
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
    value
}

#[test]
fn scalar_csv_has_documented_header() {
    let o = bench(&["scalar", "--reps", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(csv_header(Experiment::Scalar)));
    assert_eq!(lines.count(), 30);
}

#[test]
fn every_experiment_header_matches() {
    let runs: [(&[&str], Experiment); 3] = [
        (
            &["chandrasekhar", "--sizes", "4", "--reps", "1"],
            Experiment::Chandrasekhar,
        ),
        (
            &["brusselator", "--sizes", "4", "--reps", "1"],
            Experiment::Brusselator,
        ),
        (
            &["ode-wp", "--sizes", "4", "--t-end", "1.5", "--tol", "1e-2,1e-3"],
            Experiment::OdeWp,
        ),
    ];
    for (args, exp) in runs {
        let o = bench(args);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{exp}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(stdout(&o).lines().next(), Some(csv_header(exp)), "{exp}");
    }
}

#[test]
fn json_output_validates_against_schema() {
    let runs: [&[&str]; 4] = [
        &["scalar", "--orders", "1,2", "--reps", "1"],
        &["chandrasekhar", "--sizes", "4,8", "--reps", "1"],
        &["brusselator", "--sizes", "4", "--reps", "1"],
        &["ode-wp", "--sizes", "4", "--t-end", "1.5", "--tol", "1e-2,1e-3"],
    ];
    for args in runs {
        let mut full = args.to_vec();
        full.extend(["--format", "json"]);
        let o = bench(&full);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let v = assert_valid(&stdout(&o));
        assert_eq!(v["experiment"], args[0]);
        assert!(v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| c["passed"] == true));
    }
}

#[test]
fn schema_rejects_malformed_rows() {
    let o = bench(&["chandrasekhar", "--sizes", "4", "--reps", "1", "--format", "json"]);
    let mut v = assert_valid(&stdout(&o));
    v["rows"][0]["method"] = Value::from("Secant");
    assert!(!schema().is_valid(&v));
    let mut v = assert_valid(&stdout(&o));
    v["rows"][0].as_object_mut().unwrap().remove("iterations");
    assert!(!schema().is_valid(&v));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.json");
    fs::write(
        &cfg,
        format!(
            "# small sweep\nsizes = 4, 8\nmethods = newton, halley\nformat = csv\nreps = 1\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = bench(&[
        "chandrasekhar",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--sizes",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v = assert_valid(&fs::read_to_string(&out).unwrap());
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["n"] == 8));
    assert_eq!(v["metadata"]["repetitions"], 1);
}

#[test]
fn pattern_dump_lists_row_col_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("pattern.txt");
    let o = bench(&[
        "brusselator",
        "--sizes",
        "3,4",
        "--reps",
        "1",
        "--dump-pattern",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&dump).unwrap();
    let mut entries: Vec<(usize, usize)> = text
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace().map(|t| t.parse::<usize>().unwrap());
            let pair = (it.next().unwrap(), it.next().unwrap());
            assert!(it.next().is_none(), "line `{l}`");
            pair
        })
        .collect();
    // The dump is for the largest K.
    let pattern = detect_pattern(&brusselator_steady(BrusselatorConfig::new(4)));
    let mut expected: Vec<(usize, usize)> = pattern
        .rows()
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().map(move |&j| (i, j)))
        .collect();
    entries.sort_unstable();
    expected.sort_unstable();
    assert_eq!(entries.len(), 6 * 32);
    assert_eq!(entries, expected);
}

#[test]
fn failing_check_exits_one() {
    // Order 1 from x0 = 0 cannot reach |f| <= 1e-300 in 100 iterations on every case.
    let o = bench(&["scalar", "--orders", "1", "--tol", "1e-300", "--reps", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(bench(&["spline"]).status.code(), Some(2));
    assert_eq!(bench(&["scalar", "--orders", "9"]).status.code(), Some(2));
    assert_eq!(bench(&["brusselator", "--sizes", "2"]).status.code(), Some(2));
    assert_eq!(bench(&["scalar", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(
        bench(&["scalar", "--dump-pattern", "p.txt"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "sizes = 4\nwidth = 3\n").unwrap();
    let o = bench(&["chandrasekhar", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn acceptance_subset_prints_one_line_per_criterion() {
    let o = bench(&["acceptance", "--criteria", "1,2,7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[..3].iter().all(|l| l.contains(" PASS ")));
    assert_eq!(lines[3], "3/3 criteria passed");
}
