use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scott-tiler"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn spherical_and_euclidean_signatures_are_usage_errors() {
    let out = run(&["analyze", "--p", "2", "--q", "3", "--r", "5"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("SPHERICAL"));
    let out = run(&["analyze", "--p", "4", "--q", "4", "--r", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("EUCLIDEAN"));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(code(&run(&["analyze", "--p", "3"])), 2);
    assert_eq!(
        code(&run(&[
            "order", "--p", "1", "--q", "7", "--r", "2", "--word", "x"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "order", "--p", "3", "--q", "7", "--r", "2", "--word", "w"
        ])),
        2
    );
    let out = Command::new(env!("CARGO_BIN_EXE_scott-tiler"))
        .args(["grid", "--max-index", "4"])
        .env("SCOTT_TILER_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn order_of_scott_element_is_infinite() {
    let out = run(&[
        "order", "--p", "3", "--q", "7", "--r", "2", "--word", "x y^-2",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("order INFINITE"), "{text}");
    assert!(text.contains("trace"));

    let out = run(&["order", "--p", "3", "--q", "7", "--r", "2", "--word", "x y"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("order 2"));
}

#[test]
fn witness_search() {
    let out = run(&[
        "witness", "--p", "3", "--q", "3", "--r", "4", "--a", "x", "--b", "y",
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("witness"));
    let out = run(&[
        "witness", "--p", "3", "--q", "3", "--r", "4", "--a", "x", "--b", "x",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn grid_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    let out = run(&["grid", "--max-index", "6", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn analyze_writes_report_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let svg = dir.path().join("r.svg");
    let out = run(&[
        "analyze",
        "--p",
        "3",
        "--q",
        "7",
        "--r",
        "2",
        "--json",
        json.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["coloring"]["bound"], 7);
    let lines = v["family"]["num_lines"].as_u64().unwrap() as usize;
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(doc.matches(r#"class="line""#).count(), lines);
    // nothing left behind by the atomic writes
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn failed_check_exits_1() {
    // short words at a large radius leave the search unsettled
    let out = run(&[
        "analyze",
        "--p",
        "4",
        "--q",
        "5",
        "--r",
        "2",
        "--fixed-radius",
        "--radius",
        "6",
        "--max-wordlen",
        "6",
    ]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL family.stabilized"));
}
