use std::process::{Command, Output};

fn gwlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwlab")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = gwlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().trim().to_string()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = args.to_vec();
    a.push("--json");
    serde_json::from_str(&stdout(&a)).unwrap()
}

#[test]
fn invariants_of_a_binary_form() {
    let v = json(&["invariants", "<2,10>"]);
    assert_eq!(v["dim"], 2);
    assert_eq!(v["disc"], "-5");
    // (2, 10)_2 = (2, 10)_5 = −1.
    assert_eq!(v["hasse"], serde_json::json!([["2", -1], ["5", -1]]));
    assert_eq!(v["torsion"], false);
}

#[test]
fn isometry_verdicts() {
    assert_eq!(stdout(&["isometric", "<1,1>", "<2,2>"]), "true");
    assert_eq!(stdout(&["isometric", "<1,1>", "<3,3>"]), "false");
    assert_eq!(stdout(&["--field", "F7", "isometric", "<1,1>", "<3,3>"]), "true");
}

#[test]
fn hyperbolic_plane_and_group_ring_expressions() {
    let x = stdout(&["eval", "<1,2> - H"]);
    assert_eq!(stdout(&["isometric", &x, "<2> - <-1>"]), "true");
    let g = stdout(&["--vars", "2", "eval", "P(2) * <t1>"]);
    assert!(g.contains("<t1 t2>"), "{g}");
}

#[test]
fn norms_transfers_and_exponentials() {
    // tr(Q(√5)) = ⟨2, 10⟩ and (−1)^{tr A} = tr(A) − 1.
    let t = stdout(&["transfer", "--algebra", "Q[sqrt 5]", "--expr", "1"]);
    assert_eq!(stdout(&["isometric", &t, "<2,10>"]), "true");
    let e = stdout(&["exp", "--base", "-1", "--exponent", "<2,10>"]);
    assert_eq!(stdout(&["isometric", &e, "<2,10> - 1"]), "true");
    // N over a split pair is the product of the parts.
    let n = stdout(&["norm", "--algebra", "Q x Q", "--expr", "<3>", "--expr", "<5>"]);
    assert_eq!(stdout(&["isometric", &n, "<15>"]), "true");
}

#[test]
fn logarithm_of_a_torsion_unit() {
    // Over ℚ torsion in I³ vanishes, so log(1 + z) = z for z ∈ I²_tor.
    let z = "(<3> - 1)*(<-1> - 1)";
    assert_eq!(stdout(&["isometric", z, "0"]), "false");
    let y = stdout(&["log", "--expr", &format!("1 + {z}")]);
    assert_eq!(stdout(&["isometric", &y, z]), "true");
}

#[test]
fn hilbert_symbols() {
    assert_eq!(stdout(&["hilbert", "-1", "-1", "inf"]), "-1");
    assert_eq!(stdout(&["hilbert", "-1", "-1", "2"]), "-1");
    assert_eq!(stdout(&["hilbert", "2", "7", "7"]), "1");
}

#[test]
fn suite_reports_are_reproducible() {
    let dir = std::env::temp_dir();
    let a = dir.join("gwlab-cli-report-a.json");
    let b = dir.join("gwlab-cli-report-b.json");
    for p in [&a, &b] {
        stdout(&["check", "hilbert", "--samples", "30", "--seed", "7", "--out", p.to_str().unwrap()]);
    }
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let v: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["suite"], "hilbert");
    assert!(v["anchor"].as_str().unwrap().contains("reciprocity"));
}

#[test]
fn errors_have_distinct_exit_codes() {
    assert_eq!(gwlab(&["check", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(gwlab(&["--field", "F4", "eval", "1"]).status.code(), Some(2));
    let out = gwlab(&["eval", "<1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}
