use std::process::{Command, Output};

use gwcone_core::correlators::{CorrelatorKey, Coverage, Insertion};
use gwcone_core::quantization::PotentialJson;
use gwcone_core::{CorrelatorTable, GenusExpandedPotential, Scalar, Target};
use serde_json::Value;

fn gwcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwcone"))
        .args(args)
        .env_remove("GWCONE_TRUNCATION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const SAMPLE_T: &str = r#"{"vars":["x"],"terms":[{"z":0,"class":"1","exp":{"x":1},"coeff":"1"},{"z":1,"class":"1","exp":{"x":1},"coeff":"1/2"}]}"#;

#[test]
fn correlator_genus_one() {
    let o = gwcone(&["wk", "correlator", "--g", "1", "--k", "1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "<tau_1>_1 = 1/24");
    assert!(out.contains("dvv: 1/24"));
}

#[test]
fn correlator_reports_all_values() {
    let o = gwcone(&["wk", "correlator", "--g", "2", "--k", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "<tau_4>_2 = 1/1152\nengine: 1/1152\ndvv: 1/1152\nstring: n/a (genus 2)\n"
    );

    let o = gwcone(&[
        "wk",
        "correlator",
        "--g",
        "0",
        "--k",
        "0",
        "--k",
        "0",
        "--k",
        "0",
        "--k",
        "2",
        "--k",
        "0",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("string: 1\n"));
}

#[test]
fn unstable_correlator_is_a_usage_error() {
    assert_eq!(code(&gwcone(&["wk", "correlator", "--g", "0", "--k", "0,0"])), 2);
}

#[test]
fn cone_point_of_zero_is_minus_z() {
    let o = gwcone(&["cone", "point", "--t", "{}"]);
    assert_eq!(code(&o), 0);
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let terms = j["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["z"], 1);
    assert_eq!(terms[0]["coeff"], "-1");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("j.json");
    let a = gwcone(&[
        "cone",
        "point",
        "--t",
        SAMPLE_T,
        "--deg",
        "4",
        "--output",
        path.to_str().unwrap(),
    ]);
    let b = gwcone(&["cone", "point", "--t", SAMPLE_T, "--deg", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn cone_check_accepts_cone_points_and_rejects_perturbations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("j.json");
    let o = gwcone(&[
        "cone",
        "point",
        "--t",
        SAMPLE_T,
        "--deg",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let arg = format!("@{}", path.display());
    let o = gwcone(&["cone", "check", "--f", &arg, "--deg", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS"));

    let bad =
        r#"{"vars":["x"],"terms":[{"z":1,"class":"1","coeff":"-1"},{"z":-1,"class":"1","exp":{"x":2},"coeff":"1"}]}"#;
    let o = gwcone(&["cone", "check", "--f", bad, "--deg", "3"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout(&o), "FAIL: p_0^1 = -x^2, expected 0\n");
}

#[test]
fn localization_matches_the_cone() {
    let o = gwcone(&["localize", "verify-theorem1", "--t", SAMPLE_T, "--deg", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS\n"));

    let o = gwcone(&["localize", "push", "--t", SAMPLE_T, "--deg", "2"]);
    assert_eq!(code(&o), 0);
    let push: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cases: Vec<&str> = push["contributions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["case"].as_str().unwrap())
        .collect();
    assert!(cases.contains(&"exceptional(n=1, d=0)"));
    assert!(cases.contains(&"exceptional(n=0, d=0)"));
    assert!(cases.iter().any(|c| c.starts_with("general(n=2")));
}

#[test]
fn user_table_target() {
    let target = Target::projective_line();
    let mut table = CorrelatorTable::empty(target);
    let one = Scalar::one();
    table
        .insert(
            CorrelatorKey::new(
                0,
                vec![Insertion::new(0, 0), Insertion::new(0, 0), Insertion::new(0, 1)],
                vec![0],
            ),
            one.clone(),
        )
        .unwrap();
    table
        .insert(
            CorrelatorKey::new(0, vec![Insertion::new(0, 1), Insertion::new(0, 1)], vec![1]),
            one.clone(),
        )
        .unwrap();
    table
        .insert(CorrelatorKey::new(0, vec![Insertion::new(0, 1)], vec![1]), one)
        .unwrap();
    let table = table.restricted(Coverage {
        max_genus: 0,
        max_points: 3,
        max_psi: Some(0),
        max_degree: 1,
    });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p1.json");
    std::fs::write(&path, serde_json::to_string(&table.to_json()).unwrap()).unwrap();

    let t = r#"{"vars":["s"],"terms":[{"z":0,"class":"H","exp":{"s":1},"coeff":"1"}]}"#;
    let common = [
        "--target",
        path.to_str().unwrap(),
        "--deg",
        "2",
        "--depth",
        "0",
        "--zdepth",
        "1",
    ];
    let o = gwcone(&[&["localize", "verify-theorem1", "--t", t][..], &common[..]].concat());
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    // P¹ has no Witten-Kontsevich correlators
    let o = gwcone(&[&["wk", "correlator", "--g", "1", "--k", "1"][..], &common[..]].concat());
    assert_eq!(code(&o), 2);
}

#[test]
fn invalid_configurations_are_usage_errors() {
    assert_eq!(
        code(&gwcone(&[
            "cone", "point", "--t", "{}", "--depth", "6", "--zdepth", "5"
        ])),
        2
    );
    assert_eq!(code(&gwcone(&["cone", "point", "--t", "{not json"])), 2);
    assert_eq!(
        code(&gwcone(&[
            "cone",
            "point",
            "--t",
            r#"{"terms":[{"z":0,"class":"q","coeff":"1"}]}"#
        ])),
        2
    );
    assert_eq!(code(&gwcone(&["wk", "potential", "--deg", "0"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_gwcone"))
        .args(["wk", "potential"])
        .env("GWCONE_TRUNCATION", "deg=4,width=2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn truncation_profile_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_gwcone"))
        .args(["wk", "potential"])
        .env("GWCONE_TRUNCATION", "deg=3,genus=1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let json: PotentialJson = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json.genera.len(), 2);
    assert_eq!(json.genera[0].trunc.deg, 3);
    // flags override the environment
    let o = Command::new(env!("CARGO_BIN_EXE_gwcone"))
        .args(["wk", "potential", "--gmax", "0"])
        .env("GWCONE_TRUNCATION", "deg=3,genus=1")
        .output()
        .unwrap();
    let json: PotentialJson = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json.genera.len(), 1);
}

#[test]
fn potential_json_loads_back() {
    let o = gwcone(&["wk", "potential", "--gmax", "1", "--deg", "4"]);
    assert_eq!(code(&o), 0);
    let json: PotentialJson = serde_json::from_slice(&o.stdout).unwrap();
    let pot = GenusExpandedPotential::from_json(&json).unwrap();
    let f1 = pot.genus(1).unwrap().to_string();
    assert!(f1.starts_with("1/24*t_1"), "{f1}");
    assert!(pot.genus(0).unwrap().to_string().starts_with("1/6*t_0^3"));
}

#[test]
fn virasoro_constraints_hold() {
    let o = gwcone(&["virasoro", "verify", "--gmax", "1", "--deg", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "L_-1: 0\nL_0: 0\nL_1: 0\nL_2: 0\nL_3: 0\nL_4: 0\nPASS\n");
    let o = gwcone(&["virasoro", "verify", "--n", "-2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn quantized_string_operator() {
    let o = gwcone(&["quantize", "--operator", "ln", "--n", "-1", "--depth", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "h = -p_0*q_1 - p_1*q_2 - 1/2*q_0^2\nop = -1/2*t_0^2*hbar^-1 + d/dt_0 - t_1*d/dt_0 - t_2*d/dt_1\n"
    );
}

#[test]
fn quantized_commutator_constant() {
    let o = gwcone(&["quantize", "--n", "-1", "--with", "1", "--depth", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("[l_-1, l_1] - (2) l_0 = -1/8\n"), "{}", stdout(&o));
}

#[test]
fn symplectic_pairing() {
    let f = r#"{"terms":[{"z":0,"class":"1","coeff":"2"}]}"#;
    let g = r#"{"terms":[{"z":-1,"class":"1","coeff":"3"}]}"#;
    let o = gwcone(&["hspace", "pair", "--f", f, "--g", g]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "6\n");
    // Ω is antisymmetric
    let o = gwcone(&["hspace", "pair", "--f", g, "--g", f]);
    assert_eq!(stdout(&o), "-6\n");
}

#[test]
fn selftest_exit_code_follows_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = gwcone(&[
        "selftest",
        "--gmax",
        "2",
        "--deg",
        "6",
        "--output",
        path.to_str().unwrap(),
    ]);
    let report: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let criteria = report["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 8);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 9);
    for (line, c) in lines.iter().zip(criteria) {
        let pass = c["identity_holds"].as_bool().unwrap() && c["within_budget"].as_bool().unwrap();
        assert!(line.starts_with(if pass { "PASS" } else { "FAIL" }), "{line}");
    }
    let expected = if report["passed"].as_bool().unwrap() { 0 } else { 3 };
    assert_eq!(code(&o), expected);
}
