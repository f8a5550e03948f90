//! End-to-end runs of the `cherednik` binary: exit codes, report contents,
//! JSON output and determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cherednik(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cherednik"))
        .args(args)
        .env_remove("CHEREDNIK_DATA_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn bundled() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data"))
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for e in fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        let target = to.join(e.file_name());
        if e.file_type().unwrap().is_dir() {
            copy_dir(&e.path(), &target);
        } else {
            fs::copy(e.path(), target).unwrap();
        }
    }
}

#[test]
fn verify_reports_finite_dimension() {
    let o = cherednik(&["verify", "E8/c_1_12/principal"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("dim L(1_x) = 3380"), "{text}");
    assert!(text.contains("[ok] inverse"));
    assert!(text.contains("[ok] annotations"));
}

#[test]
fn verify_all_bundled_blocks_passes() {
    let o = cherednik(&["verify", "--all"]);
    assert_eq!(code(&o), 0);
    let sections = stdout(&o).lines().filter(|l| l.starts_with("== ")).count();
    assert_eq!(sections, 25);
}

#[test]
fn tampered_matrix_is_a_mismatch_naming_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(bundled(), dir.path());
    let path = dir.path().join("F4/c_1_6/principal.json");
    let mut json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    // Turn the first off-diagonal 1 into a 2; the bundled inverse no longer matches.
    let m = json["expected_matrix"].as_array_mut().unwrap();
    let (i, j) = (0..m.len())
        .flat_map(|i| (0..m.len()).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && m[i][j] == 1)
        .unwrap();
    m[i][j] = 2.into();
    let labels: Vec<String> = json["irreps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();

    let o = cherednik(&[
        "--data-dir",
        dir.path().to_str().unwrap(),
        "verify",
        "F4/c_1_6/principal",
    ]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("[FAIL] inverse"), "{text}");
    assert!(text.contains(&format!("[{}, {}]", labels[i], labels[j])), "{text}");
}

#[test]
fn missing_data_is_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = cherednik(&["--data-dir", dir.path().join("nowhere").to_str().unwrap(), "verify"]);
    assert_eq!(code(&o), 2);
    let o = cherednik(&["verify", "E8/c_1_12/no_such_block"]);
    assert_eq!(code(&o), 2);
    let o = cherednik(&["char", "E8/c_1_12/principal", "no_such_label"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_f4_sixth_is_unique_and_matches() {
    let o = cherednik(&["solve", "F4/c_1_6/principal"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("verdict: unique"));
    assert!(text.contains("equals bundled matrix: yes"));
}

#[test]
fn solve_1400_z_resolves_beta_by_support() {
    let o = cherednik(&["solve", "E8/c_1_4/block_1400_z"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("E8 c=1/4 block_1400_z+block_8_z"));
    assert!(text.contains("[M(1008_z):L(3200_x')] ≠ 0  by C6"), "{text}");
}

#[test]
fn explicit_context_file_is_used() {
    let ctx = bundled().join("contexts/E7_c_1_4.json");
    let o = cherednik(&["solve", "E8/c_1_4/block_84_x", "--context", ctx.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("context: E7 at c=1/4"));
    let o = cherednik(&["solve", "E8/c_1_4/block_84_x", "--no-context"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn reduced_constraints_are_ambiguous() {
    let o = cherednik(&["solve", "F4/c_1_6/principal", "--constraints", "C1,C2"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("undetermined: [M("));
}

#[test]
fn unknown_constraint_is_rejected() {
    let o = cherednik(&["solve", "F4/c_1_6/principal", "--constraints", "C1,C99"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn char_of_56_z_prints_laurent_form() {
    let o = cherednik(&["char", "E8/c_1_5/block_8_z", "56_z"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("56(t^-2+t^2)+448(t^-1+t)+720"), "{text}");
    assert!(text.contains("dim 1728"));
}

#[test]
fn char_of_one_element_block_is_the_verma_character() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("single.json");
    let block = serde_json::json!({
        "group": "F4",
        "c": "1/6",
        "name": "single",
        "irreps": ["1_1"],
        "h_weights": {"1_1": "-2"},
        "expected_matrix": [[1]],
    });
    fs::write(&path, block.to_string()).unwrap();
    let o = cherednik(&["char", path.to_str().unwrap(), "1_1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("L(1_1): support 4"), "{text}");
    assert!(text.contains("χ = t^(-2) * (1) / (1-t)^4"), "{text}");
}

#[test]
fn support_lists_every_simple() {
    let o = cherednik(&["support", "F4/c_1_4/block_2_1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("[ok] annotations"));
}

#[test]
fn defect1_from_weights() {
    let o = cherednik(&["defect1", "--weights", "0,1,2", "--dims", "1,2,1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(
        text.contains("support of L(τ1): 6; simples 3; codim + 1 = 3 (equal)"),
        "{text}"
    );
    let o = cherednik(&["defect1", "--weights", "0,1,5", "--dims", "2,3,1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn bundled_shifted_lists_lack_members() {
    let o = cherednik(&["defect1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("member labels are not available"));
}

#[test]
fn json_report_is_machine_readable() {
    let o = cherednik(&["--json", "verify", "E8/c_1_10/principal"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "pass");
    let simples = v["sections"][0]["simples"].as_array().unwrap();
    let one = simples.iter().find(|s| s["label"] == "1_x").unwrap();
    assert_eq!(one["dim"], "14769");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        &["--json", "solve", "E8/c_1_4/block_84_x"][..],
        &["verify", "--all"][..],
        &["solve", "F4/c_1_3/principal"][..],
    ] {
        let a = cherednik(args);
        let b = cherednik(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
