use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rigidplan::{evaluate_cost, Configuration, PlanarPoint, Trajectory};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn rigidplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidplan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_scenario(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("scenario.json");
    fs::write(&path, body).unwrap();
    path
}

fn plan_into(dir: &Path, scenario: &Path) -> serde_json::Value {
    let out = rigidplan(&[
        "plan",
        scenario.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn read_csv(path: &Path) -> Trajectory {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let width = reader.headers().unwrap().len();
    let n = (width - 4) / 4;
    let (mut times, mut states, mut controls) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let row: Vec<f64> = record.unwrap().iter().map(|v| v.parse().unwrap()).collect();
        assert_eq!(row.len(), width);
        times.push(row[0]);
        let agent = |i: usize| &row[1 + 4 * i..5 + 4 * i];
        states.push(
            Configuration::new(
                (0..n)
                    .map(|i| PlanarPoint::new(agent(i)[0], agent(i)[1]))
                    .collect(),
            )
            .unwrap(),
        );
        controls.push(
            (0..n)
                .map(|i| PlanarPoint::new(agent(i)[2], agent(i)[3]))
                .collect(),
        );
    }
    Trajectory::new(times, states, Some(controls)).unwrap()
}

#[test]
fn plan_reproduces_two_agent_cost() {
    let dir = tempfile::tempdir().unwrap();
    let summary = plan_into(dir.path(), &scenario("example1_two_agents.json"));
    let cost = summary["cost"].as_f64().unwrap();
    assert!((cost - 0.6355).abs() <= 5e-4, "{cost}");
    assert!(summary["rigidity_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(summary["n_agents"], 2);
}

#[test]
fn csv_round_trips_cost() {
    for name in [
        "example1_two_agents.json",
        "three_agents.json",
        "four_agents.json",
    ] {
        let dir = tempfile::tempdir().unwrap();
        let summary = plan_into(dir.path(), &scenario(name));
        let traj = read_csv(&dir.path().join("trajectory.csv"));
        let cost = summary["cost"].as_f64().unwrap();
        assert!(
            (evaluate_cost(&traj).unwrap() - cost).abs() <= 1e-9 * cost.max(1.0),
            "{name}"
        );
        assert_eq!(traj.len(), 201);
    }
}

#[test]
fn csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    plan_into(dir.path(), &scenario("three_agents.json"));
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "t,x1,y1,ux1,uy1,x2,y2,ux2,uy2,x3,y3,ux3,uy3,xc,yc,theta"
    );
    assert!(text.ends_with('\n'));
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    plan_into(a.path(), &scenario("four_agents.json"));
    plan_into(b.path(), &scenario("four_agents.json"));
    for file in ["trajectory.csv", "summary.json"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap()
        );
    }
}

#[test]
fn mismatched_lists_are_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        r#"{"name": "bad", "agents_initial": [[0,0],[1,0]], "agents_terminal": [[0,0]], "t_f": 1}"#,
    );
    let out = rigidplan(&[
        "plan",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn unknown_fields_and_bad_values_are_malformed() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        r#"{"name": "x", "agents_initial": [[0,0]], "agents_terminal": [[1,0]], "t_f": 1, "speed": 2}"#,
        r#"{"name": "x", "agents_initial": [[0,0]], "agents_terminal": [[1,0]], "t_f": -1}"#,
        r#"{"name": "x", "agents_initial": [], "agents_terminal": [], "t_f": 1}"#,
        r#"{"name": "x", "agents_initial": [[0,0]], "agents_terminal": [[1,0]], "t_f": 1, "samples": 1}"#,
        "not json",
    ] {
        let path = write_scenario(dir.path(), body);
        let out = rigidplan(&["verify", path.to_str().unwrap()]);
        assert_eq!(code(&out), 2, "{body}: {}", stderr(&out));
    }
}

#[test]
fn mirrored_triangle_names_reflection() {
    let dir = tempfile::tempdir().unwrap();
    let out = rigidplan(&[
        "plan",
        scenario("mirrored_triangle.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("reflection"), "{}", stderr(&out));
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn non_congruent_boundaries_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        r#"{"name": "x", "agents_initial": [[0,0],[1,0]], "agents_terminal": [[0,0],[2,0]], "t_f": 1}"#,
    );
    let out = rigidplan(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("congruen"), "{}", stderr(&out));
}

#[test]
fn verify_passes_bundled_scenarios() {
    for name in [
        "example1_two_agents.json",
        "three_agents.json",
        "four_agents.json",
    ] {
        let out = rigidplan(&["verify", scenario(name).to_str().unwrap()]);
        assert_eq!(
            code(&out),
            0,
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn verify_with_tiny_thresholds_fails() {
    let out = rigidplan(&[
        "verify",
        scenario("example1_two_agents.json").to_str().unwrap(),
        "--thresholds",
        "1e-20",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn missing_file_is_an_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = rigidplan(&["verify", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unwritable_output_is_an_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = rigidplan(&[
        "plan",
        scenario("example1_two_agents.json").to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn oracle_agrees_on_two_agents() {
    let out = rigidplan(&[
        "oracle",
        scenario("example1_two_agents.json").to_str().unwrap(),
        "--knots",
        "50",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("converged"));
    let gap: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("cost gap"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(gap.abs() <= 0.01);
}

#[test]
fn oracle_rejects_too_few_knots() {
    let out = rigidplan(&[
        "oracle",
        scenario("example1_two_agents.json").to_str().unwrap(),
        "--knots",
        "2",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_reports_non_convergence() {
    let out = rigidplan(&[
        "oracle",
        scenario("four_agents.json").to_str().unwrap(),
        "--max-iters",
        "1",
    ]);
    assert_eq!(code(&out), 5, "{}", stderr(&out));
}

#[test]
fn flags_override_scenario_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = rigidplan(&[
        "plan",
        scenario("example1_two_agents.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--samples",
        "11",
        "--winding",
        "-1",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["samples"], 11);
    assert_eq!(summary["winding"], -1);
    assert!(summary["cost"].as_f64().unwrap() > 0.6355);
    assert_eq!(read_csv(&dir.path().join("trajectory.csv")).len(), 11);
}
