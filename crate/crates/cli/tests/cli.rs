use std::process::{Command, Output};

fn qinduce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qinduce"))
        .args(args)
        .env_remove("QINDUCE_DEGREE")
        .env_remove("QINDUCE_WINDOW")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_kappa_fixture_at_degree_three() {
    let o = qinduce(&["check", "e_kappa_2", "--degree", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[PASS]"));
}

#[test]
fn broken_fixture_names_the_overlap() {
    let o = qinduce(&["check", "broken_confluence_demo"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("confluence.broken_confluence_demo"));
    assert!(out.contains("a*b*a"), "{out}");
}

#[test]
fn induce_prints_the_a1_display() {
    let o = qinduce(&["induce", "e_kappa_2", "--character", "1", "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.contains("ind(rho[c[1]])(a1) =")).expect("a1 display");
    assert!(line.contains("(1/2*v^2 + 1/2)⊗(a1)"), "{line}");
}

#[test]
fn induce_writes_a_json_description() {
    let dir = std::env::temp_dir().join(format!("qinduce-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ind.json");
    let o = qinduce(
        &["induce", "--fixture", "e_q_2", "--subgroup", "diagonal", "--character", "k", "--degree", "2", "--report"]
            .iter()
            .copied()
            .chain([path.to_str().unwrap()])
            .collect::<Vec<_>>(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["subgroup"], "diagonal");
    assert_eq!(v["basis"].as_array().unwrap().len(), v["dimension"].as_u64().unwrap() as usize);
    assert_eq!(v["coaction"].as_array().unwrap().len(), v["basis"].as_array().unwrap().len());
    assert_eq!(v["ok"], true);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["properties", "e_kappa_2", "--degree", "2", "--format", "json", "--seed", "3"];
    let (a, b) = (qinduce(&args), qinduce(&args));
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().len() > 10);
}

#[test]
fn degree_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qinduce"))
        .args(["induce", "e_kappa_2", "--character", "0"])
        .env("QINDUCE_DEGREE", "1")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("degree 1: dimension"), "{}", stdout(&o));
}

#[test]
fn shifted_section_fails_its_unit() {
    let o = qinduce(&["check-section", "e_q_2", "--subgroup", "hyperboloid", "--set", "r=1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("section.unit"));
    let o = qinduce(&["check-section", "e_q_2", "--subgroup", "hyperboloid", "--set", "r=0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qinduce(&["nonsense"]).status.code(), Some(2));
    assert_eq!(qinduce(&["induce", "e_kappa_2", "--character", "1", "--comodule", "pair"]).status.code(), Some(2));
}

#[test]
fn missing_fixture_is_an_error() {
    let o = qinduce(&["check", "/nonexistent/fixture.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}
