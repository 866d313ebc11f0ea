use std::process::{Command, Output};

fn invh2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invh2"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn compute_writes_report_and_representatives() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = invh2(&["compute", "k4", "--out", out]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("result: H2 = Z/2 (2 classes)"), "{text}");
    assert_eq!(
        std::fs::read_to_string(dir.path().join("report.txt"))
            .unwrap()
            .lines()
            .next(),
        text.lines().next()
    );
    for i in 0..2 {
        assert!(dir.path().join(format!("class{i}.tensor")).exists());
        let v = invh2(&[
            "verify",
            dir.path()
                .join(format!("class{i}.cocycle"))
                .to_str()
                .unwrap(),
        ]);
        assert!(v.status.success(), "{}", stdout(&v));
    }
}

#[test]
fn compute_is_deterministic() {
    let a = invh2(&[
        "compute",
        "z4xz2",
        "--coeff",
        "invertible",
        "--branch-report",
    ]);
    let b = invh2(&[
        "compute",
        "z4xz2",
        "--coeff",
        "invertible",
        "--branch-report",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn corrupted_cocycle_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(invh2(&["compute", "k4", "--out", out]).status.success());
    let path = dir.path().join("class1.cocycle");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let last = lines.len() - 1;
    let mut parts: Vec<&str> = lines[last].split_whitespace().collect();
    parts[2] = "7";
    lines[last] = parts.join(" ");
    std::fs::write(&path, lines.join("\n")).unwrap();
    let v = invh2(&["verify", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1), "{}", stdout(&v));
    assert!(stdout(&v).contains("FAIL"));
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(invh2(&["compute", "no-such-input"]).status.code(), Some(2));
    assert_eq!(invh2(&["oracle", "s3"]).status.code(), Some(2));
}

#[test]
fn oracle_and_fsymbols() {
    let o = invh2(&["oracle", "2,4"]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("agree\n"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ty.skeletal");
    let f = invh2(&["fsymbols", "ty-k4-kp", "--out", path.to_str().unwrap()]);
    assert!(f.status.success());
    assert!(stdout(&f).contains("pentagon: ok"));
    let c = invh2(&["compute", path.to_str().unwrap()]);
    assert!(
        stdout(&c).contains("result: H2 = trivial group (1 class)"),
        "{}",
        stdout(&c)
    );
}
