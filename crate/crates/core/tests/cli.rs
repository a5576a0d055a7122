use std::io::Write;
use std::process::{Command, Output, Stdio};

fn nwidth(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nwidth"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(text) = stdin {
        pipe.write_all(text.as_bytes()).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const CASE3: &str = r#"{"N":16,"n":4,"q":2,"balls":[{"p":4,"nu":1},{"p":1,"nu":2}]}"#;

#[test]
fn estimate_from_stdin() {
    let out = nwidth(&["estimate", "--config", "-"], Some(CASE3));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,N,q,case,phi,phi1,phi2,phi3,upper,lower,alpha_star_p,beta_star_p,warnings"));
    assert_eq!(lines.next(), Some("4,16,2,Case3,1.2599210498948732,,,,,,4,1,"));
}

#[test]
fn flags_override_the_config() {
    let out = nwidth(&["estimate", "--config", "-", "--q", "4", "--N", "64", "--n", "8", "--format", "jsonl"], Some(CASE3));
    assert!(out.status.success());
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(row["N"], 64);
    assert_eq!(row["q"], 4.0);
    assert_eq!(row["case"], "Case5");
}

#[test]
fn configs_shipped_with_the_crate_run() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");
    for (cmd, file, case) in [
        ("estimate", "case1_cube_and_l4.json", "Case1"),
        ("sandwich", "case3_l4_and_l1.json", "Case3"),
        ("sweep", "case5_sweep.json", "Case5"),
    ] {
        let path = format!("{dir}/{file}");
        let out = nwidth(&[cmd, "--config", &path], None);
        assert!(out.status.success(), "{file}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains(case), "{file}");
    }
}

#[test]
fn writes_to_the_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("norm.csv");
    let cfg = r#"{"N":10,"balls":[{"p":2,"nu":1},{"p":1,"nu":100}]}"#;
    let out = nwidth(&["normalize", "--config", "-", "--output", path.to_str().unwrap()], Some(cfg));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "p,nu,nu_star,nu_star_star,changed\n2,1,1,1,false\n1,100,100,3.1622776601683795,true\n");
}

#[test]
fn check_without_violations_is_header_only() {
    let cfg = r#"{"N":16,"balls":[{"p":4,"nu":1},{"p":1,"nu":2}]}"#;
    let out = nwidth(&["check", "--config", "-"], Some(cfg));
    assert!(out.status.success());
    assert_eq!(stdout(&out), "p_alpha,p_beta,kappa,N\n");
}

#[test]
fn exit_codes() {
    let bad_q = r#"{"N":8,"n":2,"q":0.5,"balls":[{"p":2,"nu":1}]}"#;
    let out = nwidth(&["estimate", "--config", "-"], Some(bad_q));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q must be ≥ 1 or 'inf'"));

    let unknown = r#"{"N":8,"n":2,"q":2,"balls":[{"p":2,"nu":1}],"colour":"red"}"#;
    let out = nwidth(&["estimate", "--config", "-"], Some(unknown));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let mismatch = r#"{"command":"sweep","N":8,"balls":[{"p":2,"nu":1}]}"#;
    assert_eq!(nwidth(&["estimate", "--config", "-"], Some(mismatch)).status.code(), Some(2));

    let raw = r#"{"N":10,"n":2,"q":2,"balls":[{"p":2,"nu":1},{"p":1,"nu":100}]}"#;
    assert_eq!(nwidth(&["estimate", "--config", "-"], Some(raw)).status.code(), Some(3));
    assert_eq!(nwidth(&["estimate", "--config", "-", "--auto-normalize", "true"], Some(raw)).status.code(), Some(0));

    let linf = r#"{"N":8,"n":2,"q":"inf","balls":[{"p":1,"nu":1}]}"#;
    assert_eq!(nwidth(&["estimate", "--config", "-"], Some(linf)).status.code(), Some(4));

    let missing = nwidth(&["estimate", "--config", "/nonexistent/config.json"], None);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn duplicate_exponents_warn_on_stderr() {
    let cfg = r#"{"N":8,"n":2,"q":2,"balls":[{"p":2,"nu":1},{"p":2,"nu":0.5}]}"#;
    let out = nwidth(&["estimate", "--config", "-"], Some(cfg));
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("repeats p = 2"));
}
