use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_string_lossy().into_owned()
}

fn tropfan(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tropfan"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn stdout(args: &[&str], stdin: Option<&str>) -> String {
    let out = tropfan(args, stdin);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Golden reports; run with `TROPFAN_BLESS=1` to rewrite them.
const GOLDEN: &[(&str, &[&str])] = &[
    ("cross_irreducible", &["check", "irreducible", "cross.tfan"]),
    ("cross_irreducible_json", &["--json", "check", "irreducible", "cross.tfan"]),
    ("line_balance_json", &["--json", "check", "balance", "tropical_line.tfan"]),
    ("weights_121_reduced", &["check", "reduced", "weights_121.tfan"]),
    ("weights_121_divisor_json", &["--json", "compute", "divisor", "weights_121.tfan", "--pl", "min2x0"]),
    ("r2_modify", &["modify", "--fan", "r2.tfan", "--pl", "minxy0"]),
    ("plane_chow_json", &["--json", "compute", "chow", "tropical_plane.tfan"]),
    ("cross_poincare", &["check", "poincare", "cross.tfan"]),
    ("weights_121_star_poincare", &["check", "poincare", "--star", "weights_121.tfan"]),
    ("plane_local", &["check", "local", "tropical_plane.tfan"]),
    ("line_quasilinear_json", &["--json", "quasilinear", "tropical_line.tfan"]),
    ("two_planes_quasilinear", &["quasilinear", "two_planes_r3.tfan"]),
    ("plane_minkowski_json", &["--json", "compute", "minkowski", "tropical_plane.tfan", "--k", "1"]),
    ("plane_recognize", &["recognize-modification", "tropical_plane.tfan", "--direction", "3"]),
    ("plane_star", &["compute", "star", "tropical_plane.tfan", "--cone", "3"]),
];

#[test]
fn golden_reports() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden");
    let bless = std::env::var_os("TROPFAN_BLESS").is_some();
    for (name, args) in GOLDEN {
        let args: Vec<String> =
            args.iter().map(|a| if a.ends_with(".tfan") { data(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let got = stdout(&args, None);
        let path = dir.join(format!("{name}.out"));
        if bless {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &got).unwrap();
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        assert_eq!(got, want, "{name}");
    }
}

#[test]
fn bundled_documents_match_the_corpus() {
    let list = stdout(&["--json", "examples"], None);
    let report: serde_json::Value = serde_json::from_str(&list).unwrap();
    let names: Vec<&str> = report["examples"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"cross"));
    for name in names {
        let bundled = std::fs::read_to_string(data(&format!("{name}.tfan"))).unwrap();
        assert_eq!(stdout(&["examples", "--name", name], None), bundled, "{name}");
        assert!(tropfan(&["check", "balance", "-"], Some(&bundled)).status.success(), "{name}");
    }
}

#[test]
fn reports_are_byte_stable() {
    for args in [
        vec!["--json", "quasilinear", "-"],
        vec!["--json", "check", "poincare", "--star", "-"],
        vec!["--json", "compute", "chow", "-"],
    ] {
        let input = std::fs::read_to_string(data("minx0_modification.tfan")).unwrap();
        assert_eq!(stdout(&args, Some(&input)), stdout(&args, Some(&input)));
    }
}

#[test]
fn bergman_output_pipes_into_quasilinear() {
    let fan = stdout(&["bergman", "--uniform", "2", "4"], None);
    assert_eq!(stdout(&["quasilinear", "-"], Some(&fan)), "quasilinear (certificate depth 2)\n");
    let fan = stdout(&["bergman", "--matroid", &data("u24.matroid")], None);
    let report: serde_json::Value = serde_json::from_str(&stdout(&["--json", "quasilinear", "-"], Some(&fan))).unwrap();
    assert_eq!(report["verdict"], "quasilinear");
    assert_eq!(report["depth"], 2);
}

#[test]
fn certificates_round_trip_through_files() {
    let dir = std::env::temp_dir().join(format!("tropfan-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cert = dir.join("plane.cert");
    let cert = cert.to_str().unwrap();
    let plane = data("tropical_plane.tfan");
    stdout(&["quasilinear", &plane, "--cert", cert], None);
    assert_eq!(stdout(&["verify-cert", "--fan", &plane, "--cert", cert], None), "certificate accepted\n");

    // the certificate of the plane does not certify the quadrant modification
    let other = data("minx0_modification.tfan");
    assert_eq!(stdout(&["verify-cert", "--fan", &other, "--cert", cert], None), "certificate rejected\n");

    // a JSON report can stand in for a certificate file
    let report = dir.join("plane.json");
    std::fs::write(&report, stdout(&["--json", "quasilinear", &plane], None)).unwrap();
    let out = stdout(&["verify-cert", "--fan", &plane, "--cert", report.to_str().unwrap()], None);
    assert_eq!(out, "certificate accepted\n");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn negative_verdicts_exit_zero() {
    let out = tropfan(&["quasilinear", &data("cross.tfan")], None);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "not quasilinear: not irreducible: M1 has rank 2\n");
}

#[test]
fn parse_errors_report_line_and_column() {
    let out = tropfan(&["check", "balance", "-"], Some("{\n  \"format\": \"tfan/1\",\n  \"ambient_rank\": x\n}\n"));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3, column"), "{err}");
}

#[test]
fn semantic_errors_are_named() {
    let doc = r#"{"format": "tfan/1", "ambient_rank": 2, "rays": [["2", "0"]], "cones": [{"rays": [0]}]}"#;
    let out = tropfan(&["check", "balance", "-"], Some(doc));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("not a primitive"));

    let out = tropfan(&["modify", &data("r2.tfan"), "--pl", "nope"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = tropfan(&["check", "balance"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = tropfan(&["compute", "star", &data("r2.tfan"), "--cone", "0,5"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn modification_of_quadrants_is_isomorphic_to_a_product() {
    let m = stdout(&["modify", &data("r2_quadrants.tfan"), "--pl", "minx0"], None);
    let dir = std::env::temp_dir().join(format!("tropfan-iso-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("m.tfan"), dir.join("p.tfan"));
    std::fs::write(&a, m).unwrap();
    let product = stdout(&["compute", "product", &data("tropical_line.tfan"), &data("r1.tfan")], None);
    std::fs::write(&b, product).unwrap();
    let out = stdout(&["isomorphic", a.to_str().unwrap(), b.to_str().unwrap()], None);
    assert_eq!(out, "isomorphic\n");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_all_reproduces_every_criterion() {
    let out = stdout(&["examples", "--verify-all"], None);
    let passes = out.lines().filter(|l| l.starts_with("criterion") && l.contains(" PASS ")).count();
    assert_eq!(passes, 11, "{out}");
}
