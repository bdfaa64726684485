use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn psc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psc")).args(args).env_remove("PSC_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(rel: &str) -> String {
    root().join(rel).to_string_lossy().into_owned()
}

#[test]
fn verify_surface_patch() {
    let o = psc(&["verify", &path("graphs/surface5x5.psc")]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("N_Q=25 N_S=24 N_σ=4"), "{out}");
    assert!(out.trim_end().ends_with("OK"));
}

#[test]
fn verify_orientation_dump_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("arrows.txt");
    let g = path("graphs/strip5.psc");
    assert!(psc(&["verify", &g, "--dump", dump.to_str().unwrap()]).status.success());
    assert!(psc(&["verify", &g, "--orientation", dump.to_str().unwrap()]).status.success());

    // reversing a single arrow breaks both faces on either side of it
    let text = std::fs::read_to_string(&dump).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let t: Vec<&str> = lines[0].split_whitespace().collect();
    lines[0] = format!("arrow {} {}", t[2], t[1]);
    std::fs::write(&dump, lines.join("\n")).unwrap();
    let o = psc(&["verify", &g, "--orientation", dump.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stdout(&o).lines().last().unwrap().starts_with("ERR InvalidPath"), "{}", stdout(&o));
}

#[test]
fn compile_stabilizer_is_four_letters() {
    let o = psc(&["compile", "stabilizer", &path("graphs/surface5x5.psc"), "6.E"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    let (sign, letters) = first.split_once('|').unwrap();
    assert_eq!(sign, "+1");
    assert_eq!(letters.chars().filter(|&c| c != 'I').count(), 4);
    assert!(out.contains("U+\nphase") && out.contains("U-\nphase"));
}

#[test]
fn run_double_braid_both_backends() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rec.json");
    let o = psc(&["run", &path("scenarios/double_braid.scn"), "--backend", "both", "--seed", "11", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let rec: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rec["seed"], 11);
    let outcomes: Vec<i64> =
        rec["instructions"].as_array().unwrap().iter().filter_map(|i| i["outcome"].as_i64()).collect();
    assert_eq!(outcomes, [1, 1, 1, -1, -1, -1, -1]);
}

#[test]
fn run_is_byte_identical_and_reads_env_seed() {
    let sc = path("scenarios/double_braid.scn");
    let a = psc(&["run", &sc, "--seed", "5"]);
    let b = Command::new(env!("CARGO_BIN_EXE_psc")).args(["run", &sc]).env("PSC_SEED", "5").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let paths = dir.path().join("paths.txt");
    std::fs::write(&paths, "wilson 0/W,1,2/E\nthooft 10.E,11.E,16.E\nloop 12,13,18,17\n").unwrap();
    let svg = dir.path().join("out.svg");
    let o = psc(&[
        "render",
        &path("graphs/surface5x5.psc"),
        "--paths",
        paths.to_str().unwrap(),
        "--orientation",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("stroke-dasharray").count(), 2);
}

#[test]
fn errors_are_machine_readable() {
    let g = path("graphs/surface5x5.psc");
    for (args, code) in [
        (vec!["compile", "stabilizer", g.as_str(), "nope"], "Parse"),
        (vec!["compile", "line", g.as_str(), "6,8,13"], "SlotMissing"),
        (vec!["verify", "/nonexistent/graph.psc"], "Io"),
        (vec!["frobnicate"], "Usage"),
    ] {
        let o = psc(&args);
        assert!(!o.status.success());
        let line = stdout(&o);
        assert!(line.starts_with(&format!("ERR {code} ")), "{args:?}: {line}");
    }
}
