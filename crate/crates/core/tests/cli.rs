use std::io::Write;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_likelic");

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("LIKELIC_BASE").output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn infer_prints_grade_and_chain() {
    let ctx = fixture("snowbird.ctx");
    let out = stdout(&run(&["infer", "--context", &ctx, "--from", "Snowbird", "--to", "death"]));
    assert_eq!(out, "3 (neutral)\nSnowbird -(5)-> skiing -(4)-> ski-accident -(3)-> death : 3\n");
}

#[test]
fn explain_and_allpairs() {
    let ctx = fixture("snowbird.ctx");
    let out = stdout(&run(&["explain", "--context", &ctx, "--from", "skiing", "--to", "death"]));
    assert_eq!(out.trim_end(), "skiing -(4)-> ski-accident -(3)-> death : 3");
    let out = stdout(&run(&["allpairs", "--context", &ctx, "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v.to_string().contains("Snowbird"));
}

#[test]
fn propagate_wavefront_json() {
    let ctx = fixture("snowbird.ctx");
    let out = stdout(&run(&[
        "propagate", "--context", &ctx, "--source", "Snowbird=4", "--mode", "wavefront", "--format", "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["values"]["accident"], 1);
    assert_eq!(v["values"]["death"], 3);
    assert_eq!(v["values"]["ski-accident"], 4);
}

#[test]
fn json_output_is_canonical_and_deterministic() {
    let ctx = fixture("snowbird.ctx");
    let args = ["propagate", "--context", &ctx, "--source", "Snowbird=4", "--format", "json"];
    let first = stdout(&run(&args));
    assert_eq!(first, stdout(&run(&args)));
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", first);
}

#[test]
fn scenario_comparison_rows() {
    let out = stdout(&run(&[
        "scenario",
        "--context",
        &fixture("mortality.ctx"),
        "--scenarios",
        &fixture("mortality.scn"),
        "--compare",
        "default,Reykjavik,Istanbul,trip",
        "--rows",
        "at home in bed,in war,by forces of nature",
    ]));
    assert!(out.contains("at home in bed: 4 1 1 0\n"), "{out}");
    assert!(out.contains("in war: 1 0 0 1\n"), "{out}");
    assert!(out.contains("by forces of nature: 1 4 1 2\n"), "{out}");
}

#[test]
fn scale_subcommand() {
    assert_eq!(stdout(&run(&["scale", "--prob", "0.5"])), "3 (neutral)\n");
    assert_eq!(stdout(&run(&["scale", "--capacity", "2"])).trim(), "79");
    assert_eq!(stdout(&run(&["scale", "--capacity", "3"])).trim(), "8");
    let out = stdout(&run(&["scale", "--boundaries", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let c1 = v["cuts"][1].as_f64().unwrap();
    assert!((c1 - 0.0014234).abs() < 1e-6);
}

#[test]
fn base_from_environment() {
    let with_env = Command::new(BIN)
        .args(["scale", "--boundaries", "--format", "json"])
        .env("LIKELIC_BASE", "1e-6")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&with_env)).unwrap();
    assert!((v["cuts"][1].as_f64().unwrap() - 0.0125074).abs() < 1e-6);
    // An explicit flag wins over the environment.
    let flagged = Command::new(BIN)
        .args(["scale", "--boundaries", "--format", "json", "--base", "1e-9"])
        .env("LIKELIC_BASE", "1e-6")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&flagged)).unwrap();
    assert!((v["cuts"][1].as_f64().unwrap() - 0.0014234).abs() < 1e-6);
}

#[test]
fn every_subcommand_has_help() {
    let cases: [(&str, &[&str]); 9] = [
        ("infer", &["--context", "--from", "--to", "--format"]),
        ("explain", &["--context", "--from", "--to"]),
        ("allpairs", &["--context", "--format"]),
        ("propagate", &["--context", "--source", "--mode", "--literal-max", "--format"]),
        ("scenario", &["--context", "--scenarios", "--compare", "--rows", "--mode"]),
        ("scale", &["--prob", "--boundaries", "--capacity", "--independent", "--base"]),
        ("learn", &["--context", "--script"]),
        ("export-dot", &["--context", "--valuation"]),
        ("demo-dice", &["--base"]),
    ];
    for (cmd, flags) in cases {
        let out = stdout(&run(&[cmd, "--help"]));
        for f in flags {
            assert!(out.contains(f), "{cmd} --help lacks {f}");
        }
    }
    assert!(stdout(&run(&["--help"])).contains("demo-dice"));
}

#[test]
fn exit_codes() {
    let ctx = fixture("snowbird.ctx");
    let unknown = run(&["infer", "--context", &ctx, "--from", "nowhere", "--to", "death"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("nowhere"));
    assert_eq!(run(&["infer", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["infer", "--context", "/no/such/file", "--from", "a", "--to", "b"]).status.code(), Some(2));
    let bad = run_stdin(&["allpairs", "--context", "-"], "edge a -> b : 9\n");
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 1"));
}

#[test]
fn context_from_stdin() {
    let out = run_stdin(
        &["infer", "--context", "-", "--from", "rain", "--to", "slip"],
        "edge rain -> wet : 5\nedge wet -> slip : 3\n",
    );
    assert!(stdout(&out).starts_with("3 (neutral)\n"));
}

#[test]
fn learn_runs_script() {
    let out = stdout(&run(&["learn", "--context", &fixture("footwear.ctx"), "--script", &fixture("boot.act")]));
    assert!(out.starts_with("# likelic context\n"));
    assert!(out.contains("edge foot -> shoe : 4\n"));
    assert!(out.contains("edge boot -> shoe : 5\n"));
    assert!(out.contains("0edge boot -> shoe\n"));
}

#[test]
fn export_dot_with_valuation() {
    let dir = std::env::temp_dir().join(format!("likelic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let val = dir.join("val.ctx");
    std::fs::write(&val, "fact death = 3\n").unwrap();
    let out = stdout(&run(&[
        "export-dot",
        "--context",
        &fixture("snowbird.ctx"),
        "--valuation",
        val.to_str().unwrap(),
    ]));
    std::fs::remove_dir_all(&dir).ok();
    assert!(out.starts_with("digraph {"));
    assert!(out.contains("\"death\" [label=\"death (3)\"];"), "{out}");
    assert!(out.contains("\"Snowbird\" -> \"skiing\" [label=\"5\"];"), "{out}");
}

#[test]
fn demo_dice() {
    let out = stdout(&run(&["demo-dice"]));
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().all(|l| l.contains("l=3 (neutral)")), "{out}");
}
