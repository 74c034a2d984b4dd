//! End-to-end CLI checks: exit codes, file outputs, and byte-for-byte
//! determinism (including against committed golden files).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use zerrnet::samples;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_zerrnet")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

struct Fixtures {
    dir: tempfile::TempDir,
    butterfly: PathBuf,
    butterfly_code: PathBuf,
    pair: PathBuf,
    pair_bad_code: PathBuf,
}

fn fixtures() -> Fixtures {
    let dir = tempfile::tempdir().unwrap();
    let (bf, bf_code) = samples::butterfly_xor();
    let (cp, cp_code) = samples::colocated_pair(2);
    let cp_bad = samples::corrupt_decoder(&cp_code, "t", 3, 5);
    let butterfly = write(dir.path(), "butterfly.json", &bf.to_json());
    let butterfly_code = write(dir.path(), "butterfly_code.json", &bf_code.to_json());
    let pair = write(dir.path(), "pair.json", &cp.to_json());
    let pair_bad_code = write(dir.path(), "pair_bad.json", &cp_bad.to_json());
    Fixtures {
        dir,
        butterfly,
        butterfly_code,
        pair,
        pair_bad_code,
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let fx = fixtures();
    let out = run(&["validate", "--instance", s(&fx.butterfly)]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid"], serde_json::Value::Bool(true));

    // a two-cycle: exit 1 and the report names the cycle
    let cyclic = write(
        fx.dir.path(),
        "cyclic.json",
        r#"{"nodes":["a","b"],
            "edges":[{"id":"e1","tail":"a","head":"b","capacity":1},
                     {"id":"e2","tail":"b","head":"a","capacity":1}],
            "sources":[],"terminals":[],"requirement":[]}"#,
    );
    let out = run(&["validate", "--instance", s(&cyclic)]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let kinds: Vec<&str> = report["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["kind"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"cycle"));

    // truncated JSON: exit 2
    let broken = write(fx.dir.path(), "broken.json", "{\"nodes\": [\"a\",");
    let out = run(&["validate", "--instance", s(&broken)]);
    assert_eq!(out.status.code(), Some(2));

    // missing file: exit 2
    let out = run(&[
        "validate",
        "--instance",
        s(&fx.dir.path().join("nope.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_error_exact_and_sampled() {
    let fx = fixtures();
    let out = run(&[
        "eval-error",
        "--instance",
        s(&fx.pair),
        "--code",
        s(&fx.pair_bad_code),
        "--exact",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["epsilon"], serde_json::json!("3/16"));
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("epsilon=3/16"), "stderr: {summary}");

    let out = run(&[
        "eval-error",
        "--instance",
        s(&fx.pair),
        "--code",
        s(&fx.pair_bad_code),
        "--trials",
        "400",
        "--seed",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["trials"], serde_json::json!(400));
}

#[test]
fn transform_zero_error_is_deterministic() {
    let fx = fixtures();
    let mut outputs = Vec::new();
    for round in 0..2 {
        let code_out = fx.dir.path().join(format!("zec_{round}.json"));
        let report_out = fx.dir.path().join(format!("zec_report_{round}.json"));
        let out = run(&[
            "transform",
            "zero-error",
            "--instance",
            s(&fx.pair),
            "--code",
            s(&fx.pair_bad_code),
            "--deltaRn",
            "1",
            "--seed",
            "7",
            "--attempts",
            "100",
            "--out",
            s(&code_out),
            "--report",
            s(&report_out),
        ]);
        assert_eq!(out.status.code(), Some(0));
        outputs.push((
            std::fs::read(&code_out).unwrap(),
            std::fs::read(&report_out).unwrap(),
        ));
    }
    // same command + same seed twice: byte-identical output files
    assert_eq!(outputs[0].0, outputs[1].0);
    assert_eq!(outputs[0].1, outputs[1].1);
}

#[test]
fn transform_outputs_match_committed_goldens() {
    let fx = fixtures();
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let code_out = fx.dir.path().join("golden_code.json");
    let report_out = fx.dir.path().join("golden_report.json");
    let out = run(&[
        "transform",
        "zero-error",
        "--instance",
        s(&fx.pair),
        "--code",
        s(&fx.pair_bad_code),
        "--deltaRn",
        "1",
        "--seed",
        "7",
        "--attempts",
        "100",
        "--out",
        s(&code_out),
        "--report",
        s(&report_out),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let expect_code = std::fs::read(golden_dir.join("zero_error_code.json")).unwrap();
    let expect_report = std::fs::read(golden_dir.join("zero_error_report.json")).unwrap();
    assert_eq!(
        std::fs::read(&code_out).unwrap(),
        expect_code,
        "output code drifted from the golden file"
    );
    assert_eq!(
        std::fs::read(&report_out).unwrap(),
        expect_report,
        "transform report drifted from the golden file"
    );
}

#[test]
fn transform_zero_attempts_is_a_verified_negative() {
    let fx = fixtures();
    let out = run(&[
        "transform",
        "zero-error",
        "--instance",
        s(&fx.pair),
        "--code",
        s(&fx.pair_bad_code),
        "--deltaRn",
        "1",
        "--attempts",
        "0",
        "--out",
        s(&fx.dir.path().join("never.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["reason"], serde_json::json!("no-good-partition"));
}

#[test]
fn remove_edge_writes_instance_and_code() {
    let fx = fixtures();
    let code_out = fx.dir.path().join("cut_code.json");
    let inst_out = fx.dir.path().join("cut_inst.json");
    let out = run(&[
        "transform",
        "remove-edge",
        "--instance",
        s(&fx.butterfly),
        "--code",
        s(&fx.butterfly_code),
        "--edge",
        "u->v",
        "--out",
        s(&code_out),
        "--instance-out",
        s(&inst_out),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["epsilon_out"], serde_json::json!("1/2"));
    assert_eq!(report["bound_holds"], serde_json::json!(true));

    // the emitted instance lost exactly the bottleneck
    let inst =
        zerrnet::instance::NetworkInstance::from_json(&std::fs::read_to_string(&inst_out).unwrap())
            .unwrap();
    assert!(inst.edge_index("u->v").is_none());
    assert_eq!(inst.edges.len(), 6);

    // unknown edge: exit 2
    let out = run(&[
        "transform",
        "remove-edge",
        "--instance",
        s(&fx.butterfly),
        "--code",
        s(&fx.butterfly_code),
        "--edge",
        "nope",
        "--out",
        s(&code_out),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_completion_and_halt() {
    let fx = fixtures();
    let final_code = fx.dir.path().join("reduced.json");
    let out = run(&[
        "reduce",
        "--instance",
        s(&fx.butterfly),
        "--code",
        s(&fx.butterfly_code),
        "--deltaRn",
        "0",
        "--seed",
        "5",
        "--out",
        s(&final_code),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["outcome"]["status"], serde_json::json!("completed"));
    assert!(final_code.exists());

    let out = run(&[
        "reduce",
        "--instance",
        s(&fx.butterfly),
        "--code",
        s(&fx.butterfly_code),
        "--deltaRn",
        "0",
        "--seed",
        "5",
        "--strategy",
        "always-fail",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["outcome"]["status"], serde_json::json!("halted"));
    assert_eq!(report["outcome"]["step"], serde_json::json!("c"));
}

#[test]
fn build_and_binning_round_trip() {
    let fx = fixtures();
    let spec = write(
        fx.dir.path(),
        "icspec.json",
        r#"{"k":2,"side_edges":[[0,1],[1,0]],"requirement":[[1,0],[0,1]]}"#,
    );
    let ic_out = fx.dir.path().join("ic.json");
    let out = run(&[
        "build",
        "index-coding",
        "--spec",
        s(&spec),
        "--out",
        s(&ic_out),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["validate", "--instance", s(&ic_out)]);
    assert_eq!(out.status.code(), Some(0));

    // supernode build embeds the layout block
    let sn_out = fx.dir.path().join("sn.json");
    let out = run(&[
        "build",
        "supernode",
        "--instance",
        s(&fx.butterfly),
        "--rate",
        "1",
        "--delta",
        "1",
        "--out",
        s(&sn_out),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let inst =
        zerrnet::instance::NetworkInstance::from_json(&std::fs::read_to_string(&sn_out).unwrap())
            .unwrap();
    assert!(inst.supernode.is_some());

    // supernode transform straight from the built file
    let zec_out = fx.dir.path().join("sn_zec.json");
    let out = run(&[
        "transform",
        "supernode",
        "--instance",
        s(&sn_out),
        "--code",
        s(&fx.butterfly_code),
        "--deltaRn",
        "0",
        "--seed",
        "5",
        "--out",
        s(&zec_out),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    // failure table out of eval-error feeds binning search / estimate-good
    let table_out = fx.dir.path().join("table.json");
    let out = run(&[
        "eval-error",
        "--instance",
        s(&fx.pair),
        "--code",
        s(&fx.pair_bad_code),
        "--exact",
        "--table-out",
        s(&table_out),
        "--out",
        s(&fx.dir.path().join("report.json")),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let part_out = fx.dir.path().join("partition.json");
    let out = run(&[
        "binning",
        "search",
        "--failure-table",
        s(&table_out),
        "--deltaRn",
        "1",
        "--seed",
        "9",
        "--out",
        s(&part_out),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(part_out.exists());

    let out = run(&[
        "estimate-good",
        "--failure-table",
        s(&table_out),
        "--deltaRn",
        "1",
        "--trials",
        "200",
        "--seed",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["trials"], serde_json::json!(200));

    // an impossible search is a verified negative
    let all_fail = zerrnet::code::FailureTable::constant(1, 1, 1).unwrap();
    let dead = write(fx.dir.path(), "allfail.json", &all_fail.to_json());
    let out = run(&[
        "binning",
        "search",
        "--failure-table",
        s(&dead),
        "--deltaRn",
        "0",
        "--attempts",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_env_var_overrides_enumeration_limit() {
    let fx = fixtures();
    // the pair instance has 16 source tuples; a budget of 4 refuses
    let out = Command::new(bin())
        .args([
            "eval-error",
            "--instance",
            s(&fx.pair),
            "--code",
            s(&fx.pair_bad_code),
            "--exact",
        ])
        .env("ZERRNET_BUDGET", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("budget"), "stderr: {err}");
}

#[test]
fn extend_report_and_refusal() {
    let fx = fixtures();
    let (inst4, code4) = samples::single_edge_identity(4);
    let bad4 = samples::corrupt_decoder(&code4, "t", 1, 3); // eps = 1/16
    let inst_p = write(fx.dir.path(), "edge4.json", &inst4.to_json());
    let code_p = write(fx.dir.path(), "edge4_bad.json", &bad4.to_json());

    let out = run(&[
        "extend",
        "--instance",
        s(&inst_p),
        "--code",
        s(&code_p),
        "--rounds",
        "16",
        "--seed",
        "5",
        "--trials",
        "500",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["required_distance"], serde_json::json!(5));
    assert_eq!(
        doc["monte_carlo"]["protected_failures"],
        serde_json::json!(0)
    );

    // eps = 1/4 at 16 rounds: distance 17 cannot fit, exit 1
    let worse = samples::corrupt_decoder(&code4, "t", 4, 3);
    let worse_p = write(fx.dir.path(), "edge4_worse.json", &worse.to_json());
    let out = run(&[
        "extend",
        "--instance",
        s(&inst_p),
        "--code",
        s(&worse_p),
        "--rounds",
        "16",
        "--seed",
        "5",
        "--trials",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["refused"], serde_json::json!(true));
}
