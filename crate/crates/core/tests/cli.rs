//! The binary on the shipped fixtures: exit codes and report shape.

use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn freelin(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_freelin"))
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
        .args(args)
        .output()
        .unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["validate", "action_valid.json"], 0),
        (&["validate", "action_invalid.json"], 1),
        (&["linearize", "action_valid.json"], 0),
        (&["linearize", "action_invalid.json"], 1),
        (&["effective", "action_valid.json"], 0),
        (&["kstar2", "action_kstar.json"], 0),
        (&["posroot-linearize", "action_posroot.json"], 0),
        (&["--N", "2", "posroot-linearize", "action_posroot.json"], 0),
        (&["--invert", "4", "jacobian", "endo_square.json"], 1),
        (&["--invert", "8", "jacobian", "endo_tame.json"], 0),
        (&["jacobi-endo", "endo_tame.json"], 0),
        (&["--N", "2", "reduce", "endo_tame.json"], 0),
        (&["--N", "2", "al-check"], 0),
        (&["jvdk", "comm_plane.json"], 0),
        (&["lift2", "comm_plane.json"], 0),
        (&["rees", "ideal_principal.json"], 0),
        (&["rees-action", "rees_action.json"], 0),
        (&["cancel-pair", "cancel_pair.json"], 0),
        (&["cancel-pair", "cancel_pair_negative.json"], 1),
        (&["validate", "endo_square.json"], 3),
        (&["validate", "missing.json"], 3),
    ];
    for (args, code) in cases {
        let (got, report) = freelin(args);
        assert_eq!(got, *code, "{args:?}: {report}");
        assert_eq!(report["exit_code"], *code, "{args:?}");
    }
}

#[test]
fn report_shape() {
    let (_, r) = freelin(&["--seed", "7", "linearize", "action_valid.json"]);
    assert_eq!(r["status"], "verified");
    assert_eq!(r["output"]["status"], "Verified");
    assert_eq!(r["command"], "linearize");
    assert_eq!(r["config"]["seed"], 7);
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    assert!(r.get("timing_ms").is_none());
    let (_, timed) = freelin(&["--timing", "linearize", "action_valid.json"]);
    assert!(timed["timing_ms"].is_number());
}

#[test]
fn field_override_and_output_file() {
    let dir = std::env::temp_dir().join(format!("freelin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let path = out.to_str().unwrap();
    let (code, stdout) = freelin(&["--field", "Fp:5", "--output", path, "rees", "ideal_principal.json"]);
    assert_eq!((code, stdout), (0, Value::Null));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["config"]["field"], "Fp:5");
    std::fs::remove_dir_all(dir).unwrap();
}
