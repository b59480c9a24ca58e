use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pgs_core::scene::{ObjectInstance, PrimitiveShape, SceneModel, WorkspaceModel};
use serde_json::Value;

fn pgs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgs"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = pgs(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn one_box(dir: &Path) -> PathBuf {
    let scene = SceneModel {
        seed: 5,
        workspace: WorkspaceModel::default(),
        objects: vec![ObjectInstance::resting(
            1,
            PrimitiveShape::Box {
                w: 0.03,
                d: 0.07,
                h: 0.05,
            },
            0.0,
            0.05,
            0.4,
        )],
    };
    let path = dir.join("one.json");
    std::fs::write(&path, scene.to_json().unwrap()).unwrap();
    path
}

#[test]
fn synth_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--seed", "9", "--objects", "12", "--out", "a.json"]);
    ok(
        d,
        &[
            "--jobs",
            "3",
            "synth",
            "--seed",
            "9",
            "--objects",
            "12",
            "--out",
            "b.json",
        ],
    );
    ok(d, &["synth", "--seed", "10", "--objects", "12", "--out", "c.json"]);
    let a = std::fs::read(d.join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.json")).unwrap());
    assert_ne!(a, std::fs::read(d.join("c.json")).unwrap());
    let v = read_json(&d.join("a.json"));
    assert_eq!(v["format"], "pgs-scene");
    assert_eq!(v["scene"]["objects"].as_array().unwrap().len(), 12);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn zero_objects_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = pgs(dir.path(), &["synth", "--objects", "0", "--out", "z.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("z.json").exists());
    let out = pgs(
        dir.path(),
        &["--jobs", "0", "synth", "--objects", "3", "--out", "z.json"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn annotation_file_is_valid() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let scene = one_box(d);
    ok(
        d,
        &["annotate", "--scene", scene.to_str().unwrap(), "--out", "labels.json"],
    );
    let text = std::fs::read_to_string(d.join("labels.json")).unwrap();
    let file = pgs_core::annotation::AnnotationFile::from_json(&text).unwrap();
    file.validate().unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let grasps = v["grasps"].as_array().unwrap();
    let suctions = v["suctions"].as_array().unwrap();
    assert!(!grasps.is_empty() && !suctions.is_empty());
    for s in suctions {
        let score = s["score"].as_f64().unwrap();
        assert!(score > 0.0 && score <= 1.0);
    }
}

#[test]
fn simulating_one_reachable_box_clears_it() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let scene = one_box(d);
    let stdout = ok(
        d,
        &[
            "simulate",
            "--scene",
            scene.to_str().unwrap(),
            "--policy",
            "gs,pgs",
            "--out",
            "ep.json",
        ],
    );
    assert!(stdout.starts_with("policy,seed,attempts"));
    let v = read_json(&d.join("ep.json"));
    let episodes = v["episodes"].as_array().unwrap();
    assert_eq!(episodes.len(), 2);
    for e in episodes {
        assert_eq!(e["cr"].as_f64(), Some(1.0));
        assert_eq!(e["removed"].as_u64(), Some(1));
    }
}

#[test]
fn malformed_scene_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.json"), "{ \"format\": \"pgs-scene\", ").unwrap();
    for args in [
        vec!["annotate", "--scene", "bad.json", "--out", "out.json"],
        vec!["simulate", "--scene", "bad.json", "--out", "out.json"],
        vec!["segment", "--scene", "bad.json", "--out", "out"],
        vec!["plan-push", "--scene", "bad.json", "--object", "1", "--out", "out.json"],
    ] {
        let out = pgs(d, &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!d.join("out.json").exists() && !d.join("out.png").exists());
    }
}

#[test]
fn missing_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut v: Value =
        serde_json::from_str(&one_box(d).to_str().map(std::fs::read_to_string).unwrap().unwrap()).unwrap();
    v["scene"].as_object_mut().unwrap().remove("objects");
    std::fs::write(d.join("partial.json"), v.to_string()).unwrap();
    let out = pgs(d, &["annotate", "--scene", "partial.json", "--out", "out.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("objects"));
    assert!(!d.join("out.json").exists());
}

#[test]
fn losses_match_golden_values() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (fx, golden) = (fixture("loss_fixture.json"), fixture("loss_golden.json"));
    let out = pgs(
        d,
        &[
            "losses",
            "--fixture",
            fx.to_str().unwrap(),
            "--golden",
            golden.to_str().unwrap(),
            "--out",
            "l.json",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let got = &read_json(&d.join("l.json"))["losses"];
    let want = read_json(&golden);
    for key in ["prehensile", "foreground", "center_offset", "nonprehensile"] {
        assert!(
            (got[key].as_f64().unwrap() - want[key].as_f64().unwrap()).abs() <= 1e-9,
            "{key}"
        );
    }
    for branch in ["grasp", "suction"] {
        for key in ["regression", "focal", "score", "total"] {
            let (a, b) = (got[branch][key].as_f64().unwrap(), want[branch][key].as_f64().unwrap());
            assert!((a - b).abs() <= 1e-9, "{branch}.{key}");
        }
    }
}

#[test]
fn perturbed_golden_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut want = read_json(&fixture("loss_golden.json"));
    let f = want["foreground"].as_f64().unwrap();
    want["foreground"] = Value::from(f + 1e-8);
    std::fs::write(d.join("g.json"), want.to_string()).unwrap();
    let fx = fixture("loss_fixture.json");
    let out = pgs(
        d,
        &[
            "losses",
            "--fixture",
            fx.to_str().unwrap(),
            "--golden",
            "g.json",
            "--out",
            "l.json",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!d.join("l.json").exists());
}

#[test]
fn config_overrides_change_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("cfg.toml"), "[push]\ndistance = 0.08\n").unwrap();
    ok(d, &["synth", "--objects", "3", "--out", "a.json"]);
    ok(
        d,
        &["--config", "cfg.toml", "synth", "--objects", "3", "--out", "b.json"],
    );
    let (a, b) = (read_json(&d.join("a.json")), read_json(&d.join("b.json")));
    assert_ne!(a["config_hash"], b["config_hash"]);
    assert_eq!(a["scene"], b["scene"]);
    std::fs::write(d.join("typo.toml"), "[push]\ndistanse = 0.08\n").unwrap();
    let out = pgs(
        d,
        &["--config", "typo.toml", "synth", "--objects", "3", "--out", "c.json"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("push.distanse"));
}

#[test]
fn plan_push_reports_a_segment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let scene = SceneModel {
        seed: 0,
        workspace: WorkspaceModel::default(),
        objects: vec![ObjectInstance::resting(
            1,
            PrimitiveShape::Box {
                w: 0.04,
                d: 0.04,
                h: 0.05,
            },
            0.4,
            0.0,
            0.0,
        )],
    };
    std::fs::write(d.join("s.json"), scene.to_json().unwrap()).unwrap();
    let v: Value = serde_json::from_str(&ok(d, &["plan-push", "--scene", "s.json", "--object", "1"])).unwrap();
    assert_eq!(v["status"], "push");
    assert!((v["x"].as_f64().unwrap() - 0.44).abs() < 1e-9);
    assert_eq!(v["blocked"], false);
    let out = pgs(d, &["plan-push", "--scene", "s.json", "--object", "7"]);
    assert_eq!(out.status.code(), Some(2));
}
