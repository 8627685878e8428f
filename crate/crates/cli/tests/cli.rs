use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn est(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_est"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = est(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Synthesizes a corpus and returns (manifest, visual, audio).
fn synth(dir: &Path, per_class: usize, seed: u64) -> (PathBuf, PathBuf, PathBuf) {
    let out = dir.join("corpus");
    ok(&[
        "synth",
        "--seed",
        &seed.to_string(),
        "--clips-per-class",
        &per_class.to_string(),
        "--frames-max",
        "400",
        "--out-dir",
        s(&out),
    ]);
    (
        out.join("manifest.csv"),
        out.join("visual_states.csv"),
        out.join("audio_states.csv"),
    )
}

fn files_in(dir: &Path) -> Vec<String> {
    match fs::read_dir(dir) {
        Ok(entries) => {
            let mut names: Vec<String> = entries
                .map(|e| e.unwrap().file_name().into_string().unwrap())
                .collect();
            names.sort();
            names
        }
        Err(_) => Vec::new(),
    }
}

#[test]
fn extract_ten_clips() {
    let tmp = tempfile::tempdir().unwrap();
    let (m, v, a) = synth(tmp.path(), 5, 1);
    let out = tmp.path().join("ext");
    ok(&[
        "extract",
        "--manifest",
        s(&m),
        "--visual",
        s(&v),
        "--audio",
        s(&a),
        "--out-dir",
        s(&out),
    ]);
    let est = fs::read_to_string(out.join("est.csv")).unwrap();
    let lines: Vec<&str> = est.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines.iter().all(|l| l.split(',').count() == 50));
    assert!(lines[0].starts_with("clip_id,est_0,"));
    assert_eq!(
        files_in(&out),
        ["aggregate.csv", "est.csv", "provenance.json"]
    );

    // no audio: visual-only revision still yields a full block
    let out2 = tmp.path().join("ext2");
    ok(&[
        "extract",
        "--manifest",
        s(&m),
        "--visual",
        s(&v),
        "--out-dir",
        s(&out2),
    ]);
    assert_eq!(
        fs::read_to_string(out2.join("est.csv"))
            .unwrap()
            .lines()
            .count(),
        11
    );
}

#[test]
fn corrupt_input_exits_2_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (m, v, _) = synth(tmp.path(), 3, 2);
    let bad = tmp.path().join("bad_audio.csv");
    fs::write(
        &bad,
        "clip_id,segment_index,state\nsynth_0000,0,Sad\nsynth_0000,1,Contempt\n",
    )
    .unwrap();
    let out = tmp.path().join("ext");
    let r = est(&[
        "extract",
        "--manifest",
        s(&m),
        "--visual",
        s(&v),
        "--audio",
        s(&bad),
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("bad_audio.csv:3"), "{err}");
    assert!(files_in(&out).is_empty());

    let truncated = tmp.path().join("visual_short.csv");
    let text = fs::read_to_string(&v).unwrap();
    fs::write(&truncated, &text[..text.len() - 20]).unwrap();
    let r = est(&[
        "extract",
        "--manifest",
        s(&m),
        "--visual",
        s(&truncated),
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(files_in(&out).is_empty());
}

#[test]
fn evaluate_shape_determinism_and_provenance() {
    let tmp = tempfile::tempdir().unwrap();
    let (m, v, a) = synth(tmp.path(), 10, 3);
    let run = |name: &str| {
        let out = tmp.path().join(name);
        ok(&[
            "evaluate",
            "--manifest",
            s(&m),
            "--visual",
            s(&v),
            "--audio",
            s(&a),
            "--blocks",
            "est",
            "--folds",
            "10",
            "--trials",
            "1",
            "--seed",
            "5",
            "--out-dir",
            s(&out),
        ]);
        out
    };
    let first = run("eval1");
    let folds = fs::read_to_string(first.join("folds.csv")).unwrap();
    assert_eq!(folds.lines().count(), 1 + 5 * 10);
    let summary = fs::read_to_string(first.join("summary.txt")).unwrap();
    for name in [
        "L-SVM",
        "DT",
        "RF",
        "kNN",
        "LR",
        "ROC-AUC (best)",
        "accuracy (top-10 mean)",
    ] {
        assert!(summary.contains(name), "{summary}");
    }

    let second = run("eval2");
    for f in [
        "report.json",
        "folds.csv",
        "confusion.csv",
        "summary.txt",
        "provenance.json",
    ] {
        assert_eq!(
            fs::read(first.join(f)).unwrap(),
            fs::read(second.join(f)).unwrap(),
            "{f}"
        );
    }

    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(first.join("report.json")).unwrap()).unwrap();
    let provenance: serde_json::Value =
        serde_json::from_slice(&fs::read(first.join("provenance.json")).unwrap()).unwrap();
    assert_eq!(report["config_hash"], provenance["config_hash"]);
    assert_eq!(report["config"]["command"]["evaluate"]["seed"], 5);
    assert!(summary.contains(provenance["config_hash"].as_str().unwrap()));
    for f in ["report.json", "folds.csv", "confusion.csv", "summary.txt"] {
        assert!(
            provenance["files"][f].is_string(),
            "{f} missing from provenance"
        );
    }
}

fn write_block(path: &Path, name: &str, dim: usize, clips: &[String], salt: usize) {
    let mut text = String::from("clip_id");
    for j in 0..dim {
        text.push_str(&format!(",{name}_{j}"));
    }
    text.push('\n');
    for (i, c) in clips.iter().enumerate() {
        text.push_str(c);
        for j in 0..dim {
            let v = ((i * 7919 + j * 104_729 + salt) % 1009) as f64 / 1009.0;
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

#[test]
fn selection_of_450_from_4503() {
    let tmp = tempfile::tempdir().unwrap();
    let clips: Vec<String> = (0..30).map(|i| format!("c{i:02}")).collect();
    let mut manifest = String::from("clip_id,label,identity,source_video,n_frames\n");
    for (i, c) in clips.iter().enumerate() {
        let label = if i % 2 == 0 { "deceptive" } else { "truthful" };
        manifest.push_str(&format!("{c},{label},p{},{c}.mp4,10\n", i % 6));
    }
    let m = tmp.path().join("manifest.csv");
    fs::write(&m, manifest).unwrap();
    let mut aux = Vec::new();
    for (k, (name, dim)) in [("est", 49), ("me", 88), ("is13", 4366)].iter().enumerate() {
        let p = tmp.path().join(format!("{name}.csv"));
        write_block(&p, name, *dim, &clips, k);
        aux.push(format!("{name}={}", s(&p)));
    }
    let out = tmp.path().join("sel");
    ok(&[
        "select",
        "--manifest",
        s(&m),
        "--aux",
        &aux[0],
        "--aux",
        &aux[1],
        "--aux",
        &aux[2],
        "--blocks",
        "est,me,is13",
        "--select-ratio",
        "0.1",
        "--out-dir",
        s(&out),
    ]);
    let sel: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("selection.json")).unwrap()).unwrap();
    assert_eq!(sel["dimension"], 4503);
    assert_eq!(sel["k"], 450);
    let per_block: u64 = sel["per_block"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_u64().unwrap())
        .sum();
    assert_eq!(per_block, 450);
    let selected = fs::read_to_string(out.join("selected.csv")).unwrap();
    assert_eq!(selected.lines().next().unwrap().split(',').count(), 2 + 450);
}

#[test]
fn evaluation_failure_exits_3_naming_classifier_and_fold() {
    let tmp = tempfile::tempdir().unwrap();
    // a single class: the correlation filter has nothing to rank against
    let fused = tmp.path().join("fused.csv");
    let mut text = String::from("clip_id,label,f_0,f_1\n");
    for i in 0..12 {
        text.push_str(&format!("c{i:02},0,{},{}\n", i, i % 3));
    }
    fs::write(&fused, text).unwrap();
    let out = tmp.path().join("eval");
    let r = est(&[
        "evaluate",
        "--fused",
        s(&fused),
        "--folds",
        "3",
        "--trials",
        "2",
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(3));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("linear_svm") && err.contains("fold"), "{err}");
    assert!(files_in(&out).is_empty());
}

#[test]
fn fuse_then_evaluate_from_fused_file() {
    let tmp = tempfile::tempdir().unwrap();
    let (m, v, a) = synth(tmp.path(), 8, 4);
    let ext = tmp.path().join("ext");
    ok(&[
        "extract",
        "--manifest",
        s(&m),
        "--visual",
        s(&v),
        "--audio",
        s(&a),
        "--out-dir",
        s(&ext),
    ]);
    let est_aux = format!("est={}", s(&ext.join("est.csv")));
    let fused_dir = tmp.path().join("fused");
    ok(&[
        "fuse",
        "--manifest",
        s(&m),
        "--aux",
        &est_aux,
        "--blocks",
        "est",
        "--out-dir",
        s(&fused_dir),
    ]);
    let fused = fused_dir.join("fused.csv");
    assert_eq!(fs::read_to_string(&fused).unwrap().lines().count(), 17);
    let out = tmp.path().join("eval");
    ok(&[
        "evaluate",
        "--fused",
        s(&fused),
        "--folds",
        "4",
        "--trials",
        "3",
        "--classifiers",
        "LR,kNN",
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(
        fs::read_to_string(out.join("folds.csv"))
            .unwrap()
            .lines()
            .count(),
        1 + 2 * 3 * 4
    );

    // identities live in the manifest, so grouping needs the block route
    let grouped = tmp.path().join("grouped");
    ok(&[
        "evaluate",
        "--manifest",
        s(&m),
        "--aux",
        &est_aux,
        "--folds",
        "4",
        "--trials",
        "2",
        "--classifiers",
        "DT",
        "--identity-grouped",
        "--out-dir",
        s(&grouped),
    ]);
    let r = est(&[
        "evaluate",
        "--fused",
        s(&fused),
        "--folds",
        "4",
        "--trials",
        "1",
        "--identity-grouped",
        "--out-dir",
        s(&grouped),
    ]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(est(&["evaluate", "--out-dir", "x"]).status.code(), Some(2));
    assert_eq!(
        est(&[
            "evaluate",
            "--fused",
            "f.csv",
            "--classifiers",
            "perceptron",
            "--out-dir",
            "x"
        ])
        .status
        .code(),
        Some(2)
    );
    let tmp = tempfile::tempdir().unwrap();
    let r = est(&["synth", "--separation", "1.5", "--out-dir", s(tmp.path())]);
    assert_eq!(r.status.code(), Some(2));
    assert!(files_in(tmp.path()).is_empty());
}
