use std::path::Path;
use std::process::{Command, Output};

fn regcor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regcor"))
        .args(args)
        .output()
        .expect("spawn regcor")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(root: &Path, extra: &[&str]) {
    let mut args = vec![
        "synth",
        p(root),
        "--width",
        "128",
        "--height",
        "64",
        "--radius",
        "8",
    ];
    args.extend_from_slice(extra);
    let out = regcor(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&regcor(&["--help"])), 0);
    assert_eq!(code(&regcor(&[])), 1);
    assert_eq!(code(&regcor(&["frobnicate"])), 1);
    assert_eq!(code(&regcor(&["evaluate", "x", "--tau", "abc"])), 1);
}

#[test]
fn invalid_config_values_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    synth(&dir.path().join("data"), &["--samples", "1"]);
    let data = dir.path().join("data");
    assert_eq!(code(&regcor(&["evaluate", p(&data), "--tau", "0"])), 1);
    assert_eq!(code(&regcor(&["evaluate", p(&data), "--tau", "1.5"])), 1);
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[masks]\nradius = 4\nbogus = 1\n").unwrap();
    assert_eq!(
        code(&regcor(&["evaluate", p(&data), "--config", p(&cfg)])),
        1
    );
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        code(&regcor(&["evaluate", p(&data), "--config", p(&missing)])),
        1
    );
    let tax = dir.path().join("tax.toml");
    std::fs::write(&tax, "critical_ids = [0]\naugmentable_ids = [0]\n").unwrap();
    assert_eq!(
        code(&regcor(&["evaluate", p(&data), "--taxonomy", p(&tax)])),
        1
    );
}

#[test]
fn evaluate_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let out = dir.path().join("out");
    synth(&data, &["--samples", "3"]);
    let run = regcor(&[
        "evaluate",
        p(&data),
        "--radius",
        "8",
        "--jobs",
        "2",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    for f in ["report.json", "report.csv", "table.txt"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert!(String::from_utf8_lossy(&run.stdout).contains("Pooled"));

    let again = dir.path().join("again");
    let rep = regcor(&["report", p(&out.join("report.csv")), "--out", p(&again)]);
    assert_eq!(code(&rep), 0);
    assert_eq!(
        std::fs::read_to_string(again.join("table.txt")).unwrap(),
        std::fs::read_to_string(out.join("table.txt")).unwrap()
    );
    assert!(again.join("aggregates.json").is_file());
}

#[test]
fn dataset_errors_exit_two_and_strict_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&regcor(&["evaluate", p(&dir.path().join("nope"))])), 2);
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(code(&regcor(&["evaluate", p(&empty)])), 2);
    assert_eq!(code(&regcor(&["masks", p(&dir.path().join("nope"))])), 2);

    let data = dir.path().join("data");
    synth(&data, &["--samples", "2"]);
    std::fs::remove_file(data.join("sample_0001").join("real.png")).unwrap();
    let out = dir.path().join("out");
    let lenient = regcor(&["evaluate", p(&data), "--radius", "8", "--out", p(&out)]);
    assert_eq!(code(&lenient), 0);
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("sample_0001"));
    let strict = regcor(&[
        "evaluate",
        p(&data),
        "--radius",
        "8",
        "--strict",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&strict), 3);
}

#[test]
fn single_sample_commands_write_images() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    synth(&data, &["--samples", "1"]);
    let sample = data.join("sample_0000");
    let out = dir.path().join("out");

    assert_eq!(
        code(&regcor(&[
            "masks",
            p(&sample),
            "--radius",
            "8",
            "--out",
            p(&out)
        ])),
        0
    );
    for f in [
        "critical.png",
        "buffer.png",
        "augmentation.png",
        "latent_critical.png",
        "latent_buffer.png",
        "latent_augmentation.png",
        "overlay.png",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }

    let run = regcor(&[
        "composite",
        p(&sample),
        "--radius",
        "8",
        "--panel",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&run), 0);
    // The synthetic candidate is the feathered composite at the same radius.
    assert_eq!(
        image::open(out.join("composite.png")).unwrap().to_rgb8(),
        image::open(sample.join("cand.png")).unwrap().to_rgb8()
    );
    let panel = image::open(out.join("panel.png")).unwrap();
    assert_eq!((panel.width(), panel.height()), (3 * 128 + 2 * 4, 64));

    for kind in ["overlay", "latent", "panel"] {
        let o = dir.path().join(kind);
        assert_eq!(
            code(&regcor(&[
                "preview",
                p(&sample),
                "--kind",
                kind,
                "--out",
                p(&o)
            ])),
            0
        );
        assert!(std::fs::read_dir(&o).unwrap().count() > 0, "{kind}");
    }
}

#[test]
fn flicker_over_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq");
    synth(&seq, &["--sequence", "4"]);
    let out = dir.path().join("out");
    let run = regcor(&["flicker", p(&seq), "--radius", "8", "--out", p(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(out.join("flicker.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "transition,buffer,critical,augmentation");
    assert_eq!(lines.len(), 4);
}

#[test]
fn sidecar_in_dataset_root_is_picked_up() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    synth(&data, &["--samples", "1"]);
    std::fs::write(
        data.join("perceptual.json"),
        r#"{"sample_0000/crit_real_vs_cand": 0.5, "sample_0000/crit_real_vs_aug": 0.75, "sample_0000/aug_aug_vs_cand": 0.125}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = regcor(&["evaluate", p(&data), "--radius", "8", "--out", p(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.ends_with(",0.5,0.75,0.125"), "{row}");
}
