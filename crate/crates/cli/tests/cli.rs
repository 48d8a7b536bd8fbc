use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use nnanim_cli::{main_with, EXIT_IO, EXIT_OK, EXIT_RENDER, EXIT_SYNTAX, EXIT_USAGE, EXIT_VALIDATION};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with(std::iter::once("nnanim").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn render(spec: &Path, out: &Path, extra: &[&str]) -> (i32, String, String) {
    let mut args = vec!["render", spec.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn svg_frames_at_low_quality() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("nested/out");
    let (code, stdout, stderr) = render(&fixture("ok.nn"), &out, &["--format", "svg", "--quality", "l"]);
    assert_eq!(code, EXIT_OK, "{stderr}");
    // 3 s of animation at 15 fps.
    let frames = read_dir_sorted(&out);
    assert_eq!(frames.len(), 45);
    assert_eq!(frames[0].0, "frame_000000.svg");
    assert_eq!(frames[44].0, "frame_000044.svg");
    assert!(String::from_utf8_lossy(&frames[0].1).contains("width=\"480\" height=\"270\""));
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.contains("frames=45") && stdout.contains("duration=3.000s"), "{stdout}");
    assert!(stderr.is_empty());
}

#[test]
fn exit_codes_for_each_failure_class() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();

    assert_eq!(run(&["render"]).0, EXIT_USAGE);
    assert_eq!(run(&["render", "a.nn", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(run(&["draw", "a.nn"]).0, EXIT_USAGE);

    let (code, _, err) = render(&fixture("syntax.nn"), out, &[]);
    assert_eq!(code, EXIT_SYNTAX);
    assert!(err.contains("2:20"), "{err}");

    let (code, _, err) = render(&fixture("ff_to_conv.nn"), out, &[]);
    assert_eq!(code, EXIT_VALIDATION);
    assert!(err.contains("layer 0 (FeedForward) cannot feed layer 1 (Convolutional2D)"), "{err}");

    let (code, _, err) = render(&fixture("missing_image.nn"), out, &[]);
    assert_eq!(code, EXIT_VALIDATION);
    assert!(err.contains("nowhere.pgm"), "{err}");

    assert_eq!(render(&fixture("does_not_exist.nn"), out, &[]).0, EXIT_IO);

    let (code, _, err) = render(&fixture("too_many_colors.nn"), out, &[]);
    assert_eq!(code, EXIT_RENDER, "{err}");
    assert!(err.contains("palette"), "{err}");

    let blocker = out.join("file");
    fs::write(&blocker, "x").unwrap();
    assert_eq!(render(&fixture("ok.nn"), &blocker.join("sub"), &["--quality", "l"]).0, EXIT_IO);

    let (code, _, err) = render(&fixture("ok.nn"), out, &["--fps", "0"]);
    assert_eq!(code, EXIT_VALIDATION, "{err}");
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, err) = run(&["render", "--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("--quality"));
    assert!(err.is_empty());
}

#[test]
fn seed_flag_matches_editing_the_spec() {
    let tmp = tempfile::tempdir().unwrap();
    let edited = tmp.path().join("edited.nn");
    let text = fs::read_to_string(fixture("ok.nn")).unwrap().replace("seed: 7", "seed: 991");
    fs::write(&edited, text).unwrap();

    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert_eq!(render(&fixture("ok.nn"), &a, &["--seed", "991", "--quality", "l"]).0, 0);
    assert_eq!(render(&edited, &b, &["--quality", "l"]).0, 0);
    assert_eq!(render(&fixture("ok.nn"), &c, &["--quality", "l"]).0, 0);
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&b));
    assert_ne!(read_dir_sorted(&a), read_dir_sorted(&c));
}

#[test]
fn rerun_into_same_directory_is_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join("frame_999999.svg"), "stale").unwrap();
    fs::write(out.join("keep.txt"), "mine").unwrap();
    let args = ["--quality", "l", "--format", "svg,gif", "--fps", "4"];
    assert_eq!(render(&fixture("ok.nn"), &out, &args).0, 0);
    let first = read_dir_sorted(&out);
    assert!(first.iter().all(|(n, _)| n != "frame_999999.svg"));
    assert!(first.iter().any(|(n, _)| n == "keep.txt"));
    assert!(first.iter().any(|(n, _)| n == "ok.gif"));
    assert_eq!(render(&fixture("ok.nn"), &out, &args).0, 0);
    assert_eq!(read_dir_sorted(&out), first);
}

#[test]
fn debug_dumps_are_json() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, stdout, _) = render(&fixture("ok.nn"), tmp.path(), &["--quality", "l", "--fps", "2", "--dump-debug"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 3);
    let scene: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("scene.json")).unwrap()).unwrap();
    let timeline: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("timeline.json")).unwrap()).unwrap();
    assert_eq!(scene["primitives"].as_array().unwrap().len(), 11 + 30);
    assert_eq!(timeline["duration_s"], 3.0);
    assert!(!timeline["tracks"].as_array().unwrap().is_empty());
}

#[test]
fn binary_respects_thread_variable() {
    let tmp = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_nnanim");
    let spec = fixture("ok.nn");
    let status = |threads: &str, dir: &str| {
        Command::new(bin)
            .args(["render", spec.to_str().unwrap(), "--quality", "l", "--fps", "3", "--out"])
            .arg(tmp.path().join(dir))
            .env("NNANIM_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = status("1", "one");
    assert!(one.status.success());
    let four = status("4", "four");
    assert!(four.status.success());
    assert_eq!(read_dir_sorted(&tmp.path().join("one")), read_dir_sorted(&tmp.path().join("four")));
    let bad = status("zero", "bad");
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("NNANIM_THREADS"));
}
