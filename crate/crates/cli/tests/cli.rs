use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn tubalkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubalkit"))
        .args(args)
        .output()
        .expect("run tubalkit")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn metrics(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("metrics.json")).unwrap()).unwrap()
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn synth_reference_run() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    let r = tubalkit(&[
        "synth",
        "--n",
        "20",
        "--rank",
        "2",
        "--sr",
        "0.8",
        "--reg",
        "how",
        "--seed",
        "7",
        "--out",
        s(&out),
    ]);
    assert_exit(&r, 0);
    for f in ["metrics.json", "trace.csv", "estimate.t3r"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let m = metrics(&out);
    assert!(m["rre"].as_f64().unwrap() <= 1e-4);
    assert!(m["psnr"].is_null() && m["ssim"].is_null());
    assert_eq!(m["stop_reason"], "Converged");

    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.starts_with("iter,rho,rre,chg_m,chg_e,chg_x,p_norm\n"));
    let est = tubalkit::format::decode(&fs::read(out.join("estimate.t3r")).unwrap()).unwrap();
    assert_eq!(est.dims(), (20, 20, 20));
}

#[test]
fn missing_rank_is_a_config_error_without_files() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    let r = tubalkit(&["synth", "--n", "20", "--sr", "0.8", "--out", s(&out)]);
    assert_exit(&r, 2);
    assert!(!out.exists());
}

#[test]
fn invalid_values_are_config_errors() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    for args in [
        vec!["synth", "--rank", "30"],
        vec!["synth", "--rank", "2", "--sr", "1.5"],
        vec!["synth", "--rank", "2", "--reg", "how", "--sigma-ratio", "2"],
        vec!["synth", "--rank", "2", "--reg", "soft", "--p", "0.5"],
        vec!["synth", "--rank", "2", "--mu", "1.0"],
        vec!["phase", "--specs", "soft,bogus"],
        vec!["curves", "--x-min", "3", "--x-max", "1"],
    ] {
        let mut a = args.clone();
        a.extend(["--out", s(&out)]);
        assert_exit(&tubalkit(&a), 2);
        assert!(!out.exists(), "{args:?}");
    }
}

#[test]
fn hop_with_unit_exponent_matches_soft() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("hop"), tmp.path().join("soft"));
    let common = ["synth", "--n", "12", "--rank", "2", "--sr", "0.7", "--seed", "3"];
    let mut hop = common.to_vec();
    hop.extend(["--reg", "hop", "--p", "1.0", "--out", s(&a)]);
    let mut soft = common.to_vec();
    soft.extend(["--reg", "soft", "--out", s(&b)]);
    assert_exit(&tubalkit(&hop), 0);
    assert_exit(&tubalkit(&soft), 0);
    let (ma, mb) = (metrics(&a), metrics(&b));
    for k in ["rre", "rmse"] {
        assert!(
            (ma[k].as_f64().unwrap() - mb[k].as_f64().unwrap()).abs() <= 1e-10,
            "{k}"
        );
    }
}

#[test]
fn phase_grid_rows_labels_and_determinism() {
    let tmp = TempDir::new().unwrap();
    let run = |dir: &Path| {
        let r = tubalkit(&[
            "phase",
            "--n",
            "8",
            "--ranks",
            "1,2",
            "--srs",
            "0.5,0.9",
            "--trials",
            "2",
            "--specs",
            "soft,how",
            "--seed",
            "5",
            "--out",
            s(dir),
        ]);
        assert_exit(&r, 0);
        fs::read(dir.join("phase.csv")).unwrap()
    };
    let a = run(&tmp.path().join("a"));
    let b = run(&tmp.path().join("b"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,sr,spec,trial,rre,success,iters,seconds");
    assert_eq!(lines.len() - 1, 2 * 2 * 2 * 2);
    assert!(lines.iter().any(|l| l.contains(",soft,")) && lines.iter().any(|l| l.contains(",how,")));
}

#[test]
fn curves_defaults() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("c");
    assert_exit(&tubalkit(&["curves", "--out", s(&out)]), 0);
    let text = fs::read_to_string(out.join("curves.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,soft,hard,hop_p,how,hoc");
    let mut n = 0;
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
        assert_eq!(v.len(), 6);
        assert_eq!(
            v[1],
            (v[0].abs() - 1.0).max(0.0).copysign(v[0]) * f64::from(u8::from(v[0] != 0.0))
        );
        n += 1;
    }
    assert_eq!(n, 1001);
}

#[test]
fn inpaint_full_sampling_reproduces_input() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("full");
    let input = data("camera48.png");
    assert_exit(
        &tubalkit(&[
            "inpaint",
            "--input",
            s(&input),
            "--sr",
            "1",
            "--reg",
            "soft",
            "--out",
            s(&out),
        ]),
        0,
    );
    let a = image::open(&input).unwrap().to_luma8();
    let b = image::open(out.join("completed.png")).unwrap();
    assert!(matches!(b, image::DynamicImage::ImageLuma8(_)));
    let b = b.to_luma8();
    assert_eq!(a.dimensions(), b.dimensions());
    assert!(a.pixels().zip(b.pixels()).all(|(p, q)| p[0].abs_diff(q[0]) <= 1));
}

#[test]
fn inpaint_rgb_random_mask() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("rgb");
    let r = tubalkit(&[
        "inpaint",
        "--input",
        s(&data("astronaut64.png")),
        "--sr",
        "0.5",
        "--seed",
        "2",
        "--out",
        s(&out),
    ]);
    assert_exit(&r, 0);
    let img = image::open(out.join("completed.png")).unwrap();
    assert!(matches!(img, image::DynamicImage::ImageRgb8(_)));
    assert_eq!((img.width(), img.height()), (64, 64));
    assert!(matches!(
        image::open(out.join("mask.png")).unwrap(),
        image::DynamicImage::ImageRgb8(_)
    ));
    let m = metrics(&out);
    for k in ["rre", "psnr", "ssim", "rmse", "runtime_seconds"] {
        assert!(m[k].is_f64(), "{k}");
    }
    assert!(m["psnr"].as_f64().unwrap() > 15.0);
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.lines().count() > 2);
}

#[test]
fn inpaint_stripes_emit_mask_image() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("stripes");
    let r = tubalkit(&[
        "inpaint",
        "--input",
        s(&data("camera48.png")),
        "--stripe-width",
        "2",
        "--stripe-period",
        "8",
        "--out",
        s(&out),
    ]);
    assert_exit(&r, 0);
    let mask = image::open(out.join("mask.png")).unwrap().to_luma8();
    for x in 0..48 {
        let want = if x % 8 < 2 { 0 } else { 255 };
        assert_eq!(mask.get_pixel(x, 10)[0], want, "column {x}");
    }
}

#[test]
fn inpaint_with_mask_file_and_original() {
    let tmp = TempDir::new().unwrap();
    let orig = image::open(data("camera48.png")).unwrap().to_luma8();
    let mask = image::GrayImage::from_fn(48, 48, |x, y| {
        image::Luma([if (x * 7 + y * 3) % 5 == 0 { 0 } else { 255 }])
    });
    let damaged = image::GrayImage::from_fn(48, 48, |x, y| {
        if mask.get_pixel(x, y)[0] == 0 {
            image::Luma([0])
        } else {
            *orig.get_pixel(x, y)
        }
    });
    let (mp, dp) = (tmp.path().join("mask.png"), tmp.path().join("damaged.png"));
    mask.save(&mp).unwrap();
    damaged.save(&dp).unwrap();

    let out = tmp.path().join("a");
    assert_exit(
        &tubalkit(&["inpaint", "--input", s(&dp), "--mask", s(&mp), "--out", s(&out)]),
        0,
    );
    assert!(metrics(&out)["psnr"].is_null());

    let out = tmp.path().join("b");
    let r = tubalkit(&[
        "inpaint",
        "--input",
        s(&dp),
        "--mask",
        s(&mp),
        "--original",
        s(&data("camera48.png")),
        "--out",
        s(&out),
    ]);
    assert_exit(&r, 0);
    assert!(metrics(&out)["psnr"].as_f64().unwrap() > 20.0);

    let out = tmp.path().join("c");
    let r = tubalkit(&[
        "inpaint",
        "--input",
        s(&dp),
        "--mask",
        s(&mp),
        "--original",
        s(&data("astronaut64.png")),
        "--out",
        s(&out),
    ]);
    assert_exit(&r, 2);
    assert!(!out.exists());
}

#[test]
fn inpaint_frame_directory() {
    let tmp = TempDir::new().unwrap();
    let frames = tmp.path().join("frames");
    fs::create_dir(&frames).unwrap();
    let base = image::open(data("camera48.png")).unwrap().to_luma8();
    for k in 0..4u32 {
        let f = image::GrayImage::from_fn(32, 24, |x, y| *base.get_pixel(x + 2 * k, y + k));
        f.save(frames.join(format!("frame{}.png", k + 8))).unwrap();
    }
    let out = tmp.path().join("out");
    assert_exit(
        &tubalkit(&["inpaint", "--input", s(&frames), "--sr", "0.6", "--out", s(&out)]),
        0,
    );
    // numeric order: frame8 .. frame11
    for k in 8..12 {
        let c = image::open(out.join("completed").join(format!("frame{k}.png"))).unwrap();
        assert_eq!((c.width(), c.height()), (32, 24));
        assert!(out.join("mask").join(format!("frame{k}.png")).is_file());
    }
    assert!(metrics(&out)["psnr"].is_f64());
}

#[test]
fn unreadable_image_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let bogus = tmp.path().join("bogus.png");
    fs::write(&bogus, b"not a png").unwrap();
    let out = tmp.path().join("out");
    assert_exit(
        &tubalkit(&["inpaint", "--input", s(&bogus), "--sr", "0.5", "--out", s(&out)]),
        2,
    );
    assert!(!out.exists());

    let rgba = tmp.path().join("rgba.png");
    image::RgbaImage::new(4, 4).save(&rgba).unwrap();
    assert_exit(
        &tubalkit(&["inpaint", "--input", s(&rgba), "--sr", "0.5", "--out", s(&out)]),
        2,
    );
    assert!(!out.exists());
}

#[test]
fn failed_commit_leaves_no_new_artifacts() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    // A directory squatting on an artifact name makes the final rename fail.
    fs::create_dir_all(out.join("trace.csv")).unwrap();
    let r = tubalkit(&["synth", "--n", "6", "--rank", "1", "--out", s(&out)]);
    assert_exit(&r, 1);
    let left: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(left, vec![std::ffi::OsString::from("trace.csv")]);
}

#[test]
fn help_exits_zero() {
    assert_exit(&tubalkit(&["--help"]), 0);
    assert_exit(&tubalkit(&["inpaint", "--help"]), 0);
}
