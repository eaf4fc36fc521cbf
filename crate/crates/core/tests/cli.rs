mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use ssim_eghs::cli::{read_image, write_image, TRACE_HEADER};
use ssim_eghs::{Histogram, QuantizedImage};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ssim-eghs"))
}

fn write_input(dir: &Path, img: &QuantizedImage) -> std::path::PathBuf {
    let path = dir.join("in.pgm");
    write_image(img, &path).unwrap();
    path
}

#[test]
fn equalize_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), &common::gradient_texture(32, 32));
    let out = dir.path().join("out.pgm");
    let trace = dir.path().join("trace.csv");
    let status = bin()
        .args([
            "--input",
            input.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ])
        .args(["--equalize", "--iterations", "3", "--growth-threshold", "0"])
        .args(["--trace", trace.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );

    let result = read_image(&out).unwrap();
    assert_eq!(result.histogram(), Histogram::uniform(256, 1024).unwrap());

    let text = fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], TRACE_HEADER);
    assert_eq!(lines.len(), 4, "{text}");
    assert!(lines[3].ends_with(",iteration_limit"));
    assert!(lines[1].ends_with(','));
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 10);
    assert_eq!(fields[0], "1");
    // 17 significant digits in scientific notation
    let mantissa = fields[1].split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 17, "{}", fields[1]);
}

#[test]
fn zero_iterations_writes_header_only_trace() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), &common::gradient_texture(16, 16));
    let out = dir.path().join("out.pgm");
    let trace = dir.path().join("trace.csv");
    let status = bin()
        .args([
            "--input",
            input.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ])
        .args([
            "--equalize",
            "--iterations",
            "0",
            "--trace",
            trace.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(
        fs::read_to_string(&trace).unwrap(),
        format!("{TRACE_HEADER}\n")
    );
}

#[test]
fn target_from_histogram_file_and_reference_image() {
    let dir = tempfile::tempdir().unwrap();
    let img = common::gradient_texture(24, 24);
    let input = write_input(dir.path(), &img);

    let mut text = String::from("# two halves\n");
    for b in 0..256 {
        text.push_str(if b < 128 { "1\n" } else { "3\n" });
    }
    let hist = dir.path().join("h.txt");
    fs::write(&hist, text).unwrap();
    let out = dir.path().join("a.pgm");
    let status = bin()
        .args([
            "--input",
            input.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ])
        .args(["--target-hist", hist.to_str().unwrap(), "--iterations", "2"])
        .status()
        .unwrap();
    assert!(status.success());
    let got = read_image(&out).unwrap().histogram();
    assert_eq!(got.total(), 576);
    assert_eq!(got.counts()[0], 1);
    assert_eq!(got.counts()[200], 3);

    // A reference with a different pixel count.
    let reference = dir.path().join("ref.pgm");
    write_image(&common::gradient_texture(48, 40), &reference).unwrap();
    let out = dir.path().join("b.pgm");
    let status = bin()
        .args([
            "--input",
            input.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ])
        .args([
            "--target-image",
            reference.to_str().unwrap(),
            "--step",
            "newton",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let expected =
        ssim_eghs::rescale_histogram(&read_image(&reference).unwrap().histogram(), 576).unwrap();
    assert_eq!(read_image(&out).unwrap().histogram(), expected);
}

#[test]
fn exit_codes_distinguish_error_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), &common::gradient_texture(16, 16));
    let out = dir.path().join("out.pgm");
    let base = |cmd: &mut Command| {
        cmd.args([
            "--input",
            input.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ]);
    };

    let mut cmd = bin();
    base(&mut cmd);
    let code = cmd
        .args(["--equalize", "--step", "fixed"])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(2));

    let mut cmd = bin();
    base(&mut cmd);
    assert_eq!(cmd.status().unwrap().code(), Some(2), "missing target");

    let code = bin()
        .args([
            "--input",
            "/nonexistent/in.pgm",
            "--output",
            out.to_str().unwrap(),
            "--equalize",
        ])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(3));

    let bad = dir.path().join("ascii.pgm");
    fs::write(&bad, b"P2\n1 1\n255\n0\n").unwrap();
    let code = bin()
        .args([
            "--input",
            bad.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
            "--equalize",
        ])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(3));

    // Smaller than the 11x11 window.
    let small = dir.path().join("small.pgm");
    write_image(&common::gradient_texture(8, 8), &small).unwrap();
    let code = bin()
        .args([
            "--input",
            small.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
            "--equalize",
        ])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(4));
}
