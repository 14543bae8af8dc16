use std::io::Write;
use std::process::{Command, Output, Stdio};

fn fdarray(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fdarray"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn geometry_prints_layout_and_sketch() {
    let out = fdarray(
        &[
            "geometry",
            "--family",
            "partitioned",
            "--n",
            "3",
            "--delta1",
            "1",
        ],
        "",
    );
    let json = stdout(&out);
    assert!(json.contains("\"units\": \"half-wavelength\""));
    assert_eq!(stderr(&out).trim(), "RRR.TTT");

    let out = fdarray(
        &[
            "geometry", "--family", "nested", "--m1", "6", "--m2", "5", "--delta3", "3",
        ],
        "",
    );
    let json = stdout(&out);
    assert!(json.contains("\"label\": \"nested(m1=6, m2=5, delta3=3)\""));
}

#[test]
fn geometry_rejects_bad_flags() {
    let out = fdarray(
        &["geometry", "--family", "nested", "--m1", "6", "--m2", "5"],
        "",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--delta3"));

    let out = fdarray(
        &[
            "geometry",
            "--family",
            "interleaved",
            "--n",
            "4",
            "--delta2",
            "0",
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("delta2"));

    let out = fdarray(
        &[
            "geometry",
            "--family",
            "interleaved",
            "--n",
            "4",
            "--delta2",
            "1",
            "--m1",
            "2",
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--m1"));

    assert_eq!(
        fdarray(&["geometry", "--family", "ring"], "").status.code(),
        Some(2)
    );
}

#[test]
fn pipes_compose_from_geometry() {
    let layout = stdout(&fdarray(
        &[
            "geometry",
            "--family",
            "interleaved",
            "--n",
            "2",
            "--delta2",
            "1",
        ],
        "",
    ));
    let spectrum = stdout(&fdarray(&["svd"], &layout));
    let rows: Vec<f64> = spectrum
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((rows[0] - 1.72076).abs() < 1e-5);
    assert!((rows[1] - 0.38742).abs() < 1e-5);

    // svd of the SI matrix file gives the same bytes as svd of the layout
    for format in ["csv", "json"] {
        let matrix = stdout(&fdarray(&["si", "--format", format], &layout));
        assert_eq!(stdout(&fdarray(&["svd"], &matrix)), spectrum);
    }

    let pattern = stdout(&fdarray(
        &["beampattern", "--grid", "5", "--normalize"],
        &layout,
    ));
    assert_eq!(pattern.lines().count(), 6);
    assert!(pattern.starts_with("theta,B\n"));
    let tx = stdout(&fdarray(
        &[
            "beampattern",
            "--side",
            "tx",
            "--theta-s",
            "-0.3",
            "--grid",
            "9",
        ],
        &layout,
    ));
    assert_eq!(tx.lines().count(), 10);
}

#[test]
fn coarray_of_small_layout() {
    let out = fdarray(&["coarray"], r#"{"rx": [0, 1], "tx": [2, 3]}"#);
    assert_eq!(stdout(&out), "sum,multiplicity\n2,1\n3,2\n4,1\n");
    let out = fdarray(&["coarray"], r#"{"rx": [0, 0.5], "tx": [2]}"#);
    assert_eq!(stdout(&out), "sum,multiplicity\n2,1\n5/2,1\n");
}

#[test]
fn error_exit_codes() {
    let colocated = fdarray(&["si"], r#"{"rx": [0, 1], "tx": [1, 2]}"#);
    assert_eq!(colocated.status.code(), Some(3));
    assert_eq!(fdarray(&["si"], "not json").status.code(), Some(2));
    assert_eq!(fdarray(&["svd"], "1,NaN\n0,1\n").status.code(), Some(4));
    assert_eq!(
        fdarray(&["svd"], "[[[1, 0], [1e999, 0]]]").status.code(),
        Some(2)
    );
    assert_eq!(
        fdarray(&["si", "--rho", "0"], r#"{"rx": [0], "tx": [1]}"#)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fdarray(&["si", "-i", "/nonexistent/layout.json"], "")
            .status
            .code(),
        Some(1)
    );
    let flat = fdarray(&["beampattern", "--grid", "2"], r#"{"rx": [0], "tx": [1]}"#);
    assert_eq!(flat.status.code(), Some(2));
    assert!(stdout(&fdarray(&["--help"], "")).contains("Exit status"));
}

#[test]
fn sweep_flags_infeasible_rows_and_succeeds() {
    let args = [
        "sweep",
        "--family",
        "partitioned",
        "--rule",
        "constant",
        "--scale",
        "3",
        "--n-start",
        "4",
        "--n-end",
        "6",
        "--n-step",
        "2",
    ];
    let out = fdarray(&args, "");
    let csv = stdout(&out);
    assert!(csv.starts_with("N,L,family,spectral_norm,L_target,params,feasible\n"));
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",false")));
    assert!(stderr(&out).contains("feasible=false"));

    let sequential = stdout(&fdarray(&[&args[..], &["--sequential"]].concat(), ""));
    assert_eq!(sequential, csv);

    assert_eq!(
        fdarray(&["sweep", "--rule", "constant"], "").status.code(),
        Some(2)
    );
    assert_eq!(
        fdarray(&["sweep", "--n-step", "0"], "").status.code(),
        Some(2)
    );
    assert_eq!(
        fdarray(&["sweep", "--n-start", "9", "--n-end", "3"], "")
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fig2_writes_bundle_deterministically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        stdout(&fdarray(
            &["fig2", "--out-dir", dir.path().to_str().unwrap()],
            "",
        ));
    }
    for family in ["partitioned", "interleaved", "nested"] {
        for suffix in ["geometry.json", "beampattern.csv", "spectrum.csv"] {
            let name = format!("{family}_{suffix}");
            let x = std::fs::read(a.path().join(&name)).unwrap();
            assert_eq!(x, std::fs::read(b.path().join(&name)).unwrap(), "{name}");
        }
    }
    let spectrum = std::fs::read_to_string(a.path().join("nested_spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 12);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let out = fdarray(
        &[
            "geometry",
            "--family",
            "partitioned",
            "--n",
            "11",
            "--delta1",
            "0",
            "-o",
            path.to_str().unwrap(),
        ],
        "",
    );
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(
        text.contains("\"label\": \"partitioned(n=11, delta1=0)\""),
        "{text}"
    );
}
