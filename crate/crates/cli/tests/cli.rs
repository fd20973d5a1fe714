use std::path::Path;
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn qoe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qoe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_ratings(path: &Path, rows: &[(String, String, String)]) {
    let mut text = String::from("subject_id,condition_id,rating\n");
    for (s, c, v) in rows {
        text.push_str(&format!("{s},{c},{v}\n"));
    }
    std::fs::write(path, text).unwrap();
}

fn rows(items: &[(&str, &str, f64)]) -> Vec<(String, String, String)> {
    items
        .iter()
        .map(|(s, c, v)| (s.to_string(), c.to_string(), v.to_string()))
        .collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Number after `"key":` in pretty JSON, first occurrence.
fn json_number(text: &str, key: &str) -> f64 {
    let needle = format!("\"{key}\": ");
    let start = text.find(&needle).unwrap_or_else(|| panic!("{key} missing in {text}")) + needle.len();
    let rest = &text[start..];
    let end = rest.find([',', '\n']).unwrap();
    rest[..end].parse().unwrap()
}

#[test]
fn constant_ratings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    write_ratings(&path, &rows(&[("s1", "c1", 3.0), ("s2", "c1", 3.0), ("s1", "c2", 4.0)]));
    let out = qoe(&["analyze", p(&path)]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"mos\": 3.0"));
    assert!(text.contains("\"sos\": 0.0"));
    // c2 has a single rating
    assert!(text.contains("\"sos\": null"));
    assert!(text.contains("sos undefined"));
}

#[test]
fn binary_study_fits_unit_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    write_ratings(
        &path,
        &rows(&[
            ("s1", "c1", 1.0),
            ("s2", "c1", 0.0),
            ("s3", "c1", 1.0),
            ("s1", "c2", 1.0),
            ("s2", "c2", 1.0),
            ("s3", "c2", 0.0),
            ("s4", "c2", 0.0),
        ]),
    );
    let out = qoe(&["analyze", p(&path), "--scale", "0:1:discrete"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(json_number(&text, "a"), 1.0);
    assert_eq!(json_number(&text, "acceptance"), 0.666667);
}

#[test]
fn hypothesis_data_recovers_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    // a share 0.3 of the subjects at the bounds, the rest at the mean
    let mut data = Vec::new();
    for (c, z) in [0.2, 0.4, 0.5, 0.6, 0.8].into_iter().enumerate() {
        for s in 0..100 {
            let x = if s < (30.0 * z) as usize {
                1.0
            } else if s < 30 {
                0.0
            } else {
                z
            };
            data.push((format!("s{s}"), format!("c{c}"), (1.0 + 4.0 * x).to_string()));
        }
    }
    write_ratings(&path, &data);
    let out = qoe(&["fit-sos", p(&path), "--scale", "1:5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((json_number(&stdout(&out), "a") - 0.3).abs() < 1e-9);
}

#[test]
fn single_table_row() {
    let out = qoe(&["emodel-table", "--mos", "3.1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "mos,r,pow_pct,gob_pct,tme_pct\n3.10000,60.00,17.425,50.000,6.681\n");
}

#[test]
fn mos_below_range_is_a_domain_error() {
    let out = qoe(&["emodel-table", "--mos", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain"));
}

#[test]
fn conflicting_and_unknown_flags_are_usage_errors() {
    assert_eq!(qoe(&["emodel-table", "--mos", "2", "--default-rows"]).status.code(), Some(2));
    assert_eq!(qoe(&["curve-data", "--bogus"]).status.code(), Some(2));
    assert_eq!(qoe(&["analyze"]).status.code(), Some(2));
}

#[test]
fn input_failures_exit_with_two_and_validation_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qoe(&["analyze", p(&dir.path().join("missing.csv"))]).status.code(), Some(2));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "subject_id,condition_id,rating\ns1,c1,4\ns2,c1,abc\n").unwrap();
    let out = qoe(&["analyze", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out_of_range = dir.path().join("range.csv");
    write_ratings(&out_of_range, &rows(&[("s1", "c1", 7.0), ("s2", "c1", 0.0)]));
    let out = qoe(&["analyze", p(&out_of_range)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 violation"));
}

#[test]
fn curve_reproduces_threshold_row() {
    let out = qoe(&["curve-data", "--mos-min", "1", "--mos-max", "4.5", "--steps", "351"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("3.100000,")).unwrap();
    let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
    assert!((cols[3] - 32.575).abs() < 5e-4);

    let series: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(series.len(), 351);
    assert!(series.windows(2).all(|w| w[1][1] >= w[0][1] && w[1][2] <= w[0][2]));
}

#[test]
fn transform_identity_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    let data: Vec<_> = (0..60)
        .map(|i| {
            let v: f64 = rng.gen_range(1.0..=5.0);
            (format!("s{}", i % 12), format!("c{}", i / 12), v.to_string())
        })
        .collect();
    let input = dir.path().join("in.csv");
    write_ratings(&input, &data);

    let same = dir.path().join("same.csv");
    let out = qoe(&["transform", p(&input), "--from", "1:5", "--to", "1:5", "--output", p(&same)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&same).unwrap(), std::fs::read_to_string(&input).unwrap());

    let wide = dir.path().join("wide.csv");
    let wide_meta = dir.path().join("wide.json");
    let back = dir.path().join("back.csv");
    assert!(qoe(&[
        "transform",
        p(&input),
        "--from",
        "1:5",
        "--to",
        "0:100",
        "--output",
        p(&wide),
        "--metadata-output",
        p(&wide_meta),
    ])
    .status
    .success());
    let out = qoe(&[
        "transform",
        p(&wide),
        "--metadata",
        p(&wide_meta),
        "--to",
        "1:5",
        "--output",
        p(&back),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parse = |path: &Path| -> Vec<f64> {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect()
    };
    for (a, b) in parse(&input).iter().zip(parse(&back)) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn transform_verify_reports_equal_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = StdRng::seed_from_u64(12);
    let data: Vec<_> = (0..80)
        .map(|i| {
            let v: f64 = rng.gen_range(0.0..=6.0);
            (format!("s{}", i % 16), format!("c{}", i / 16), v.to_string())
        })
        .collect();
    let input = dir.path().join("speech.csv");
    write_ratings(&input, &data);
    let out = qoe(&["transform", p(&input), "--from", "0:6", "--to", "1:5", "--verify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let log = String::from_utf8(out.stderr).unwrap();
    let value = |prefix: &str| -> f64 {
        let line = log.lines().find(|l| l.starts_with(prefix)).unwrap();
        line.rsplit(' ').next().unwrap().parse().unwrap()
    };
    assert!((value("a before:") - value("a after:")).abs() < 1e-9);
}

#[test]
fn analyze_csv_output_and_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    write_ratings(
        &path,
        &rows(&[("s1", "c1", 1.0), ("s2", "c1", 2.0), ("s3", "c1", 4.0), ("s4", "c1", 5.0)]),
    );
    let out = qoe(&[
        "analyze",
        p(&path),
        "--format",
        "csv",
        "--quantiles",
        "1/2,3/4",
        "--theta",
        "4",
        "--thresholds",
        "4,2,1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        stdout(&out),
        "condition,count,mos,sos,standard_error,q_1/2,q_3/4,acceptability_4,gob,pow,tme\n\
         c1,4,3,1.825742,0.912871,2,4,0.5,0.5,0.5,0.25\n"
    );
}
