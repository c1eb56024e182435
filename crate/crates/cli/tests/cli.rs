use std::process::{Command, Output};

fn eisenzero(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eisenzero"))
        .args(args)
        .env_remove("EISENZERO_U_MAX")
        .env_remove("EISENZERO_TOL")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_einf_at_large_height_is_one() {
    let out = eisenzero(&["eval", "--series", "einf", "--z", "10i", "--k", "15"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["value"]["re"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(v["value"]["im"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(v["certified"], true);
}

#[test]
fn eval_expansions_agree() {
    let get = |exp: &str| {
        let v = json(&eisenzero(&[
            "eval",
            "--series",
            "e0",
            "--expansion",
            exp,
            "--z",
            "0.3+1.0i",
            "--k",
            "15",
        ]));
        (
            v["value"]["re"].as_f64().unwrap(),
            v["value"]["im"].as_f64().unwrap(),
        )
    };
    let (a, b) = (get("lattice"), get("fourier"));
    let scale = a.0.hypot(a.1);
    assert!((a.0 - b.0).hypot(a.1 - b.1) / scale < 1e-8);
}

#[test]
fn eval_csv_has_a_header_and_one_row() {
    let out = eisenzero(&[
        "eval", "--series", "ehalf", "--z", "0.5+0.8i", "--k", "101", "--csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("series,expansion,k,z_re,z_im,value_re,value_im"));
    assert!(lines[1].starts_with("ehalf,lattice,101,0.5,0.8,"));
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        &["zeros", "--k", "6"][..],
        &["eval", "--series", "e0", "--z", "-i", "--k", "15"],
        &["eval", "--series", "e0", "--z", "nonsense", "--k", "15"],
        &[
            "eval",
            "--series",
            "einf",
            "--expansion",
            "fourier",
            "--z",
            "i",
            "--k",
            "15",
        ],
        &["coeffs", "--k", "15", "--max-l", "0"],
    ] {
        let out = eisenzero(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn strict_rejects_uncertified_truncation() {
    let args = [
        "eval", "--series", "e0", "--z", "0.1+0.3i", "--k", "15", "--fixed", "--u-max", "3",
        "--v-max", "2",
    ];
    let loose = eisenzero(&args);
    assert_eq!(loose.status.code(), Some(0));
    assert_eq!(json(&loose)["certified"], false);
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(eisenzero(&strict).status.code(), Some(3));
}

#[test]
fn environment_sets_truncation() {
    let out = Command::new(env!("CARGO_BIN_EXE_eisenzero"))
        .args([
            "eval", "--series", "e0", "--z", "0.1+0.3i", "--k", "15", "--fixed", "--v-max", "2",
        ])
        .env("EISENZERO_U_MAX", "3")
        .output()
        .unwrap();
    assert_eq!(json(&out)["certified"], false);
}

#[test]
fn coefficients_are_positive_after_rotation() {
    let out = eisenzero(&["coeffs", "--k", "15", "--max-l", "6", "--direct", "1001"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert!(r["rotated"].as_f64().unwrap() > 0.0);
        assert!(r["direct_relative_difference"].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn zeros_writes_plot_data() {
    let dir = std::env::temp_dir().join(format!("eisenzero-plot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("plot.csv");
    let out = eisenzero(&["zeros", "--k", "15", "--plot-data", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("series,y,finf_x,finf_y,residual"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("e0_line,0.68747422"));
    assert!(rows[1].starts_with("ehalf_line,0.86307063"));
    let report = json(&out);
    assert_eq!(report["count_found"], 2);
    assert_eq!(report["valence_budget"], 3);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_passes_and_reports_checks() {
    let out = eisenzero(&["verify", "--k", "101,103", "--suite", "bounds", "--csv"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,k,name,measured,threshold,passed"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn output_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("eisenzero-out-{}.json", std::process::id()));
    let out = eisenzero(&[
        "coeffs",
        "--k",
        "21",
        "--max-l",
        "2",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    std::fs::remove_file(path).unwrap();
}
