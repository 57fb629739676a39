use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SUBCOMMANDS: [&str; 7] = [
    "growth",
    "growth-restricted",
    "expectmin",
    "rmse-dist",
    "train",
    "predict",
    "cv",
];

fn nd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nd")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.txt"))
}

/// Set `UPDATE_GOLDEN=1` to rewrite the files after an intended change.
#[test]
fn help_text_matches_golden_files() {
    let mut pages = vec![("nd".to_string(), nd(&["--help"]))];
    for sub in SUBCOMMANDS {
        pages.push((sub.to_string(), nd(&[sub, "--help"])));
    }
    for (name, out) in pages {
        assert!(out.status.success());
        let text = stdout(&out);
        let path = golden(&name);
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            fs::write(&path, &text).unwrap();
        }
        assert_eq!(text, fs::read_to_string(&path).unwrap(), "help for {name} changed");
    }
}

#[test]
fn growth_commands() {
    assert_eq!(
        stdout(&nd(&["growth", "--strategy", "random", "--n", "12"])),
        "13749310575\n"
    );
    assert_eq!(
        stdout(&nd(&["growth", "--strategy", "balanced", "--n", "12"])),
        "3742200\n"
    );
    assert!(stdout(&nd(&["growth", "--strategy", "random-pair", "--n", "8"])).ends_with(" estimate\n"));
    let restricted = |removal: &str, method: &str| {
        stdout(&nd(&[
            "growth-restricted",
            "--strategy",
            "random",
            "--n",
            "5",
            "--lambda",
            "3",
            "--removal",
            removal,
            "--method",
            method,
        ]))
    };
    assert_eq!(restricted("isolate", "recurrence"), "25\n");
    assert_eq!(restricted("balanced", "enumerate"), "33\n");
}

#[test]
fn expectmin_command() {
    let out = stdout(&nd(&["expectmin", "--mu", "0", "--sigma", "1", "--lambda", "2"]));
    let v: f64 = out.trim().parse().unwrap();
    assert!((v + 0.5894).abs() < 1e-4);
    let one = stdout(&nd(&[
        "expectmin",
        "--mu",
        "-0.25",
        "--sigma",
        "3",
        "--lambda",
        "1",
        "--alpha",
        "0.5",
    ]));
    assert_eq!(one, "-0.25\n");
}

#[test]
fn exit_codes() {
    assert_eq!(nd(&["growth"]).status.code(), Some(2));
    assert_eq!(
        nd(&["expectmin", "--mu", "0", "--sigma", "-1", "--lambda", "2"])
            .status
            .code(),
        Some(2)
    );
    let unsupported = nd(&[
        "growth-restricted",
        "--strategy",
        "random-pair",
        "--n",
        "5",
        "--lambda",
        "3",
        "--removal",
        "isolate",
    ]);
    assert_eq!(unsupported.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a,class\n1,x\n2,x\n").unwrap();
    let out = dir.path().join("m.json");
    let code = nd(&[
        "train",
        "--data",
        bad.to_str().unwrap(),
        "--strategy",
        "random",
        "--lambda",
        "1",
        "--out",
        out.to_str().unwrap(),
    ])
    .status
    .code();
    assert_eq!(code, Some(3));
}

fn write_dataset(dir: &Path) -> PathBuf {
    let mut text = String::from("x0,x1,colour,class\n");
    for i in 0..120 {
        let c = i % 4;
        let x0 = c as f64 + ((i * 37) % 11) as f64 / 11.0;
        let x1 = (c as f64) * -0.5 + ((i * 17) % 7) as f64 / 7.0;
        let colour = ["red", "green", "?"][i % 3];
        text.push_str(&format!("{x0},{x1},{colour},k{c}\n"));
    }
    let path = dir.join("train.csv");
    fs::write(&path, text).unwrap();
    path
}

fn run_all(dir: &Path, data: &Path, threads: Option<&str>) -> Vec<Vec<u8>> {
    let file = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let data = data.to_str().unwrap();
    let with_threads = |args: Vec<String>| {
        let mut full: Vec<String> = threads
            .map(|t| vec!["--threads".to_string(), t.to_string()])
            .unwrap_or_default();
        full.extend(args);
        let refs: Vec<&str> = full.iter().map(String::as_str).collect();
        let out = nd(&refs);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    with_threads(s(&[
        "train",
        "--data",
        data,
        "--strategy",
        "random-pair",
        "--lambda",
        "3",
        "--ensemble",
        "bagging",
        "--size",
        "5",
        "--out",
        &file("model.json"),
    ]));
    with_threads(s(&[
        "predict",
        "--model",
        &file("model.json"),
        "--data",
        data,
        "--out",
        &file("pred.csv"),
    ]));
    with_threads(s(&[
        "cv",
        "--data",
        data,
        "--strategy",
        "balanced",
        "--lambda",
        "2",
        "--ensemble",
        "adaboost",
        "--size",
        "3",
        "--runs",
        "2",
        "--folds",
        "3",
        "--no-timing",
        "--out",
        &file("cv.csv"),
    ]));
    with_threads(s(&[
        "rmse-dist",
        "--data",
        data,
        "--trials",
        "6",
        "--lambda-max",
        "3",
        "--out",
        &file("dist.csv"),
    ]));
    ["model.json", "pred.csv", "cv.csv", "dist.csv"]
        .iter()
        .map(|f| fs::read(dir.join(f)).unwrap())
        .collect()
}

#[test]
fn outputs_are_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let one = run_all(dir.path(), &data, Some("1"));
    let four = run_all(dir.path(), &data, Some("4"));
    let default = run_all(dir.path(), &data, None);
    assert_eq!(one, four);
    assert_eq!(one, default);
}

#[test]
fn train_and_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    run_all(dir.path(), &data, None);
    let pred = fs::read_to_string(dir.path().join("pred.csv")).unwrap();
    let mut lines = pred.lines();
    assert_eq!(lines.next(), Some("instance,k0,k1,k2,k3,argmax"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 120);
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[0], i.to_string());
        let probs: Vec<f64> = cells[1..5].iter().map(|c| c.parse().unwrap()).collect();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(cells[5].starts_with('k'));
    }
    let model: String = fs::read_to_string(dir.path().join("model.json")).unwrap();
    assert!(model.contains("\"format_version\": 1"));
    assert!(model.contains("\"seed\": 42"));
    let cv = fs::read_to_string(dir.path().join("cv.csv")).unwrap();
    assert_eq!(cv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 6);
}

#[test]
fn unknown_model_version_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    run_all(dir.path(), &data, None);
    let path = dir.path().join("model.json");
    let text = fs::read_to_string(&path)
        .unwrap()
        .replacen("\"format_version\": 1", "\"format_version\": 999", 1);
    fs::write(&path, text).unwrap();
    let out = nd(&[
        "predict",
        "--model",
        path.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--out",
        dir.path().join("p.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("999"));
}
