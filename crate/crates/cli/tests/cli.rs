mod support;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ers_core::PixelImage;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ers(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ers"))
        .args(args)
        .output()
        .expect("run ers")
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fill_corpus(dir: &Path, count: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let img = if i % 2 == 0 {
            support::pictogram(&mut rng)
        } else {
            support::photo_proxy(&mut rng, 96, 64)
        };
        support::save_png(&img, &dir.join(format!("img{i:03}.png")));
    }
}

#[test]
fn score_prints_the_white_image_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("white.png");
    support::save_png(&PixelImage::filled(200, 120, [255; 3]), &path);
    let out = ers(&["score", arg(&path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((record["ers"].as_f64().unwrap() - 0.697253).abs() < 1e-6);
    assert_eq!(record["raw"]["stroke_rel"], serde_json::Value::Null);
    assert_eq!(record["fingerprint"].as_str().unwrap().len(), 16);

    let csv = ers(&["score", "--csv", arg(&path)]);
    assert!(csv.status.success());
    let text = stdout(&csv);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains("0.697252654"));
}

#[test]
fn missing_image_is_a_data_error() {
    let out = ers(&["score", "/definitely/not/here.png"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/definitely/not/here.png"));
}

#[test]
fn undecodable_image_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.png");
    fs::write(&path, b"garbage").unwrap();
    assert_eq!(ers(&["score", arg(&path)]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(ers(&[]).status.code(), Some(1));
    assert_eq!(ers(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ers(&["batch", "somewhere"]).status.code(), Some(1));
    assert_eq!(ers(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"scoring": {"weights": {"palette": 0.5}}}"#).unwrap();
    let img = dir.path().join("x.png");
    support::save_png(&PixelImage::filled(8, 8, [0; 3]), &img);
    let out = ers(&["score", arg(&img), "--config", arg(&config)]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let out = ers(&["batch", arg(dir.path()), "--out", arg(&dir.path().join("r.txt"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_changes_the_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("x.png");
    support::save_png(&PixelImage::filled(8, 8, [0; 3]), &img);
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"analysis": {"trim_fraction": 0.1}}"#).unwrap();
    let base: serde_json::Value = serde_json::from_str(&stdout(&ers(&["score", arg(&img)]))).unwrap();
    let tuned: serde_json::Value =
        serde_json::from_str(&stdout(&ers(&["score", arg(&img), "--config", arg(&config)]))).unwrap();
    assert_ne!(base["fingerprint"], tuned["fingerprint"]);
}

#[test]
fn batch_on_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = ers(&["batch", arg(dir.path()), "--out", arg(&dir.path().join("r.csv"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn batch_output_does_not_depend_on_jobs() {
    let corpus = tempfile::tempdir().unwrap();
    fill_corpus(corpus.path(), 10, 1);
    let out = tempfile::tempdir().unwrap();
    for ext in ["csv", "jsonl"] {
        let mut files = Vec::new();
        for jobs in ["1", "4"] {
            let path = out.path().join(format!("r{jobs}.{ext}"));
            let run = ers(&["batch", arg(corpus.path()), "--out", arg(&path), "--jobs", jobs]);
            assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
            assert!(stdout(&run).contains("records: 10"));
            files.push(fs::read(&path).unwrap());
        }
        assert_eq!(files[0], files[1]);
    }
}

#[test]
fn batch_skips_broken_files() {
    let corpus = tempfile::tempdir().unwrap();
    fill_corpus(corpus.path(), 3, 2);
    fs::write(corpus.path().join("zz_broken.png"), b"nope").unwrap();
    let records = corpus.path().join("out.jsonl");
    let run = ers(&["batch", arg(corpus.path()), "--out", arg(&records)]);
    assert!(run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("zz_broken.png"));
    assert_eq!(fs::read_to_string(&records).unwrap().lines().count(), 3);
}

#[test]
fn compare_with_itself_gives_identical_series() {
    let corpus = tempfile::tempdir().unwrap();
    fill_corpus(corpus.path(), 6, 3);
    let out = tempfile::tempdir().unwrap();
    let prefix = out.path().join("report");
    let run = ers(&[
        "compare",
        arg(corpus.path()),
        arg(corpus.path()),
        "--out-prefix",
        arg(&prefix),
        "--bins",
        "20",
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout(&run).contains("(A)"));

    let mut names: Vec<String> = fs::read_dir(out.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let expected = [
        "report.svg",
        "report_ers.csv",
        "report_s_centering.csv",
        "report_s_contrast.csv",
        "report_s_edges.csv",
        "report_s_palette.csv",
        "report_s_saliency.csv",
        "report_s_stroke.csv",
    ];
    assert_eq!(names, expected);
    for name in &expected[1..] {
        let text = fs::read_to_string(out.path().join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("bin_lo,bin_hi,pct_A,pct_B"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 20);
        let mut total = 0.0;
        for row in rows {
            let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols[2], cols[3]);
            total += cols[2];
        }
        assert!((total - 100.0).abs() < 1e-6);
    }
    let svg = fs::read_to_string(out.path().join("report.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("class=\"panel\"").count(), 7);
}

#[test]
fn explain_contributions_add_up() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.png");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    support::save_png(&support::pictogram(&mut rng), &path);
    let dump = dir.path().join("dump");
    let out = ers(&["explain", arg(&path), "--dump", arg(&dump)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let last = |line: &str| line.split_whitespace().last().unwrap().parse::<f64>().unwrap();
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| {
            ["palette", "edges", "saliency", "contrast", "stroke", "centering"]
                .iter()
                .any(|m| l.starts_with(m))
        })
        .collect();
    assert_eq!(rows.len(), 6);
    let sum: f64 = rows.iter().map(|l| last(l)).sum();
    let total = last(text.lines().find(|l| l.starts_with("ERS")).unwrap());
    assert!((sum - total).abs() < 1e-9, "{sum} vs {total}");

    let mut dumped: Vec<String> = fs::read_dir(&dump)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    dumped.sort();
    assert_eq!(
        dumped,
        [
            "distance_transform.png",
            "edges.png",
            "saliency.png",
            "salient_mask.png",
            "stroke_binary.png"
        ]
    );
    for name in dumped {
        let img = image::open(dump.join(&name)).unwrap();
        assert_eq!((img.width(), img.height()), (512, 512), "{name}");
    }
}
