mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fusefold::geometry::Conformation;
use fusefold::priors::write_priors;
use fusefold::rama::RamaConfig;
use fusefold::residue::parse_sequence;
use fusefold::scoring::priors_from_conformation;
use fusefold::surrogate::decode;

fn fusefold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fusefold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Generate candidates for `seq` and priors induced from candidate `k`.
fn setup(dir: &Path, seq: &str, top_n: usize, k: usize) {
    let out = fusefold(&[
        "generate",
        "--seq",
        seq,
        "--top-n",
        &top_n.to_string(),
        "--distinct",
        "--out",
        p(&dir.join("cands")),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(dir.join(format!("cands/cand{:03}.xyz", k))).unwrap();
    let c = fusefold::io_formats::parse_xyz(&text, None, "x").unwrap();
    let priors = priors_from_conformation(&c, &RamaConfig::default());
    fs::write(dir.join("priors.tsv"), write_priors(&priors)).unwrap();
}

fn manifest_ids(dir: &Path) -> Vec<String> {
    fs::read_to_string(dir.join("manifest.csv"))
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect()
}

fn summary_ids(dir: &Path) -> Vec<String> {
    fs::read_to_string(dir.join("summary.csv"))
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect()
}

#[test]
fn generate_exhaustive_writes_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("gen");
    let out = fusefold(&[
        "generate",
        "--seq",
        "AAAA",
        "--method",
        "exhaustive",
        "--top-n",
        "5",
        "--out",
        p(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let xyz = fs::read_dir(&out_dir)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "xyz")
        })
        .count();
    assert_eq!(xyz, 5);
    let manifest = fs::read_to_string(out_dir.join("manifest.csv")).unwrap();
    assert!(manifest
        .starts_with("# sequence=AAAA method=exhaustive\nrank,candidate_id,file,energy,moves\n"));
    let energies: Vec<f64> = manifest
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(energies.len(), 5);
    assert!(energies.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn invalid_residue_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fusefold(&["generate", "--seq", "ABCD", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("position 2"), "{}", stderr(&out));
}

#[test]
fn anneal_is_reproducible_by_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = fusefold(&[
            "generate",
            "--seq",
            "MKVLAFGWE",
            "--method",
            "anneal",
            "--seed",
            seed,
            "--steps",
            "3000",
            "--top-n",
            "4",
            "--out",
            p(&dir.path().join(name)),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        fs::read_to_string(dir.path().join(name).join("manifest.csv")).unwrap()
    };
    let a = run("a", "11");
    assert_eq!(a, run("b", "11"));
    assert!(a.contains("method=anneal seed=11"));
}

#[test]
fn oversized_exhaustive_request_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = fusefold(&["generate", "--seq", "AAAAAAAAAAAA", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("anneal"));
}

#[test]
fn rank_defaults_write_summary_and_structures() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path(), "MKLVFGA", 5, 3);
    let out_dir = dir.path().join("ranked");
    let out = fusefold(&[
        "rank",
        "--candidates",
        p(&dir.path().join("cands")),
        "--priors",
        p(&dir.path().join("priors.tsv")),
        "--out",
        p(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let ids = summary_ids(&out_dir);
    assert_eq!(ids.len(), 5);
    // priors were induced from cand003, whose priors terms are then exactly zero
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let row = summary
        .lines()
        .find(|l| l.split(',').nth(1) == Some("cand003"))
        .unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[3], "0.000000");
    assert_eq!(fields[4], "0.000000");
    assert!(out_dir.join(format!("rank_001_{}.pdb", ids[0])).is_file());
    assert!(out_dir.join(format!("rank_005_{}.pdb", ids[4])).is_file());
    let best = fs::read_to_string(out_dir.join("best.pdb")).unwrap();
    let first = fs::read_to_string(out_dir.join(format!("rank_001_{}.pdb", ids[0]))).unwrap();
    assert_eq!(best, first);
    let best_xyz = fs::read_to_string(out_dir.join("best.xyz")).unwrap();
    assert!(best_xyz
        .lines()
        .nth(1)
        .unwrap()
        .starts_with(&format!("id={} E_q=", ids[0])));
}

#[test]
fn energy_only_weights_follow_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path(), "WKLEFGAM", 8, 6);
    let out_dir = dir.path().join("ranked");
    let out = fusefold(&[
        "rank",
        "--candidates",
        p(&dir.path().join("cands")),
        "--priors",
        p(&dir.path().join("priors.tsv")),
        "--alpha",
        "1",
        "--beta",
        "0",
        "--gamma",
        "0",
        "--out",
        p(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        summary_ids(&out_dir),
        manifest_ids(&dir.path().join("cands"))
    );

    // the same weights from a config file
    let cfg = dir.path().join("fusefold.toml");
    fs::write(&cfg, "[fusion]\nalpha = 1.0\nbeta = 0.0\ngamma = 0.0\n").unwrap();
    let via_file = dir.path().join("ranked_cfg");
    let out = fusefold(&[
        "--config",
        p(&cfg),
        "rank",
        "--candidates",
        p(&dir.path().join("cands")),
        "--priors",
        p(&dir.path().join("priors.tsv")),
        "--out",
        p(&via_file),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        fs::read(out_dir.join("summary.csv")).unwrap(),
        fs::read(via_file.join("summary.csv")).unwrap()
    );
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path(), "FKLMVWAD", 10, 2);
    let run = |name: &str, threads: &str| {
        let out_dir = dir.path().join(name);
        let out = fusefold(&[
            "--threads",
            threads,
            "rank",
            "--candidates",
            p(&dir.path().join("cands")),
            "--priors",
            p(&dir.path().join("priors.tsv")),
            "--ss-mode",
            "ss8",
            "--ss-metric",
            "ce",
            "--out",
            p(&out_dir),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        fs::read(out_dir.join("summary.csv")).unwrap()
    };
    assert_eq!(run("one", "1"), run("four", "4"));
}

#[test]
fn rank_input_errors_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path(), "MKLVFGA", 3, 1);
    // priors for a different length
    let seq = parse_sequence("MKLVF").unwrap();
    let c = Conformation::from_parts("short", &seq, &decode(&"FUL".parse().unwrap(), 3.8), 0.0)
        .unwrap();
    let short = dir.path().join("short.tsv");
    fs::write(
        &short,
        write_priors(&priors_from_conformation(&c, &RamaConfig::default())),
    )
    .unwrap();
    let out = fusefold(&[
        "rank",
        "--candidates",
        p(&dir.path().join("cands")),
        "--priors",
        p(&short),
        "--out",
        p(&dir.path().join("x")),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = fusefold(&[
        "rank",
        "--candidates",
        p(&empty),
        "--priors",
        p(&dir.path().join("priors.tsv")),
        "--out",
        p(&dir.path().join("y")),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = fusefold(&["rank", "--candidates", p(&empty)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_internal_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = fusefold(&[
        "generate",
        "--seq",
        "AAAAA",
        "--out",
        p(&blocker.join("sub")),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn eval_reports_published_improvements() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rmsd.csv");
    fs::write(&csv, common::long_csv(&common::benchmark_columns(), None)).unwrap();
    let out_dir = dir.path().join("eval");
    let out = fusefold(&[
        "eval",
        "--rmsd",
        p(&csv),
        "--baseline",
        "af3",
        "--baseline",
        "colabfold",
        "--baseline",
        "quantum_only",
        "--hybrid",
        "hybrid",
        "--out",
        p(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let tests = fs::read_to_string(out_dir.join("tests.csv")).unwrap();
    for (line, (name, pct)) in
        tests
            .lines()
            .skip(1)
            .zip([("af3", 57.2), ("colabfold", 58.5), ("quantum_only", 28.6)])
    {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0], name);
        assert!((f[3].parse::<f64>().unwrap() - pct).abs() <= 0.05, "{line}");
        let p_t: f64 = f[9].parse().unwrap();
        let p_w: f64 = f[11].parse().unwrap();
        assert!(p_t < 1e-3 && p_w < 1e-10, "{line}");
    }
    let stats = fs::read_to_string(out_dir.join("stats.csv")).unwrap();
    let hybrid = stats.lines().find(|l| l.starts_with("hybrid,")).unwrap();
    let v: Vec<f64> = hybrid
        .split(',')
        .skip(2)
        .map(|x| x.parse().unwrap())
        .collect();
    for (got, want) in v.iter().zip([4.89, 4.70, 1.10, 2.76, 9.16]) {
        assert!((got - want).abs() <= 1e-2, "{hybrid}");
    }
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        fs::read_to_string(out_dir.join("report.txt")).unwrap()
    );
    assert!(!out_dir.join("correlation.csv").exists());
}

#[test]
fn eval_null_and_identity_cases() {
    let dir = tempfile::tempdir().unwrap();
    let values: Vec<f64> = (0..12).map(|i| 2.0 + i as f64 * 0.37).collect();
    let cols = vec![
        ("base".to_string(), values.clone()),
        ("hyb".to_string(), values.clone()),
    ];
    let csv = dir.path().join("rmsd.csv");
    fs::write(&csv, common::long_csv(&cols, Some(("hyb", &values)))).unwrap();
    let out_dir = dir.path().join("eval");
    let out = fusefold(&[
        "eval",
        "--rmsd",
        p(&csv),
        "--hybrid",
        "hyb",
        "--out",
        p(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let tests = fs::read_to_string(out_dir.join("tests.csv")).unwrap();
    let f: Vec<&str> = tests.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(f[7], "0.000000");
    assert_eq!(f[9], "5.000000e-1");
    let corr = fs::read_to_string(out_dir.join("correlation.csv")).unwrap();
    assert_eq!(
        corr.lines().nth(1).unwrap(),
        "hyb,12,1.000000,1.000000,1.000000,0.000000"
    );
}

#[test]
fn eval_misaligned_fragments_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rmsd.csv");
    fs::write(
        &csv,
        "fragment_id,method,rmsd_angstrom\nf1,a,3\nf2,a,4\nf3,a,5\nf1,b,2\nf2,b,2.5\n",
    )
    .unwrap();
    let out = fusefold(&[
        "eval",
        "--rmsd",
        p(&csv),
        "--hybrid",
        "b",
        "--out",
        p(&dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("b lacks f3"), "{}", stderr(&out));
}

#[test]
fn version_and_help() {
    let out = fusefold(&["--version"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        format!("fusefold {}", env!("CARGO_PKG_VERSION"))
    );
    for sub in ["generate", "rank", "eval"] {
        let out = fusefold(&[sub, "--help"]);
        assert!(out.status.success());
    }
    assert_eq!(fusefold(&["frobnicate"]).status.code(), Some(2));
}
