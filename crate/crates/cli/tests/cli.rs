use std::path::{Path, PathBuf};
use std::process::Command;

use embias::embeddings::load_embeddings;
use embias::wordlists::{load_wordlists, SectionKind};
use embias_core::audit::construct_direct_bias_counterexample;
use embias_core::directbias::direct_bias_word;
use embias_core::subspace::{centered_samples, pca, DefiningSetFamily};
use embias_core::weat::{effect_size, WeatInstance};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("embias").chain(args.iter().copied());
    let code = embias::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

/// Four targets with s-values (1, 0 | 0, −1) against axis attributes.
fn four_target_fixture(dir: &Path) -> (String, String) {
    let e = write(
        dir,
        "emb.txt",
        "6 2\nx1 1 0\nx2 1 1\ny1 1 1.0000001\ny2 0 1\na 1 0\nb 0 1\n",
    );
    let w = write(
        dir,
        "words.txt",
        "[group:a]\na\n[group:b]\nb\n[targets:x]\nx1\nx2\n[targets:y]\ny1\ny2\n",
    );
    (e.display().to_string(), w.display().to_string())
}

/// Brute force over every 2-of-4 subset assigned to X.
fn bipartition_oracle(xs: &[f64], ys: &[f64]) -> f64 {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let observed = xs.iter().sum::<f64>() - ys.iter().sum::<f64>();
    let (mut hits, mut total) = (0, 0);
    for mask in 0u32..16 {
        if mask.count_ones() != 2 {
            continue;
        }
        total += 1;
        let stat: f64 = pooled
            .iter()
            .enumerate()
            .map(|(i, v)| if mask & (1 << i) != 0 { *v } else { -*v })
            .sum();
        if stat - observed > 1e-12 * (1.0 + observed.abs()) {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

#[test]
fn weat_exact_p_matches_bipartition_oracle() {
    let dir = TempDir::new().unwrap();
    let (e, w) = four_target_fixture(dir.path());
    let args = [
        "weat",
        "--embeddings",
        &e,
        "--wordlists",
        &w,
        "--group-a",
        "a",
        "--group-b",
        "b",
        "--targets-x",
        "x",
        "--targets-y",
        "y",
        "--permutations",
        "exact",
    ];
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    let r = json(&out)["results"].clone();
    let s = |set: &str| -> Vec<f64> {
        r["targets"][set]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t["s"].as_f64().unwrap())
            .collect()
    };
    let expected = bipartition_oracle(&s("x"), &s("y"));
    assert_eq!(r["p_value"]["evaluated"], 6);
    assert_eq!(r["p_value"]["mode"], "exact");
    assert!((r["p_value"]["p"].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn identical_targets_exit_with_degeneracy() {
    let dir = TempDir::new().unwrap();
    let e = write(dir.path(), "e.txt", "3 2\nt 1 1\na 1 0\nb 0 1\n");
    let w = write(
        dir.path(),
        "w.txt",
        "[group:a]\na\n[group:b]\nb\n[targets:x]\nt\n[targets:y]\nt\n",
    );
    let (code, out, err) = run(&[
        "weat",
        "--embeddings",
        e.to_str().unwrap(),
        "--wordlists",
        w.to_str().unwrap(),
        "--group-a",
        "a",
        "--group-b",
        "b",
        "--targets-x",
        "x",
        "--targets-y",
        "y",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("degeneracy"), "{err}");
    let r = json(&out);
    assert_eq!(r["results"]["effect_size"], Value::Null);
    assert_eq!(r["results"]["effect_size_status"], "degenerate");
}

#[test]
fn reports_are_byte_identical_and_worker_independent() {
    let dir = TempDir::new().unwrap();
    let (e, w) = four_target_fixture(dir.path());
    let mut outputs = Vec::new();
    for workers in ["1", "2", "8", "8"] {
        let out_dir = dir.path().join(format!("run{}", outputs.len()));
        let (code, _, _) = run(&[
            "weat",
            "--embeddings",
            &e,
            "--wordlists",
            &w,
            "--group-a",
            "a",
            "--group-b",
            "b",
            "--targets-x",
            "x",
            "--targets-y",
            "y",
            "--permutations",
            "5000",
            "--seed",
            "3",
            "--workers",
            workers,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        outputs.push((
            std::fs::read(out_dir.join("report.json")).unwrap(),
            std::fs::read(out_dir.join("scores.csv")).unwrap(),
        ));
    }
    assert!(outputs.windows(2).all(|p| p[0] == p[1]));
}

#[test]
fn scores_csv_has_header_and_rows() {
    let dir = TempDir::new().unwrap();
    let (e, w) = four_target_fixture(dir.path());
    let out_dir = dir.path().join("o");
    run(&[
        "weat",
        "--embeddings",
        &e,
        "--wordlists",
        &w,
        "--group-a",
        "a",
        "--group-b",
        "b",
        "--targets-x",
        "x",
        "--targets-y",
        "y",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(out_dir.join("scores.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "set,token,s,association_a,association_b,biased");
    assert_eq!(lines[1], "x,x1,1.0,1.0,0.0,true");
    assert_eq!(lines.len(), 5);
}

#[test]
fn attrdiff_on_axis_attributes() {
    let dir = TempDir::new().unwrap();
    let (e, w) = four_target_fixture(dir.path());
    let (code, out, _) = run(&[
        "attrdiff",
        "--embeddings",
        &e,
        "--wordlists",
        &w,
        "--group-a",
        "a",
        "--group-b",
        "b",
    ]);
    assert_eq!(code, 0);
    let v = json(&out)["results"]["attribute_difference_norm"]
        .as_f64()
        .unwrap();
    assert!((v - 2f64.sqrt()).abs() < 1e-11);
    let (code, _, _) = run(&[
        "attrdiff",
        "--embeddings",
        &e,
        "--wordlists",
        &w,
        "--group-a",
        "a",
        "--group-b",
        "a",
    ]);
    assert_eq!(code, 3);
}

#[test]
fn correlate_emits_square_matrix_with_pc1() {
    let dir = TempDir::new().unwrap();
    let e = write(
        dir.path(),
        "e.txt",
        "4 2\nhe 2 0\nshe 0 0.5\nman 1 0\nwoman 0 1\n",
    );
    let w = write(dir.path(), "w.txt", "[pairs:g]\nhe\nshe\nman\nwoman\n");
    let (code, out, _) = run(&[
        "correlate",
        "--embeddings",
        e.to_str().unwrap(),
        "--wordlists",
        w.to_str().unwrap(),
        "--pairs",
        "g",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], ",he-she,man-woman,PC1");
    assert_eq!(lines.len(), 4);
    for (i, line) in lines[1..].iter().enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[i + 1], "1.0");
    }
}

#[test]
fn directbias_flags_zero_strictness_and_low_agreement() {
    let dir = TempDir::new().unwrap();
    let e = write(
        dir.path(),
        "e.txt",
        "5 3\nhe 1 0 0\nshe -1 0 0\nman 0 1 0\nwoman 0 -1 0\nnurse 0 0 1\n",
    );
    let w = write(
        dir.path(),
        "w.txt",
        "[pairs:g]\nhe\nshe\nman\nwoman\n[targets:n]\nnurse\n",
    );
    let (code, out, err) = run(&[
        "directbias",
        "--embeddings",
        e.to_str().unwrap(),
        "--wordlists",
        w.to_str().unwrap(),
        "--pairs",
        "g",
        "--neutral",
        "n",
        "--strictness",
        "0",
    ]);
    assert_eq!(code, 0);
    assert!(err.contains("strictness 0"));
    assert!(err.contains("median absolute cosine"));
    // nurse is exactly orthogonal to the bias direction: 0^0 is 0
    assert_eq!(json(&out)["results"]["direct_bias"].as_f64().unwrap(), 0.0);
}

#[test]
fn counterexample_files_round_trip_to_twelve_digits() {
    let dir = TempDir::new().unwrap();
    for (r, d) in [("2", "2"), ("1.37", "7")] {
        let out = dir.path().join(format!("ce{r}"));
        let (code, _, _) = run(&[
            "counterexample",
            "--kind",
            "directbias",
            "--r",
            r,
            "--dim",
            d,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let space = load_embeddings(&out.join("embeddings.txt")).unwrap();
        let lists = load_wordlists(&out.join("wordlists.txt")).unwrap();
        let ce = construct_direct_bias_counterexample(r.parse().unwrap(), 1.0, d.parse().unwrap())
            .unwrap();
        let pairs = lists
            .pairs("defining")
            .unwrap()
            .into_iter()
            .map(|(u, v)| {
                (
                    space.get(u).unwrap().to_vec(),
                    space.get(v).unwrap().to_vec(),
                )
            })
            .collect();
        let family = DefiningSetFamily::from_pairs(pairs).unwrap();
        let reloaded = pca(&centered_samples(&family), 1).unwrap();
        let original = pca(&centered_samples(&ce.family), 1).unwrap();
        for probe in ["neutral", "separating"] {
            let t = space.get(probe).unwrap();
            let a = direct_bias_word(t, reloaded.first(), 1.0).unwrap();
            let b = direct_bias_word(t, original.first(), 1.0).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }
    let out = dir.path().join("wz");
    run(&[
        "counterexample",
        "--kind",
        "weat-zero",
        "--dim",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    let space = load_embeddings(&out.join("embeddings.txt")).unwrap();
    let lists = load_wordlists(&out.join("wordlists.txt")).unwrap();
    let get = |kind, name| space.lookup_all(lists.tokens(kind, name).unwrap()).unwrap();
    let inst = WeatInstance::from_vectors(
        get(SectionKind::Targets, "x"),
        get(SectionKind::Targets, "y"),
        get(SectionKind::Group, "a"),
        get(SectionKind::Group, "b"),
    )
    .unwrap();
    let (original, _) = embias_core::audit::construct_weat_zero_bias(5).unwrap();
    assert!((effect_size(&inst).unwrap() - effect_size(&original).unwrap()).abs() <= 1e-12);
    let witness: Value = json(&std::fs::read_to_string(out.join("witness.json")).unwrap());
    assert_eq!(witness["kind"], "trustworthiness-violation");
    assert_eq!(witness["rechecked"], true);
}

#[test]
fn audit_reports_witnesses_with_vectors() {
    let (code, out, _) = run(&[
        "audit",
        "--score",
        "directbias",
        "--trials",
        "4",
        "--dim",
        "3",
    ]);
    assert_eq!(code, 0);
    let r = json(&out)["results"].clone();
    let ws = r["trustworthiness"]["witnesses"].as_array().unwrap();
    assert!(!ws.is_empty());
    assert!(ws
        .iter()
        .all(|w| w["rechecked"] == true && w["geometry"]["pairs"].is_array()));
    let (code, out, _) = run(&["audit", "--score", "weat-s", "--trials", "20"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["results"]["trustworthiness"]["violations"], 0);
}

#[test]
fn data_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let (e, w) = four_target_fixture(dir.path());
    let (code, _, err) = run(&[
        "weat",
        "--embeddings",
        &e,
        "--wordlists",
        &w,
        "--group-a",
        "a",
        "--group-b",
        "nope",
        "--targets-x",
        "x",
        "--targets-y",
        "y",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("[group:nope]"));
    let bad = write(dir.path(), "bad.txt", "2 2\nhe 1 0\nshe 1\n");
    let (code, _, err) = run(&[
        "attrdiff",
        "--embeddings",
        bad.to_str().unwrap(),
        "--wordlists",
        &w,
        "--group-a",
        "a",
        "--group-b",
        "b",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains(":3:"), "{err}");
    let missing = write(dir.path(), "m.txt", "[group:a]\na\n[group:b]\nzzz\n");
    let (code, _, err) = run(&[
        "attrdiff",
        "--embeddings",
        &e,
        "--wordlists",
        missing.to_str().unwrap(),
        "--group-a",
        "a",
        "--group-b",
        "b",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("zzz"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["weat"]).0, 1);
    assert_eq!(run(&["audit", "--score", "nonsense"]).0, 1);
    assert_eq!(run(&["audit", "--score", "weat-s", "--dim", "1"]).0, 1);
    assert_eq!(
        run(&[
            "counterexample",
            "--kind",
            "directbias",
            "--r",
            "0.5",
            "--out",
            "/nonexistent/x"
        ])
        .0,
        3
    );
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("counterexample"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_embias");
    let dir = TempDir::new().unwrap();
    let (e, w) = four_target_fixture(dir.path());
    let status = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
            .unwrap()
    };
    assert_eq!(
        status(&[
            "attrdiff",
            "--embeddings",
            &e,
            "--wordlists",
            &w,
            "--group-a",
            "a",
            "--group-b",
            "b"
        ]),
        0
    );
    assert_eq!(status(&["bogus"]), 1);
    assert_eq!(
        status(&[
            "attrdiff",
            "--embeddings",
            "/no/such",
            "--wordlists",
            &w,
            "--group-a",
            "a",
            "--group-b",
            "b"
        ]),
        2
    );
    assert_eq!(
        status(&[
            "attrdiff",
            "--embeddings",
            &e,
            "--wordlists",
            &w,
            "--group-a",
            "b",
            "--group-b",
            "b"
        ]),
        3
    );
}
