use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use negspan_cli::chart::parse_series;

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn negspan(args: &[&str]) -> Output {
    negspan_with(args, "")
}

fn negspan_with(args: &[&str], stdin: &str) -> Output {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_negspan"))
        .args(args)
        .env_remove("NEGSPAN_LEXICON")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn corpus() -> String {
    manifest("data/toy/corpus.jsonl").display().to_string()
}

fn three_models() -> String {
    manifest("tests/fixtures/three_models").display().to_string()
}

#[test]
fn three_models_two_variants_give_six_rows() {
    let out = negspan(&[
        "eval",
        "--corpus",
        &corpus(),
        "--predictions",
        &three_models(),
        "--detector",
        "none",
        "negex",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let labels: Vec<&str> = text.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(
        labels,
        ["alpha", "alpha+NegEx", "beta", "beta+NegEx", "gamma", "gamma+NegEx"]
    );
    for line in text.lines().skip(1).filter(|l| l.contains("+NegEx")) {
        assert!(line.split('\t').nth(8).unwrap().ends_with('%'), "{line}");
    }
}

#[test]
fn identical_runs_aggregate_to_one_run() {
    let dir = tempfile::tempdir().unwrap();
    let blind = std::fs::read_to_string(manifest("data/toy/blind.tsv")).unwrap();
    for run in 1..=5 {
        std::fs::write(
            dir.path().join(format!("run{run}.tsv")),
            blind.replace("#run=1", &format!("#run={run}")),
        )
        .unwrap();
    }
    let single = negspan(&["eval", "--corpus", &corpus(), "--predictions", &manifest("data/toy/blind.tsv").display().to_string()]);
    let many = negspan(&["eval", "--corpus", &corpus(), "--predictions", &dir.path().display().to_string()]);
    assert!(many.status.success(), "{}", stderr(&many));
    let cells = |o: &Output| -> Vec<String> {
        let mut c: Vec<String> = stdout(o).lines().nth(1).unwrap().split('\t').map(str::to_string).collect();
        c.remove(2); // run count
        c
    };
    assert_eq!(cells(&single), cells(&many));
    assert_eq!(stdout(&many).lines().nth(1).unwrap().split('\t').nth(2), Some("5"));
}

#[test]
fn duplicate_runs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let blind = std::fs::read_to_string(manifest("data/toy/blind.tsv")).unwrap();
    std::fs::write(dir.path().join("a.tsv"), &blind).unwrap();
    std::fs::write(dir.path().join("b.tsv"), &blind).unwrap();
    let out = negspan(&["eval", "--corpus", &corpus(), "--predictions", &dir.path().display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("more than one file"));
}

#[test]
fn exit_codes() {
    let missing = negspan(&["eval", "--corpus", &corpus(), "--predictions", "/nonexistent/preds.tsv"]);
    assert_eq!(missing.status.code(), Some(2));
    let missing_corpus = negspan(&["summary", "--corpus", "/nonexistent/corpus.jsonl"]);
    assert_eq!(missing_corpus.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("unknown.tsv");
    std::fs::write(&unknown, "#model=m\n#config=k0\n#run=1\nnot-in-corpus\t0\t3\n").unwrap();
    let out = negspan(&["eval", "--corpus", &corpus(), "--predictions", &unknown.display().to_string()]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));

    let mixed = dir.path().join("mixed.tsv");
    std::fs::write(&mixed, "#model=m\n#detector=NegEx\n#config=k0\n#run=1\nade01\t19\t30\n").unwrap();
    let out = negspan(&[
        "eval",
        "--corpus",
        &corpus(),
        "--predictions",
        &mixed.display().to_string(),
        "--detector",
        "negex",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("mixed-mode"));

    let nothing = negspan(&["eval"]);
    assert_eq!(nothing.status.code(), Some(1));
}

#[test]
fn scope_file_detector() {
    let dir = tempfile::tempdir().unwrap();
    let scopes = dir.path().join("scopes.tsv");
    std::fs::write(&scopes, "#model=BERTneg\n#config=k0\n#run=1\nneg01\t19\t37\nneg02\t0\t40\n").unwrap();
    let out = negspan(&[
        "eval",
        "--corpus",
        &corpus(),
        "--predictions",
        &manifest("data/toy/blind.tsv").display().to_string(),
        "--detector",
        "none",
        &format!("file:{}", scopes.display()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("toy-blind+BERTneg")).unwrap();
    // three negADE false positives removed out of eleven
    assert_eq!(row.split('\t').nth(7), Some("8.0"));
}

#[test]
fn strict_mode_and_markdown() {
    let blind = manifest("data/toy/blind.tsv").display().to_string();
    let relaxed = negspan(&["eval", "--corpus", &corpus(), "--predictions", &blind]);
    let strict = negspan(&["eval", "--corpus", &corpus(), "--predictions", &blind, "--match-mode", "strict", "--format", "markdown"]);
    assert!(strict.status.success());
    let s = stdout(&strict);
    assert!(s.starts_with("| model | config |"));
    assert!(s.contains("| strict |"));
    assert_ne!(stdout(&relaxed), s);
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = negspan(&[
            "sweep",
            "--reports",
            &manifest("tests/fixtures/bert_runs.txt").display().to_string(),
            "--out",
            &dir.path().display().to_string(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let mut names: Vec<String> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["curve.tsv", "fp_ADE.svg", "fp_negADE.svg", "fp_noADE.svg", "fp_total.svg", "report.md", "report.tsv", "reports.txt"]
    );
    for name in &names {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }

    // chart and curve file carry the same points
    let curve = std::fs::read_to_string(a.path().join("curve.tsv")).unwrap();
    let svg = std::fs::read_to_string(a.path().join("fp_negADE.svg")).unwrap();
    for (label, points) in parse_series(&svg) {
        let from_tsv: Vec<(usize, f64)> = curve
            .lines()
            .skip(1)
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split('\t').collect::<Vec<_>>())
            .filter(|c| c[0] == label)
            .map(|c| (c[1].parse().unwrap(), c[5].parse().unwrap()))
            .collect();
        assert_eq!(points, from_tsv, "{label}");
    }

    // records written by --out feed back into eval unchanged
    let round = negspan(&["eval", "--reports", &a.path().join("reports.txt").display().to_string()]);
    assert_eq!(stdout(&round), std::fs::read_to_string(a.path().join("report.tsv")).unwrap());
}

#[test]
fn single_k_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = negspan(&[
        "sweep",
        "--reports",
        &manifest("tests/fixtures/bert_runs.txt").display().to_string(),
        "--k",
        "50",
        "--out",
        &dir.path().display().to_string(),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(dir.path().join("fp_total.svg")).unwrap();
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(parse_series(&svg), vec![("BERT".to_string(), vec![(50, 146.6)])]);
}

#[test]
fn detect_examples() {
    let out = negspan(&["detect", "--text", "fluoxetine, didn't get me going crazy."]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1\tPRE\t12\t18\tdidn't\t19\t37\tget me going crazy\n");

    let empty = negspan_with(&["detect"], "");
    assert!(empty.status.success());
    assert_eq!(stdout(&empty), "");
    let empty_text = negspan(&["detect", "--text", ""]);
    assert!(empty_text.status.success());
    assert_eq!(stdout(&empty_text), "");

    let piped = negspan_with(&["detect", "--input", "-"], "no rash\nfine\nnot tired\n");
    let piped = stdout(&piped);
    let lines: Vec<&str> = piped.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(lines, ["1", "3"]);

    let bad = negspan(&["detect", "--text", "no rash", "--lexicon", "/nonexistent/lexicon.tsv"]);
    assert_ne!(bad.status.code(), Some(0));
    assert!(stderr(&bad).contains("/nonexistent/lexicon.tsv"));
}

#[test]
fn lexicon_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let lexicon = dir.path().join("lex.tsv");
    std::fs::write(&lexicon, "PRE\tzero\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_negspan"))
        .args(["detect", "--text", "zero nausea, no rash"])
        .env("NEGSPAN_LEXICON", &lexicon)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1\tPRE\t0\t4\tzero\t5\t20\tnausea, no rash\n");
    let narrow = negspan(&["detect", "--text", "no a b c d e f", "--window", "2"]);
    assert_eq!(stdout(&narrow), "1\tPRE\t0\t2\tno\t3\t6\ta b\n");
    let zero = negspan(&["detect", "--text", "no a", "--window", "0"]);
    assert_eq!(zero.status.code(), Some(1));
}

#[test]
fn recover_examples() {
    let dir = tempfile::tempdir().unwrap();
    let tweets = [
        "This #HUMIRA shot has me feeling like a normal human... No pain no inflammation no nothinggggh #RAproblems",
        "@UKingsbrook That's correct! Metoprolol is NOT known to cause hypokalemia.",
        "I've seen so much Tamiflu these past couple of days I'm not even surprised I'm shivering and experiencing aches right now. *sigh",
        "But I'm not on adderall and I am feasting.",
    ];
    let corpus: String = tweets
        .iter()
        .enumerate()
        .map(|(i, t)| serde_json::json!({"id": format!("ex{}", i + 1), "text": t, "category": "noADE"}).to_string() + "\n")
        .collect();
    let path = dir.path().join("examples.jsonl");
    std::fs::write(&path, corpus).unwrap();
    let out = dir.path().join("candidates.jsonl");
    let args = ["recover", "--corpus", path.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert!(negspan(&args).status.success());
    let first = std::fs::read_to_string(&out).unwrap();
    assert_eq!(first.lines().count(), 4);
    let ex4: serde_json::Value = serde_json::from_str(first.lines().nth(3).unwrap()).unwrap();
    assert_eq!(ex4["highlighted"], "But I'm **not** on adderall and I am feasting.");
    assert_eq!(ex4["cues"][0]["start"], 8);
    assert!(negspan(&args).status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);

    let plain = dir.path().join("plain.jsonl");
    std::fs::write(&plain, "{\"id\":\"p\",\"text\":\"took my pill\",\"category\":\"noADE\"}\n").unwrap();
    let none = negspan(&["recover", "--corpus", plain.to_str().unwrap()]);
    assert!(none.status.success());
    assert_eq!(stdout(&none), "");

    // candidates feed straight into the review service
    let tasks = negspan_review::tasks_from_candidates(&first, 1).unwrap();
    assert_eq!(tasks.len(), 4);
    assert_eq!(tasks[3].cues[0].slice(&tasks[3].text), Some("not"));
}

#[test]
fn summary_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    std::fs::write(
        &path,
        concat!(
            "{\"id\":\"a\",\"text\":\"rash\",\"category\":\"ADE\",\"gold\":[[0,4]],\"split\":\"train\"}\n",
            "{\"id\":\"g\",\"text\":\"no rash\",\"category\":\"negADE_G\",\"origin_id\":\"a\",\"split\":\"train\"}\n",
            "{\"id\":\"n\",\"text\":\"ok\",\"category\":\"noADE\",\"split\":\"test\"}\n",
            "{\"id\":\"r\",\"text\":\"no itch\",\"category\":\"negADE_R\",\"split\":\"test\"}\n",
        ),
    )
    .unwrap();
    let out = negspan(&["summary", "--corpus", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "partition\tADE\tnoADE\tnegADE\ttotal\ntrain\t1\t0\t1\t2\ntest\t0\t1\t1\t2\n# test negADE share: 50.0%\n"
    );
}
