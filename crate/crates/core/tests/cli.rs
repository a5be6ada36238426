use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn depcross(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depcross")).args(args).output().unwrap()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/fixture.conll")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let missing = dir.path().join("missing.conll");
    assert_eq!(depcross(&["analyze", "--out", s(&out), s(&missing)]).status.code(), Some(2));
    assert_eq!(depcross(&["analyze", "--bogus", "--out", s(&out), s(&fixture())]).status.code(), Some(2));
    assert_eq!(
        depcross(&["analyze", "--config", s(&missing), "--out", s(&out), s(&fixture())]).status.code(),
        Some(2)
    );
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "punctuation.colour = red\n").unwrap();
    let o = depcross(&["analyze", "--config", s(&bad), "--out", s(&out), s(&fixture())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    assert_eq!(depcross(&["prob-map"]).status.code(), Some(2));
    assert_eq!(depcross(&["analyze", "--min-group-size", "0", "--out", s(&out), s(&fixture())]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    assert_eq!(depcross(&["analyze", "--out", s(&out), s(&fixture())]).status.code(), Some(3));
    assert_eq!(depcross(&["prob-map", "--n", "5", "--out", s(&out)]).status.code(), Some(3));
}

#[test]
fn empty_input_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.conll");
    fs::write(&empty, "").unwrap();
    let o = depcross(&["analyze", "--out", s(&dir.path().join("out")), s(&empty)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no filtered sentences"));
}

#[test]
fn probability_map_rows() {
    let o = depcross(&["prob-map", "--n", "4"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("# n: 4\n"));
    assert_eq!(
        body(&text),
        [
            "n\td1\td2\talpha\tbeta\tp",
            "4\t1\t1\t0\t2\t0.000000",
            "4\t1\t3\t0\t1\t0.000000",
            "4\t2\t2\t2\t2\t1.000000",
        ]
    );
    let full = String::from_utf8(depcross(&["prob-map", "--n", "4", "--full"]).stdout).unwrap();
    assert_eq!(body(&full).len(), 5);
}

#[test]
fn analyze_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = depcross(&["analyze", "--group-by-length", "--out", s(&out), s(&fixture())]);
        assert!(o.status.success());
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["fixture.sentences.tsv", "summary.tsv", "by_length.tsv", "length_summary.tsv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn simulate_is_seeded() {
    let run = |seed: &str| {
        let o = depcross(&["simulate", "--n", "9", "--trees", "3", "--samples", "2000", "--seed", seed]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
    };
    let (a, err) = run("17");
    assert_eq!(a, run("17").0);
    assert_ne!(a, run("18").0);
    assert!(err.contains("17"));
    assert!(a.contains("# seed: 17\n"));
    let rows = body(&a);
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("tree\tn\tQ\th\tC\tE0\tE2"));

    let planar = depcross(&["simulate", "--n", "9", "--trees", "3", "--samples", "2000", "--arrangement", "planar"]);
    let text = String::from_utf8(planar.stdout).unwrap();
    for row in body(&text).iter().skip(1) {
        assert_eq!(row.split('\t').nth(4), Some("0"), "{row}");
    }
    assert_eq!(depcross(&["simulate", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn report_rebuilds_summaries_from_sentence_tables() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    assert!(depcross(&["analyze", "--group-by-length", "--out", s(&first), s(&fixture())]).status.success());
    let second = dir.path().join("second");
    let o = depcross(&[
        "report",
        "--group-by-length",
        "--out",
        s(&second),
        s(&first.join("fixture.sentences.tsv")),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // re-aggregated from six-decimal values: headers and integers exact, floats to 1e-5
    for f in ["summary.tsv", "by_length.tsv", "length_summary.tsv"] {
        let a = fs::read_to_string(first.join(f)).unwrap();
        let b = fs::read_to_string(second.join(f)).unwrap();
        assert_eq!(a.lines().count(), b.lines().count(), "{f}");
        for (x, y) in a.lines().zip(b.lines()) {
            for (u, v) in x.split('\t').zip(y.split('\t')) {
                match (u.parse::<f64>(), v.parse::<f64>()) {
                    (Ok(p), Ok(q)) if u.contains('.') => assert!((p - q).abs() <= 1e-5, "{f}: {u} vs {v}"),
                    _ => assert_eq!(u, v, "{f}"),
                }
            }
        }
    }
}

#[test]
fn two_treebanks_produce_a_curve() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("alpha.conll");
    let b = dir.path().join("beta.conll");
    fs::copy(fixture(), &a).unwrap();
    fs::copy(fixture(), &b).unwrap();
    let out = dir.path().join("out");
    assert!(depcross(&["analyze", "--group-by-length", "--out", s(&out), s(&a), s(&b)]).status.success());
    let curve = fs::read_to_string(out.join("curve.tsv")).unwrap();
    let rows = body(&curve);
    assert_eq!(rows[0], "n\ttreebanks\tmean_delta0\tsd_delta0\tmean_delta2\tsd_delta2\treference_delta0");
    // identical treebanks: zero spread, four shared lengths
    assert_eq!(rows.len(), 5);
    for r in &rows[1..] {
        let f: Vec<&str> = r.split('\t').collect();
        assert_eq!((f[1], f[3], f[5], f[6]), ("2", "0.000000", "0.000000", "0.333333"));
    }
    let summary = fs::read_to_string(out.join("summary.tsv")).unwrap();
    assert_eq!(body(&summary).len(), 3);
}

#[test]
fn conllu_input_skips_multiword_and_empty_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("u.conllu");
    fs::write(
        &input,
        "# sent_id = 1\n1-2\tdu\t_\t_\t_\t_\t_\t_\t_\t_\n1\tde\t_\tADP\t_\t_\t3\tcase\t_\t_\n\
         2\tle\t_\tDET\t_\t_\t3\tdet\t_\t_\n3\tchat\t_\tNOUN\t_\t_\t0\troot\t_\t_\n\
         3.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n4\tnoir\t_\tADJ\t_\t_\t2\tamod\t_\t_\n\
         5\tdort\t_\tVERB\t_\t_\t1\tdep\t_\t_\n\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = depcross(&["analyze", "--format", "conllu-basic", "--out", s(&out), s(&input)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = fs::read_to_string(out.join("u.sentences.tsv")).unwrap();
    assert!(body(&rows)[1].starts_with("1\t5\t"));
    // the same text read as CoNLL-X is malformed
    let o = depcross(&["analyze", "--out", s(&out), s(&input)]);
    assert_eq!(o.status.code(), Some(4));
}
