use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddesign")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pencil_lines_construction() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lines.ddesign");
    let o = run(&["construct", "--family", "pg-pencil-lines", "--d", "3", "--q", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("counted    v=4 k={1} n=3 b=16"), "{text}");
    assert!(text.contains("lambda=1"), "{text}");
    let v = run(&["verify", path_str(&out), "--type", "1,1"]);
    assert_eq!(code(&v), 0);
}

#[test]
fn every_construction_reverifies_from_its_file() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], &str)] = &[
        (&["--family", "ag-hyperplane", "--d", "3", "--q", "2", "--t", "2"], "2,1"),
        (&["--family", "pg-pencil-planes", "--d", "3", "--q", "3"], "1,1"),
        (&["--family", "spread", "--d", "5", "--q", "2", "--t", "2"], "2,2"),
        (&["--family", "oa", "--q", "3", "--partition", "2,1", "--type", "1,1"], "1,1"),
        (&["--family", "oa", "--q", "2", "--source", "two-lines", "--type", "2,1"], "2,1"),
        (&["--family", "oa", "--q", "3", "--partition", "2,2,2"], "1,1,1"),
    ];
    for (i, (args, ty)) in cases.iter().enumerate() {
        let out = dir.path().join(format!("{i}.ddesign"));
        let mut full = vec!["construct"];
        full.extend_from_slice(args);
        full.extend(["--out", path_str(&out)]);
        let o = run(&full);
        assert_eq!(code(&o), 0, "{args:?}: {}{}", stdout(&o), stderr(&o));
        let v = run(&["verify", path_str(&out), "--type", ty]);
        assert_eq!(code(&v), 0, "{args:?}: {}", stdout(&v));
    }
}

#[test]
fn explicit_generator_rows_fix_the_block_order() {
    let o = run(&["construct", "--family", "oa", "--q", "3", "--partition", "2,1", "--generator", "1,0,1;1,2,2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let blocks: Vec<&str> = text.lines().skip(4).collect();
    assert_eq!(&text.lines().take(4).collect::<Vec<_>>(), &["DDESIGN 1", "layers 2", "sizes 6 3", "blocks 9"]);
    assert_eq!(blocks[0], "0 3 | 0");
    assert_eq!(blocks[1], "1 5 | 2");
    assert_eq!(blocks[8], "1 4 | 0");
    assert!(stderr(&o).contains("lambda=1"));
}

#[test]
fn impossible_spread_is_a_usage_error() {
    let o = run(&["construct", "--family", "spread", "--d", "2", "--q", "2", "--t", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no spread"));
}

#[test]
fn verify_prints_the_profile() {
    let o = run(&["verify", path_str(&fixture("two_layer_udd.ddesign")), "--type", "1,1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(0,1)=3 (1,0)=3 (1,1)=1"), "{}", stdout(&o));
}

#[test]
fn verify_reports_a_counterexample() {
    let o = run(&["verify", path_str(&fixture("variable_sizes.ddesign")), "--type", "2,2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("not regular"));
}

#[test]
fn budget_overrun_is_not_a_pass() {
    let o = run(&["verify", path_str(&fixture("three_layer.ddesign")), "--type", "1,1", "--budget", "10"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ddesign");
    std::fs::write(&bad, "DDESIGN 1\nlayers 2\nsizes 3 3\nblocks 1\n0 1 | 7\n").unwrap();
    let o = run(&["verify", path_str(&bad), "--type", "1,1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));
    let missing = run(&["verify", "/nonexistent/file", "--type", "1,1"]);
    assert_eq!(code(&missing), 2);
    let bad_type = run(&["verify", path_str(&fixture("two_layer_udd.ddesign")), "--type", "1,0"]);
    assert_eq!(code(&bad_type), 2);
}

#[test]
fn deletion_cases() {
    let three = fixture("three_layer.ddesign");
    let swallowed = run(&["delete", path_str(&three), "--points", "2:0,2:3"]);
    assert_eq!(code(&swallowed), 1);
    assert!(stderr(&swallowed).contains("removes sub-block 2 of block 0"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("deleted.ddesign");
    let ok = run(&["delete", path_str(&three), "--points", "1:0,2:3", "--out", path_str(&out)]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("layer 2 keeps 0,1,2,4,5"));
    assert_eq!(code(&run(&["verify", path_str(&out), "--type", "1,1"])), 0);
}

#[test]
fn transforms_chain_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let two = fixture("two_layer_udd.ddesign");

    assert_eq!(code(&run(&["extend", path_str(&two), "--n", "3", "--out", path_str(&p("ext"))])), 0);
    let expected = std::fs::read_to_string(fixture("extended_udd.ddesign")).unwrap();
    assert_eq!(std::fs::read_to_string(p("ext")).unwrap(), expected);

    assert_eq!(code(&run(&["restrict", path_str(&fixture("three_layer.ddesign")), "--layers", "1,2", "--out", path_str(&p("r"))])), 0);
    assert_eq!(std::fs::read_to_string(p("r")).unwrap(), std::fs::read_to_string(&two).unwrap());

    assert_eq!(code(&run(&["complement", path_str(&two), "--out", path_str(&p("c"))])), 0);
    assert_eq!(code(&run(&["verify", path_str(&p("c")), "--type", "1,1"])), 0);
    assert_eq!(code(&run(&["complement", path_str(&p("c")), "--out", path_str(&p("cc"))])), 0);
    assert_eq!(std::fs::read_to_string(p("cc")).unwrap(), std::fs::read_to_string(&two).unwrap());

    let prod = run(&["product", path_str(&two), path_str(&two)]);
    assert_eq!(code(&prod), 0);
    assert!(stdout(&prod).contains("layers 4\nsizes 6 6 6 6\nblocks 81\n"));
}

#[test]
fn masks_encode_membership() {
    let o = run(&["export-masks", path_str(&fixture("two_layer_udd.ddesign"))]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "DMASK 1");
    assert_eq!(lines.len(), 4 + 9);
    assert_eq!(lines[4], "100100|100100");
}

#[test]
fn filter_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.dfilter");
    let g = run(&["filter-gen", "--v", "7", "--base", "0,1,3", "--out", path_str(&out)]);
    assert_eq!(code(&g), 0);
    let expected = std::fs::read_to_string(fixture("cyclic_first.dfilter")).unwrap();
    let written = std::fs::read_to_string(&out).unwrap();
    let first_matrix: String = written.lines().take(10).map(|l| format!("{l}\n")).collect();
    let expected_body: String = expected.lines().skip(3).collect::<Vec<_>>().join("\n");
    assert!(first_matrix.ends_with(&format!("{expected_body}\n")), "{first_matrix}");
    let v = run(&["filter-verify", path_str(&out)]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).contains("k=3 r=3"));
}

#[test]
fn scrambled_filters_stay_balanced_and_report_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.dfilter");
    let g = run(&["filter-gen", "--v", "13", "--k", "4", "--scramble-seed", "99", "--out", path_str(&out)]);
    assert_eq!(code(&g), 0, "{}", stderr(&g));
    assert!(stdout(&g).contains("scramble seed 99"));
    assert_eq!(code(&run(&["filter-verify", path_str(&out)])), 0);
}

#[test]
fn unbalanced_filters_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.dfilter");
    std::fs::write(&out, "DFILTER 1\nv 3\nmatrices 1\n100\n010\n001\n").unwrap();
    let v = run(&["filter-verify", path_str(&out)]);
    assert_eq!(code(&v), 1);
    assert_eq!(code(&run(&["filter-gen", "--v", "5", "--base", "0,1"])), 1);
}

#[test]
fn experiment_csv_is_reproducible() {
    let a = run(&["experiment", "--samples", "500", "--seed", "1"]);
    assert_eq!(code(&a), 0);
    let csv = stdout(&a);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "regime,samples,min,q1,median,q3,max,achieved_alpha_beta_count");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().enumerate().all(|(i, l)| l.starts_with(&format!("{},500,", i + 1))));
    let b = run(&["--threads", "1", "experiment", "--samples", "500", "--seed", "1"]);
    assert_eq!(stdout(&b), csv);
    let c = run(&["experiment", "--samples", "500"]);
    assert!(stderr(&c).contains("seed 0,"));
}

#[test]
fn thread_count_does_not_change_output() {
    let path = fixture("three_layer.ddesign");
    let one = run(&["--threads", "1", "verify", path_str(&path), "--type", "1,1"]);
    let many = run(&["--threads", "4", "verify", path_str(&path), "--type", "1,1"]);
    assert_eq!(stdout(&one), stdout(&many));
}

#[test]
fn unknown_verbs_are_usage_errors() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["construct", "--family", "nonsense"])), 2);
    assert_eq!(code(&run(&["construct", "--family", "pg-pencil-lines", "--q", "6", "--d", "2"])), 2);
}
