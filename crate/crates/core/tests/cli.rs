use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn cdwsd<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_cdwsd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const TWO_SENSES: &str = "SYNSET\tr\t\tthing\n\
SYNSET\ta1\tr\ta\nSYNSET\ta2\tr\ta\nSYNSET\tb1\tr\tb\nSYNSET\tb2\tr\tb\nSYNSET\tm1\tr\tm\n\
SENSE\ta\t1\ta1\tnoun.x.0\nSENSE\ta\t2\ta2\tnoun.x.1\n\
SENSE\tb\t1\tb1\tnoun.x.0\nSENSE\tb\t2\tb2\tnoun.x.1\n\
SENSE\tm\t1\tm1\tnoun.x.0\n";

#[test]
fn check_reports_size_and_height() {
    let o = cdwsd([OsString::from("check"), data("hierarchy_b.tax").into()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    assert!(first.starts_with("31 synsets"), "{first}");
    assert!(first.ends_with("max height 5"), "{first}");
    assert!(out.contains("height 1: 16\n"), "{out}");
}

#[test]
fn check_rejects_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "cycle.tax", "SYNSET\ta\tc\tx\nSYNSET\tb\ta\ty\nSYNSET\tc\tb\tz\n");
    let o = cdwsd([OsString::from("check"), p.into()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cycle"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn check_warns_on_empty_taxonomy() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "empty.tax", "");
    let o = cdwsd([OsString::from("check"), p.into()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("0 synsets"));
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn disambiguates_the_worked_example() {
    let o = cdwsd([
        OsString::from("disambiguate"),
        "--taxonomy".into(),
        data("sample.tax").into(),
        "--input".into(),
        data("sample_lemmas.txt").into(),
        "--window".into(),
        "5".into(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5);
    assert!(out.contains("2\toperation\tRESOLVED\tnoun.group.0\n"), "{out}");
    assert!(stderr(&o).contains("kept 5 of 5 nouns, skipped 0"));
}

#[test]
fn semcor_input_matches_plain_input() {
    let run = |input: &str, format: &str| {
        stdout(&cdwsd([
            OsString::from("disambiguate"),
            "--taxonomy".into(),
            data("sample.tax").into(),
            "--input".into(),
            data(input).into(),
            "--format".into(),
            format.into(),
        ]))
    };
    let plain = run("sample_lemmas.txt", "plain");
    assert!(!plain.is_empty());
    assert_eq!(plain, run("sample_gold.sem", "semcor"));
}

#[test]
fn empty_input_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "empty.txt", "");
    let o = cdwsd([
        OsString::from("disambiguate"),
        "--taxonomy".into(),
        data("sample.tax").into(),
        "--input".into(),
        p.into(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_plain_lemmas_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "in.txt", "jury frobnicator operation\n");
    let o = cdwsd([
        OsString::from("disambiguate"),
        "--taxonomy".into(),
        data("sample.tax").into(),
        "--input".into(),
        p.into(),
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(!out.contains("frobnicator"));
    let positions: Vec<&str> = out.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(positions, ["0", "2"]);
    assert!(
        stderr(&o).contains("kept 2 of 3 nouns, skipped 1 unknown"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("tags.tsv");
    let o = cdwsd([
        OsString::from("disambiguate"),
        "--taxonomy".into(),
        data("sample.tax").into(),
        "--input".into(),
        data("sample_lemmas.txt").into(),
        "--output".into(),
        target.clone().into(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(target).unwrap().lines().count(), 5);
}

#[test]
fn evaluate_with_baselines() {
    let args = || {
        vec![
            OsString::from("evaluate"),
            "--taxonomy".into(),
            data("sample.tax").into(),
            "--gold".into(),
            data("sample_gold.sem").into(),
            "--window".into(),
            "5".into(),
            "--baselines".into(),
            "--train".into(),
            data("sample_gold.sem").into(),
            "--seed".into(),
            "3".into(),
        ]
    };
    let o = cdwsd(args());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let labels: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(
        labels,
        [
            "polysemous",
            "overall",
            "random-analytic:polysemous",
            "random-analytic:overall",
            "random-mc:polysemous",
            "random-mc:overall",
            "mfs:polysemous",
            "mfs:overall",
        ]
    );
    assert_eq!(out.lines().next().unwrap(), cdwsd::eval::CSV_HEADER);
    // trained on the gold itself, the most-frequent heuristic is perfect
    assert!(out.contains("mfs:overall,0,5,5,5,1.0000,1.0000,1.0000\n"), "{out}");
    assert_eq!(out, stdout(&cdwsd(args())));
}

#[test]
fn evaluate_uniform_two_sense_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(&dir, "t.tax", TWO_SENSES);
    let g = write(
        &dir,
        "g.sem",
        "<s>\n<wd>a</wd><sn>[noun.x.0]</sn><tag>NN</tag>\n<wd>b</wd><sn>[noun.x.1]</sn><tag>NN</tag>\n</s>\n",
    );
    let o = cdwsd([
        OsString::from("evaluate"),
        "--taxonomy".into(),
        t.into(),
        "--gold".into(),
        g.into(),
        "--baselines".into(),
        "--population".into(),
        "polysemous".into(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("random-analytic:polysemous,0,2,2,1,1.0000,0.5000,0.5000\n"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn evaluate_perfect_monosemous_document() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(&dir, "t.tax", TWO_SENSES);
    let g = write(&dir, "g.sem", "<s>\n<wd>m</wd><sn>[noun.x.0]</sn><tag>NN</tag>\n</s>\n");
    let o = cdwsd([
        OsString::from("evaluate"),
        "--taxonomy".into(),
        t.into(),
        "--gold".into(),
        g.into(),
        "--population".into(),
        "overall".into(),
    ]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).lines().nth(1).unwrap(),
        "overall,15,1,1,1,1.0000,1.0000,1.0000"
    );
}

#[test]
fn strict_gold_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(&dir, "t.tax", TWO_SENSES);
    let g = write(&dir, "g.sem", "<s>\n<wd>a</wd><sn>[noun.x.7]</sn><tag>NN</tag>\n</s>\n");
    let run = |strict: bool| {
        let mut args = vec![
            OsString::from("evaluate"),
            "--taxonomy".into(),
            t.clone().into(),
            "--gold".into(),
            g.clone().into(),
        ];
        if strict {
            args.push("--strict-gold".into());
        }
        cdwsd(args)
    };
    let lenient = run(false);
    assert!(lenient.status.success());
    assert!(stderr(&lenient).contains("excluded 1"));
    assert_eq!(run(true).status.code(), Some(2));
}

fn sweep(sizes: Option<&str>) -> Output {
    let mut args = vec![
        OsString::from("sweep"),
        "--taxonomy".into(),
        data("sample.tax").into(),
        "--gold".into(),
        data("sample_gold.sem").into(),
    ];
    if let Some(s) = sizes {
        args.extend(["--sizes".into(), s.into()]);
    }
    cdwsd(args)
}

fn sizes_by_population(out: &str) -> Vec<(String, usize)> {
    out.lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap().to_string(), f.next().unwrap().parse().unwrap())
        })
        .collect()
}

#[test]
fn sweep_default_sizes() {
    let o = sweep(None);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = sizes_by_population(&stdout(&o));
    let expected: Vec<(String, usize)> = ["polysemous", "overall"]
        .iter()
        .flat_map(|p| [5, 10, 15, 20, 25, 30].map(|s| (p.to_string(), s)))
        .collect();
    assert_eq!(rows, expected);
}

#[test]
fn sweep_single_and_messy_sizes() {
    let single = sizes_by_population(&stdout(&sweep(Some("7"))));
    assert_eq!(single, [("polysemous".into(), 7), ("overall".into(), 7)]);
    let messy = sizes_by_population(&stdout(&sweep(Some("10,5,10"))));
    assert_eq!(
        messy,
        [
            ("polysemous".into(), 5),
            ("polysemous".into(), 10),
            ("overall".into(), 5),
            ("overall".into(), 10)
        ]
    );
}

#[test]
fn exit_codes() {
    assert_eq!(cdwsd(["frobnicate"]).status.code(), Some(1));
    assert_eq!(cdwsd(["check"]).status.code(), Some(1));
    assert_eq!(cdwsd(["--help"]).status.code(), Some(0));
    assert_eq!(cdwsd(["check", "/nonexistent/taxonomy.tax"]).status.code(), Some(2));
    assert_eq!(sweep(Some("0")).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        &dir,
        "bad.sem",
        "<s>\n<wd>jury</wd><sn>noun.group.0</sn><tag>NN</tag>\n</s>\n",
    );
    let o = cdwsd([
        OsString::from("evaluate"),
        "--taxonomy".into(),
        data("sample.tax").into(),
        "--gold".into(),
        bad.into(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}
