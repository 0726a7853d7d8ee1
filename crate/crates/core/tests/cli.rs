use eqfree::analysis::GrowthClass;
use eqfree::cli::{run, Report, EXIT_BUDGET, EXIT_INVALID, EXIT_OK};

fn call(args: &[&str]) -> (i32, String) {
    let mut argv = vec!["eqfree"];
    argv.extend_from_slice(args);
    run(argv)
}

fn json(args: &[&str]) -> Report {
    let mut v = args.to_vec();
    v.push("--json");
    let (code, out) = call(&v);
    assert_eq!(code, EXIT_OK, "{out}");
    let report: Report = serde_json::from_str(&out).unwrap();
    let again = serde_json::to_string(&report).unwrap();
    assert_eq!(serde_json::from_str::<Report>(&again).unwrap(), report);
    report
}

const EVEN: [&str; 6] = ["-n", "2", "-H", "ba,abbA", "-g", "a"];
const ODD: [&str; 6] = ["-n", "2", "-H", "b,ababa", "-g", "a"];

fn with<'a>(cmd: &'a str, inst: &[&'a str], rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(inst);
    v.extend_from_slice(rest);
    v
}

#[test]
fn analyze_text() {
    let (code, out) = call(&with("analyze", &EVEN, &[]));
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("dependent\n"), "{out}");
    assert!(out.contains("d_min: 4"), "{out}");
    assert!(out.contains("witness: "), "{out}");

    let (code, out) = call(&["analyze", "-n", "2", "-H", "a", "-g", "b"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "independent\n");
}

#[test]
fn analyze_json() {
    let Report::Analyze(r) = json(&with("analyze", &EVEN, &[])) else { panic!() };
    assert!(r.dependent);
    assert_eq!(r.d_min, Some(4));
    let w = r.d_min_witness.unwrap();
    assert_eq!(w.degree, Some(4));
    assert!(w.word.is_some() && w.plan.is_none());

    let Report::Analyze(r) = json(&with("analyze", &EVEN, &["--max-witness-len", "2"])) else { panic!() };
    let w = r.witness.unwrap();
    assert!(w.word.is_none() && w.plan.is_some());
}

#[test]
fn growth_and_degree() {
    let (code, out) = call(&with("growth", &ODD, &["--d", "4"]));
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "Exponential");
    let Report::Growth(g) = json(&with("growth", &EVEN, &["--d", "4"])) else { panic!() };
    assert_eq!(g.growth, GrowthClass::Finite { max_len: 7 });

    let Report::Degree(d) = json(&with("degree", &ODD, &["--d", "2"])) else { panic!() };
    assert!(d.nonempty);
    assert_eq!(d.witness.unwrap().degree, Some(2));
    let (_, out) = call(&with("degree", &EVEN, &["--d", "5"]));
    assert_eq!(out, "degree 5: empty\n");

    let Report::Dmin(m) = json(&with("dmin", &ODD, &[])) else { panic!() };
    assert_eq!(m.d_min, Some(2));
}

#[test]
fn partition_and_census() {
    let Report::Partition(p) = json(&with("partition", &EVEN, &["--bound", "8"])) else { panic!() };
    assert_eq!(p.per_degree.len(), 8);
    let (_, text) = call(&with("partition", &ODD, &["--bound", "5"]));
    assert!(text.contains("certified exponential: every even d >= 4"), "{text}");

    let Report::Census(c) = json(&with("census", &EVEN, &["--kind", "stratum", "--d", "4", "--max-len", "9"])) else {
        panic!()
    };
    assert_eq!(c.cumulative[9], "14");
    let Report::Census(o) =
        json(&with("census", &EVEN, &["--kind", "stratum", "--d", "4", "--max-len", "9", "--oracle"]))
    else {
        panic!()
    };
    assert_eq!(o.counts, c.counts);
    let (code, text) = call(&with("census", &ODD, &["--kind", "ideal", "--max-len", "4"]));
    assert_eq!(code, EXIT_OK);
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("0 1\n1 0\n2 6\n"), "{text}");
}

#[test]
fn hard() {
    let Report::Hard(h) = json(&["hard", "--n", "2", "--p", "2"]) else { panic!() };
    assert_eq!(h.rank, 3);
    assert_eq!(h.equation_degree, 7);
    assert!(h.dependent);
    assert_eq!(h.d_min, Some(7));
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["analyze", "-n", "2", "-H", "a,aa", "-g", "b"]).0, EXIT_INVALID);
    assert_eq!(call(&["analyze", "-n", "2", "-H", "c", "-g", "b"]).0, EXIT_INVALID);
    assert_eq!(call(&["analyze", "-n", "2", "-H", "a"]).0, EXIT_INVALID);
    assert_eq!(call(&["degree", "-n", "2", "-H", "a", "-g", "b", "--d", "x"]).0, EXIT_INVALID);
    assert_eq!(call(&["frobnicate"]).0, EXIT_INVALID);
    assert_eq!(call(&["census", "-n", "2", "-H", "a", "-g", "b", "--kind", "stratum", "--max-len", "3"]).0, EXIT_INVALID);
    let (code, out) = call(&with("census", &ODD, &["--kind", "ideal", "--max-len", "30", "--oracle", "--budget", "1000"]));
    assert_eq!(code, EXIT_BUDGET, "{out}");
    assert_eq!(call(&["--help"]).0, EXIT_OK);
    let (code, out) = call(&["analyze", "-n", "2", "-H", "a,aa", "-g", "b", "--json"]);
    assert_eq!(code, EXIT_INVALID);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["exit_code"], EXIT_INVALID);
}

#[test]
fn problem_file() {
    let dir = std::env::temp_dir().join(format!("eqfree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("odd.json");
    std::fs::write(&path, r#"{"n": 2, "basis": ["b", "ababa"], "element": "a", "variable": "y"}"#).unwrap();
    let (code, out) = call(&["analyze", "--problem", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("d_min: 2"));
    assert!(out.contains('y') && !out.contains('x'), "{out}");
    std::fs::write(&path, r#"{"n": 2, "basis": ["b"]}"#).unwrap();
    assert_eq!(call(&["analyze", "--problem", path.to_str().unwrap()]).0, EXIT_INVALID);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_eqfree");
    let out = std::process::Command::new(bin).args(["analyze", "-n", "2", "-H", "a", "-g", "b"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "independent\n");
    let out = std::process::Command::new(bin).args(["analyze", "-n", "2", "-H", "a,aa", "-g", "b"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
    assert!(!out.stderr.is_empty());
}
