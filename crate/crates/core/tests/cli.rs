use std::path::Path;
use std::process::{Command, Output};

fn kclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kclab")).args(args).output().expect("spawn kclab")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|v| v.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
        .to_string()
}

#[test]
fn empty_formula_sizes() {
    for (lang, nodes) in [("obdd", "1"), ("dfa", "6"), ("dnnf", "1")] {
        let out = stdout(&kclab(&["compile", "--lang", lang, "--n", "5", "--r", "0"]));
        assert_eq!(field(&out, "nodes"), nodes, "{lang}");
        assert_eq!(field(&out, "models"), "32");
    }
}

#[test]
fn count_matches_compilers() {
    for (seed, n, r) in [("1", "10", "1.8"), ("2", "14", "0.5"), ("3", "12", "4.0"), ("4", "8", "6.0")] {
        let base = ["--seed", seed, "--n", n, "--r", r];
        let brute = stdout(&kclab(&[&["count"][..], &base].concat())).trim().to_string();
        for lang in ["obdd", "dfa", "dnnf"] {
            let out = stdout(&kclab(&[&["compile", "--lang", lang][..], &base].concat()));
            assert_eq!(field(&out, "models"), brute, "{lang} seed {seed}");
        }
    }
}

#[test]
fn dimacs_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    let cnf = cnf.to_str().unwrap();
    stdout(&kclab(&["gen", "--n", "12", "--r", "2", "--seed", "9", "-o", cnf]));
    let from_file = stdout(&kclab(&["compile", "--input", cnf]));
    let generated = stdout(&kclab(&["compile", "--n", "12", "--r", "2", "--seed", "9"]));
    assert_eq!(from_file, generated);
}

#[test]
fn exit_codes() {
    assert_eq!(kclab(&["compile", "--bogus"]).status.code(), Some(1));
    assert_eq!(kclab(&["compile", "--lang", "sdd", "--n", "4"]).status.code(), Some(1));
    assert_eq!(kclab(&["compile"]).status.code(), Some(1));
    assert_eq!(kclab(&["sweep", "--instances", "0"]).status.code(), Some(1));
    assert_eq!(kclab(&["sweep", "--r-step", "0"]).status.code(), Some(1));
    assert_eq!(kclab(&["compile", "--input", "/nonexistent/x.cnf"]).status.code(), Some(2));
    assert_eq!(kclab(&["--node-cap", "3", "compile", "--n", "16", "--r", "1.8"]).status.code(), Some(2));
    assert_eq!(kclab(&["--help"]).status.code(), Some(0));
}

fn sweep_args(out: &Path) -> Vec<String> {
    ["sweep", "--n", "10,12,14,16", "--r-start", "0.4", "--r-stop", "2.4", "--r-step", "0.4", "--instances", "5"]
        .iter()
        .map(|s| s.to_string())
        .chain(["--lang".into(), "obdd,dnnf".into(), "-o".into(), out.to_str().unwrap().into()])
        .collect()
}

#[test]
fn sweep_fit_peak_plot() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args_a = sweep_args(&a);
    let args_b = sweep_args(&b);
    stdout(&kclab(&args_a.iter().map(String::as_str).collect::<Vec<_>>()));
    stdout(&kclab(&[&["--jobs", "2"][..], &args_b.iter().map(String::as_str).collect::<Vec<_>>()].concat()));
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("# schema: kclab-sweep/1\n"));
    assert_eq!(text.lines().count(), 2 + 4 * 6 * 2);

    let csv = a.to_str().unwrap();
    let fit = stdout(&kclab(&["fit", csv]));
    assert_eq!(fit.lines().count(), 1 + 6 * 2);
    assert!(fit.starts_with("k,language,r,semilog_slope"));
    let peak = stdout(&kclab(&["peak", csv]));
    assert_eq!(peak.lines().count(), 1 + 4 * 2);

    let script = stdout(&kclab(&["plot", csv, "--kind", "log-size-vs-n"]));
    assert!(script.contains("savefig(\"log-size-vs-n.png\""));
    assert_eq!(kclab(&["plot", csv, "--kind", "phase-fraction-vs-r"]).status.code(), Some(2));
}

#[test]
fn paths_writes_phase_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("phase.csv");
    let args = ["paths", "--n", "10", "--r-start", "0", "--r-stop", "4", "--r-step", "2", "--instances", "4", "--probes", "10", "--threshold", "5", "-o", p.to_str().unwrap()];
    stdout(&kclab(&args));
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("# schema: kclab-phase/1\n"));
    assert_eq!(text.lines().count(), 2 + 3);
    let script = stdout(&kclab(&["plot", p.to_str().unwrap(), "--kind", "phase-fraction-vs-r"]));
    assert!(script.contains("twinx()"));
}
