//! End-to-end runs of the command-line binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regstruct")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn wick_four_matches_hermite() {
    let o = run(&["wick", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.matches("-6*c^2*x^2 + 3*c^4 + x^4").count(), 2, "{out}");
}

#[test]
fn cointeraction_suite_passes_on_kpz() {
    let o = run(&["check", "--rule", "kpz", "--suite", "cointeraction", "--max-edges", "5", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("status PASS\n"));
}

#[test]
fn wick_renormalised_cube() {
    let o = run(&["renorm", "--rule", "hermite", "--char", "wick", "--format", "text", "Xi*Xi*Xi"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "-3*c^2*Xi + Xi*Xi*Xi\n");
}

#[test]
fn renormalisation_paths_agree_on_kpz_basis() {
    let basis = stdout(&run(&["basis", "--rule", "kpz", "--max-degree", "3/2", "--max-edges", "4", "--poly-cap", "1"]));
    let trees: Vec<&str> = basis.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert!(trees.len() > 20);
    for t in trees {
        let a = run(&["renorm", "--rule", "kpz", "--char", "kpz", "--via", "character", t]);
        let b = run(&["renorm", "--rule", "kpz", "--char", "kpz", "--via", "recursive", t]);
        assert_eq!(a.status.code(), Some(0), "{t}");
        assert_eq!(stdout(&a), stdout(&b), "{t}");
    }
}

#[test]
fn extraction_of_noise_square() {
    let o = run(&["coproduct", "--map", "delta-minus-r", "--rule", "hermite", "Xi*Xi"]);
    let out = stdout(&o);
    assert!(out.starts_with("lincomb legs=2 terms=3\n"));
    let coefs: Vec<&str> = out.lines().filter_map(|l| l.strip_prefix("term ")).collect();
    assert_eq!(coefs, ["1", "2", "1"]);
}

#[test]
fn rule_and_character_files() {
    let dir = std::env::temp_dir().join(format!("regstruct-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let rule = dir.join("herm.rule");
    std::fs::write(&rule, "dim = 0\nscaling = 1\nnoise Xi degree -1/2\noption free_root\n").unwrap();
    let ch = dir.join("herm.char");
    std::fs::write(&ch, "\"Xi*Xi\" = -c2\n").unwrap();
    let o = run(&["renorm", "--rule", rule.to_str().unwrap(), "--char", ch.to_str().unwrap(), "--format", "text", "Xi*Xi"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "-c2*One + Xi*Xi\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(run(&["coproduct", "--map", "delta", "--rule", "kpz", "I(Xi"]).status.code(), Some(2));
    assert_eq!(run(&["coproduct", "--map", "delta", "--rule", "kpz", "J(Xi)"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--rule", "kpz", "--suite", "nope", "--max-edges", "2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn hat_coproduct_on_rooted_forest() {
    let o = run(&["coproduct", "--map", "delta-hat-1", "--rule", "kpz", "--cap", "0", "I(Xi)*C(Xi)"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("lincomb legs=2"));
}
