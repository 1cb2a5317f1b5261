use std::process::{Command, Output};

use poslog_core::corpus;
use poslog_core::theories::models_within;
use poslog_core::{FinStructure, SearchBudget};
use serde_json::Value;

fn poslog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poslog")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = poslog(&all);
    let v: Value = serde_json::from_slice(&o.stdout).expect("JSON report");
    (o.status.code().unwrap(), v)
}

#[test]
fn pac_holds_for_fixed_point_and_two_cycle() {
    let o = poslog(&["pac", "examples/inj_fix2cycle.struct", "--theory", "examples/t_inj.thy", "--bound", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Holds (no counterexample up to size N=6)"));
}

#[test]
fn pc_two_cycle_fails_with_collapse() {
    let o = poslog(&["pc", "examples/two_cycle.struct", "--theory", "examples/t_inj.thy", "--bound", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Fails"));
    let (code, v) = json(&["pc", "examples/two_cycle.struct", "--theory", "examples/t_inj.thy", "--bound", "6"]);
    assert_eq!(code, 1);
    let w = &v["result"]["verdict"]["witness"];
    let images: Vec<&str> = w["map"].as_array().unwrap().iter().map(|p| p[1].as_str().unwrap()).collect();
    assert_eq!(images.len(), 2);
    assert_eq!(images[0], images[1], "the witness identifies the two cycle points");
}

#[test]
fn examples_list_names_the_corpus() {
    let o = poslog(&["examples", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for needle in ["theory Tinj", "theory Tprime", "theory Tnofix", "structure Ae", "structure C2_C3", "structure Fix_C2"] {
        assert!(out.contains(needle), "missing {needle}");
    }
    for k in 2..=7 {
        assert!(out.contains(&format!("structure C{k} ")), "missing the {k}-cycle");
    }
}

#[test]
fn input_errors_exit_3() {
    let cases: &[&[&str]] = &[
        &["pac", "examples/no_such.struct", "--theory", "examples/t_inj.thy"],
        &["eval", "examples/two_cycle.struct", "--formula", "g(x) = x"],
        &["eval", "examples/two_cycle.struct", "--formula", "f(x) = x", "--at", "x=zz"],
        &["pac", "examples/digraph.struct", "--theory", "examples/t_inj.thy"],
        &["pac", "examples/tail.struct", "--theory", "examples/t_inj.thy"],
        &["no-such-command"],
    ];
    for args in cases {
        let o = poslog(args);
        assert_eq!(o.status.code(), Some(3), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let dir = std::env::temp_dir().join(format!("poslog-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.struct");
    std::fs::write(&bad, "signature S { func f/1; }\nstructure B over S { universe {a}; f: a -> b; }\n").unwrap();
    let o = poslog(&["parse", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.struct"));
}

#[test]
fn json_reports_are_deterministic() {
    let commands: &[&[&str]] = &[
        &["pc", "examples/three_cycle.struct", "--theory", "examples/t_nofix.thy", "--bound", "7"],
        &["continue", "examples/three_cycle.struct", "examples/four_cycle.struct", "--theory", "examples/t_nofix.thy", "--bound", "7"],
        &["certify", "examples/inj_fix2cycle.struct", "--theory", "examples/t_inj.thy", "--formula", "fixed", "--at", "x=a"],
        &["saturate", "examples/two_cycle.struct", "--theory", "examples/t_inj.thy"],
        &["morphisms", "find", "examples/two_cycle.struct", "examples/two_two_cycle.struct", "--kind", "embedding"],
        &["models", "examples/t_nofix.thy", "--bound", "5"],
    ];
    for args in commands {
        let (c1, mut a) = json(args);
        let (c2, mut b) = json(args);
        assert_eq!(c1, c2);
        a["wall_time_ms"] = Value::Null;
        b["wall_time_ms"] = Value::Null;
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap(), "{args:?}");
        assert_eq!(a["exit_code"], c1);
    }
}

#[test]
fn every_holds_line_names_its_bound() {
    let commands: &[&[&str]] = &[
        &["pac", "examples/a_e.struct", "--theory", "examples/t_inj.thy"],
        &["pc", "examples/two_three_cycle.struct", "--theory", "examples/t_nofix.thy", "--bound", "8"],
        &["entails", "examples/t_inj.thy", "--sentence", "forall x y. f(x) = f(y) -> x = y"],
        &["e-elem", "examples/two_cycle.struct", "examples/two_two_cycle.struct", "--map", "c0=a,c1=b"],
        &["saturate", "examples/two_cycle.struct", "--theory", "examples/t_inj.thy"],
        &["certify", "examples/inj_fix2cycle.struct", "--theory", "examples/t_inj.thy", "--formula", "fixed", "--at", "x=a"],
    ];
    for args in commands {
        let out = stdout(&poslog(args));
        let holds: Vec<&str> = out.lines().filter(|l| l.contains("Holds")).collect();
        assert!(!holds.is_empty(), "{args:?} printed no Holds line:\n{out}");
        for l in holds {
            assert!(l.contains("up to size N="), "{args:?}: {l}");
        }
    }
}

#[test]
fn corpus_verify_passes_on_the_bundled_golden() {
    let o = poslog(&["corpus-verify"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.contains(" 0 mismatched"));
}

#[test]
fn corpus_verify_names_a_tampered_row() {
    let golden = include_str!("../golden/corpus.json");
    let row = "\"row\": \"pac Tinj Fix_C2\",\n      \"bound\": 6,\n      \"outcome\": \"Holds\"";
    assert!(golden.contains(row), "fixture row present");
    let tampered = golden.replace(row, &row.replace("Holds", "Fails"));
    let path = std::env::temp_dir().join(format!("poslog-golden-{}.json", std::process::id()));
    std::fs::write(&path, tampered).unwrap();
    let o = poslog(&["corpus-verify", "--golden", path.to_str().unwrap()]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(1));
    let bad: Vec<&str> = out.lines().filter(|l| l.contains("MISMATCH")).collect();
    assert_eq!(bad.len(), 1, "{out}");
    assert!(bad[0].starts_with("pac Tinj Fix_C2 "));
}

#[test]
fn corpus_verify_flags_a_lowered_bound() {
    let o = poslog(&["corpus-verify", "--bound", "4"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    // C3 ⊔ C4 needs 7 elements; below that the continuation is out of reach.
    let row = out.lines().find(|l| l.starts_with("continue Tnofix C3 C4 ")).unwrap();
    assert!(row.contains("NotFound") && row.contains("bound changed (golden N=7), flipped"), "{row}");
    for l in out.lines().filter(|l| l.starts_with("pc ") || l.starts_with("pac ")) {
        assert!(l.contains("bound changed"), "{l}");
        assert!(!(l.contains("Holds     Fails")), "a Holds turned into Fails at a lower bound: {l}");
    }
}

fn cycle_type(s: &FinStructure) -> Option<Vec<usize>> {
    let f = s.function_table(0);
    let mut seen = vec![false; f.len()];
    let mut image = vec![false; f.len()];
    for &y in f {
        if image[y] {
            return None;
        }
        image[y] = true;
    }
    let mut lengths = Vec::new();
    for start in 0..f.len() {
        if seen[start] {
            continue;
        }
        let (mut x, mut len) = (start, 0);
        while !seen[x] {
            seen[x] = true;
            x = f[x];
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort();
    Some(lengths)
}

/// The bundled golden closedness rows agree with direct reasoning on cycle
/// types: under T_inj a permutation is pac iff it has a fixed point and pc
/// iff it is the single fixed point; under T″ at N=9 the only small model
/// that passes is the 2-cycle beside a 3-cycle.
#[test]
fn golden_closedness_rows_match_cycle_types() {
    let golden: Value = serde_json::from_str(include_str!("../golden/corpus.json")).unwrap();
    let rows: Vec<(String, String)> = golden["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["row"].as_str().unwrap().to_string(), r["outcome"].as_str().unwrap().to_string()))
        .collect();
    let c = corpus::load().unwrap();
    let mut checked = 0;
    for (theory, size) in [("Tinj", 4), ("Tnofix", 5)] {
        let models = models_within(c.theory(theory), &SearchBudget::default().with_size(size)).unwrap();
        for m in &models.models {
            let ct = cycle_type(m);
            let (pc, pac) = match theory {
                "Tinj" => {
                    let ct = ct.unwrap();
                    (ct == [1], ct.contains(&1))
                }
                _ => {
                    let ok = ct.as_deref() == Some(&[2, 3]);
                    (ok, ok)
                }
            };
            for (mode, expected) in [("pc", pc), ("pac", pac)] {
                let name = format!("{mode} {theory} {}", m.name);
                let got = &rows.iter().find(|(r, _)| *r == name).unwrap_or_else(|| panic!("no row {name}")).1;
                assert_eq!(got, if expected { "Holds" } else { "Fails" }, "{name}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 2 * (1 + 2 + 3 + 5) + 2 * (1 + 2 + 6 + 13));
}
