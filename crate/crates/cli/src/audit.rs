//! `corpus-verify`: a fixed table of checks over the bundled corpus, each
//! compared with the outcome recorded in a golden file.

use std::collections::{BTreeMap, HashMap};

use anyhow::{anyhow, Context, Result};
use poslog_core::amalgamation::{amalgamate_ei_in, embedding_amalgamation_probe};
use poslog_core::closedness::{find_certificates, is_e_elementary_bounded, is_pac_in, is_pc_in, pac_saturate};
use poslog_core::corpus::{self, Corpus};
use poslog_core::morphisms::parse_map;
use poslog_core::structures::ModelSet;
use poslog_core::syntax::parse_sentence;
use poslog_core::theories::{common_continuation, entails_in, models_within, Continuation};
use poslog_core::{AmalgamRequest, Outcome, SearchBudget};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::Report;

const BUNDLED: &str = include_str!("../golden/corpus.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub row: String,
    /// Model-size bound N the outcome was computed at.
    pub bound: usize,
    pub outcome: String,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct Golden {
    pub rows: Vec<Row>,
}

fn budget(n: usize) -> SearchBudget {
    SearchBudget::default().with_size(n)
}

fn verdict(o: Outcome) -> String {
    format!("{o:?}")
}

fn search(found: bool, truncated: bool) -> String {
    match (found, truncated) {
        (true, _) => "Found",
        (false, true) => "Unknown",
        (false, false) => "NotFound",
    }
    .to_string()
}

struct Table {
    corpus: Corpus,
    models: HashMap<(String, usize), ModelSet>,
    /// Replaces every row's own bound when set.
    bound: Option<usize>,
    rows: Vec<Row>,
}

impl Table {
    fn models(&mut self, theory: &str, n: usize) -> Result<&ModelSet> {
        let key = (theory.to_string(), n);
        if !self.models.contains_key(&key) {
            let ms = models_within(self.corpus.theory(theory), &budget(n))?;
            self.models.insert(key.clone(), ms);
        }
        Ok(&self.models[&key])
    }

    fn push(&mut self, row: String, bound: usize, outcome: String) {
        self.rows.push(Row { row, bound, outcome });
    }

    fn closedness(&mut self, theory: &str, subjects: &[poslog_core::FinStructure], golden: usize) -> Result<()> {
        let n = self.bound.unwrap_or(golden);
        let t = self.corpus.theory(theory).clone();
        self.models(theory, n)?;
        let models = &self.models[&(theory.to_string(), n)];
        let mut rows = Vec::new();
        for a in subjects {
            let pc = is_pc_in(a, &t, models, &budget(n))?;
            let pac = is_pac_in(a, &t, models, &budget(n))?;
            rows.push((format!("pc {theory} {}", a.name), verdict(pc.outcome())));
            rows.push((format!("pac {theory} {}", a.name), verdict(pac.outcome())));
        }
        for (row, outcome) in rows {
            self.push(row, n, outcome);
        }
        Ok(())
    }
}

/// Computes every row. With `bound` set, all rows run at that N.
pub fn compute(bound: Option<usize>) -> Result<Vec<Row>> {
    let corpus = corpus::load().map_err(|(f, e)| anyhow!("bundled {f}: {e}"))?;
    let mut t = Table { corpus, models: HashMap::new(), bound, rows: Vec::new() };
    let n_of = |golden: usize| bound.unwrap_or(golden);

    // Every small model of T_inj (size ≤ 4) and of T″ (size ≤ 5).
    for (theory, size, golden) in [("Tinj", 4, 6), ("Tnofix", 5, 9)] {
        let small = models_within(t.corpus.theory(theory), &budget(size))?.models;
        t.closedness(theory, &small, golden)?;
    }
    let named = |t: &Table, names: &[&str]| names.iter().map(|n| t.corpus.structure(n).clone()).collect::<Vec<_>>();
    let inj = named(&t, &["Ae", "C2", "Fix_C2", "Fix_C3", "C2_C2"]);
    t.closedness("Tinj", &inj, 6)?;
    let nofix = named(&t, &["C3", "C2_C3"]);
    t.closedness("Tnofix", &nofix, 8)?;

    for (theory, src, golden) in [
        ("Tinj", "forall x y. f(x) = f(y) -> x = y", 6),
        ("Tinj", "forall x. f(f(x)) = x -> f(x) = x", 6),
        ("Tnofix", "forall x. f(f(x)) = x -> f(x) = x", 6),
        ("Tprime", "not exists x. f(x) = x", 6),
    ] {
        let n = n_of(golden);
        let th = t.corpus.theory(theory).clone();
        let s = parse_sentence(src, &th.signature)?;
        let v = entails_in(t.models(theory, n)?, &s, &budget(n))?;
        t.push(format!("entails {theory} {src}"), n, verdict(v.outcome));
    }

    for (theory, a, b, golden) in [("Tinj", "C2", "Ae", 6), ("Tinj", "C2", "C3", 6), ("Tnofix", "C3", "C4", 7), ("Tprime", "C3", "C4", 6)] {
        let n = n_of(golden);
        let c = common_continuation(t.corpus.structure(a), t.corpus.structure(b), t.corpus.theory(theory), &budget(n))?;
        let truncated = c.verdict().flags.contains(&poslog_core::Flag::Truncated);
        t.push(format!("continue {theory} {a} {b}"), n, search(matches!(c, Continuation::Found(_)), truncated));
    }

    for (a, psi, at, golden) in [("Fix_C2", "fixed", "a", 6), ("C2", "has_fixed", "", 6), ("C2", "fixed", "c0", 6)] {
        let n = n_of(golden);
        let s = t.corpus.structure(a).clone();
        let phi = t.corpus.formula(psi).clone();
        let tuple: Vec<usize> = at.split(',').filter(|e| !e.is_empty()).map(|e| s.element_index(e).expect("corpus element")).collect();
        let th = t.corpus.theory("Tinj").clone();
        let models = t.models("Tinj", n)?;
        let found = find_certificates(&s, &th, &phi, &tuple, models, &budget(n), Some(1))?;
        let outcome = search(!found.is_empty(), models.truncated);
        let at = if at.is_empty() { String::new() } else { format!(" at {at}") };
        t.push(format!("certify Tinj {a} {psi}{at}"), n, outcome);
    }

    for (a, b, m, golden) in [("C2", "C2_C2", "c0=a,c1=b", 6), ("Ae", "Fix_C2", "e=e", 6), ("C2", "Fix_C2", "c0=a,c1=b", 6)] {
        let n = n_of(golden);
        let (sa, sb) = (t.corpus.structure(a), t.corpus.structure(b));
        let map = parse_map(m, sa, sb)?;
        let r = is_e_elementary_bounded(sa, sb, &map, &budget(n))?;
        t.push(format!("e-elem {a} {b} {m}"), n, verdict(r.outcome()));
    }

    for (base, top, e, left, i, golden) in [
        ("C2", "C2_C2", "c0=a,c1=b", "C2", "c0=c0,c1=c1", 6),
        ("Ae", "Fix_C2", "e=e", "Fix_C3", "e=e", 6),
        ("C2", "Fix_C2", "c0=a,c1=b", "C2_C2", "c0=c,c1=d", 6),
    ] {
        let n = n_of(golden);
        let c = &t.corpus;
        let (base_s, top_s, left_s) = (c.structure(base).clone(), c.structure(top).clone(), c.structure(left).clone());
        let req = AmalgamRequest {
            e: parse_map(e, &base_s, &top_s)?,
            i: parse_map(i, &base_s, &left_s)?,
            base: base_s,
            top: top_s,
            left: left_s,
            theory: c.theory("Tinj").clone(),
            budget: budget(n),
        };
        req.validate()?;
        let models = t.models("Tinj", n)?;
        let truncated = models.truncated;
        let found = amalgamate_ei_in(&req, models)?.result().is_some_and(|r| r.all_true());
        t.push(format!("amalgamate Tinj {base} {top} {e} {left} {i}"), n, search(found, truncated));
    }

    for (theory, a, golden) in [("Tinj", "C2", 6), ("Tinj", "Fix_C2", 6), ("Tnofix", "C3", 8)] {
        let n = n_of(golden);
        let s = pac_saturate(t.corpus.structure(a), t.corpus.theory(theory), &budget(n))?;
        t.push(format!("saturate {theory} {a}"), n, verdict(s.report.outcome()));
    }

    for (a, golden) in [("Ae", 6), ("C2", 6)] {
        let n = n_of(golden);
        let r = embedding_amalgamation_probe(t.corpus.structure(a), t.corpus.theory("Tinj"), 3, &budget(n))?;
        let outcome = match (r.failures.is_empty(), r.truncated) {
            (false, _) => "Fails",
            (true, true) => "Unknown",
            (true, false) => "Holds",
        };
        t.push(format!("embed-amalg-probe Tinj {a} sample 3"), n, outcome.to_string());
    }
    Ok(t.rows)
}

/// Checks whose outcome is monotone in N: a counterexample or a found model
/// at a smaller bound is also there at every larger one.
fn contradicts(golden: &Row, got: &Row) -> bool {
    let monotone = ["pc ", "pac ", "entails ", "e-elem ", "continue ", "amalgamate "];
    if !monotone.iter().any(|p| golden.row.starts_with(p)) {
        return false;
    }
    let (small, large) = if got.bound < golden.bound { (got, golden) } else { (golden, got) };
    matches!((small.outcome.as_str(), large.outcome.as_str()), ("Fails", "Holds") | ("Found", "NotFound"))
}

fn load_golden(path: Option<&str>) -> Result<Golden> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("cannot read golden file `{p}`"))?,
        None => BUNDLED.to_string(),
    };
    serde_json::from_str(&text).with_context(|| format!("golden file `{}` is not a row table", path.unwrap_or("<bundled>")))
}

pub fn run(bound: Option<usize>, golden: Option<&str>, record: Option<&str>) -> Result<Report> {
    let rows = compute(bound)?;
    if let Some(path) = record {
        let text = serde_json::to_string_pretty(&Golden { rows: rows.clone() })? + "\n";
        std::fs::write(path, text).with_context(|| format!("cannot write `{path}`"))?;
        let human = format!("recorded {} rows to {path}", rows.len());
        return Ok(Report { code: 0, human, json: json!({ "recorded": path, "rows": rows }) });
    }
    let golden = load_golden(golden)?;
    let expected: BTreeMap<&str, &Row> = golden.rows.iter().map(|r| (r.row.as_str(), r)).collect();
    let width = rows.iter().map(|r| r.row.len()).max().unwrap_or(3).max(3);
    let mut human = format!("{:width$}  {:>3}  {:<8}  {:<8}  status\n", "row", "N", "golden", "got");
    let (mut ok, mut mismatched, mut flagged) = (0, 0, 0);
    let mut out = Vec::new();
    for r in &rows {
        let (want, status) = match expected.get(r.row.as_str()) {
            None => ("-".to_string(), "MISMATCH (not in golden)".to_string()),
            Some(g) if g.bound != r.bound && contradicts(g, r) => {
                (g.outcome.clone(), format!("MISMATCH (golden N={} is contradicted at N={})", g.bound, r.bound))
            }
            Some(g) if g.bound != r.bound => {
                let flip = if g.outcome == r.outcome { "" } else { ", flipped" };
                (g.outcome.clone(), format!("bound changed (golden N={}){flip}", g.bound))
            }
            Some(g) if g.outcome == r.outcome => (g.outcome.clone(), "ok".to_string()),
            Some(g) => (g.outcome.clone(), "MISMATCH".to_string()),
        };
        match status.as_str() {
            "ok" => ok += 1,
            s if s.starts_with("MISMATCH") => mismatched += 1,
            _ => flagged += 1,
        }
        human.push_str(&format!("{:width$}  {:>3}  {:<8}  {:<8}  {status}\n", r.row, r.bound, want, r.outcome));
        out.push(json!({ "row": r.row, "bound": r.bound, "golden": want, "got": r.outcome, "status": status }));
    }
    for g in golden.rows.iter().filter(|g| !rows.iter().any(|r| r.row == g.row)) {
        mismatched += 1;
        human.push_str(&format!("{:width$}  {:>3}  {:<8}  {:<8}  MISMATCH (row no longer computed)\n", g.row, g.bound, g.outcome, "-"));
        out.push(
            json!({ "row": g.row, "bound": g.bound, "golden": g.outcome, "got": null, "status": "MISMATCH (row no longer computed)" }),
        );
    }
    human.push_str(&format!("{} rows: {ok} ok, {mismatched} mismatched, {flagged} at a changed bound", out.len()));
    let code = u8::from(mismatched > 0);
    Ok(Report { code, human, json: json!({ "rows": out, "ok": ok, "mismatched": mismatched, "flagged": flagged }) })
}
