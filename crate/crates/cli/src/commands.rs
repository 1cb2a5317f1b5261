use anyhow::{anyhow, bail, Result};
use poslog_core::amalgamation::{amalgamate_ei, embedding_amalgamation_probe, Amalgam};
use poslog_core::closedness::{
    alc_probe_sources, build_th_axioms, find_certificate, is_e_elementary_bounded, is_pac_bounded, is_pc_bounded, pac_saturate,
    verify_certificate, CertificateSearch, ThBinding,
};
use poslog_core::corpus;
use poslog_core::morphisms::{check_kind, find_morphisms, is_hom, is_immersion, separating_formula};
use poslog_core::structures::{eval_positive, violation, StructureJson};
use poslog_core::theories::{common_continuation, ctr_probe, entails_bounded, models_within, Continuation};
use poslog_core::{
    AmalgamRequest, Assignment, BoundedVerdict, CheckReport, FinStructure, Kind, Morphism, Outcome, PacCertificate, SearchBudget, Witness,
};
use serde_json::{json, Value};

use crate::workspace::{bindings, map, sentence, Workspace};
use crate::{audit, Cli, Command, MorphismsOp};

/// What a command produced: the exit code, the text shown by default and
/// the `result` field of the JSON report.
pub struct Report {
    pub code: u8,
    pub human: String,
    pub json: Value,
}

impl Report {
    fn new(code: u8, human: impl Into<String>, json: Value) -> Self {
        Report { code, human: human.into(), json }
    }
}

pub fn outcome_code(o: Outcome) -> u8 {
    match o {
        Outcome::Holds => 0,
        Outcome::Fails => 1,
        Outcome::Unknown => 2,
    }
}

/// 0 when found, 2 when not found but the search was cut short, else 1.
fn found_code(found: bool, truncated: bool) -> u8 {
    match (found, truncated) {
        (true, _) => 0,
        (false, true) => 2,
        (false, false) => 1,
    }
}

fn named(a: &FinStructure, vars: &[String], tuple: &[usize]) -> String {
    vars.iter().zip(tuple).map(|(v, &e)| format!("{v}={}", a.element_name(e))).collect::<Vec<_>>().join(",")
}

fn check_report(r: CheckReport) -> Report {
    Report::new(outcome_code(r.outcome()), r.summary(), r.to_json())
}

fn verdict_lines(v: &BoundedVerdict) -> String {
    let mut s = v.summary();
    match &v.witness {
        Some(Witness::Countermodel { model, assignment }) => {
            let at: Vec<String> = assignment.iter().map(|(x, e)| format!("{x}={}", model.element_name(*e))).collect();
            s.push_str(&format!("\n  countermodel {} at ({}):\n{}", model.name, at.join(", "), indent(&model.to_string())));
        }
        Some(Witness::Continuation { model, .. }) => s.push_str(&format!("\n{}", indent(&model.to_string()))),
        _ => {}
    }
    s
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n")
}

pub fn run(cli: &Cli) -> Result<Report> {
    let budget = cli.budget.budget();
    let mut ws = Workspace::new();
    match &cli.command {
        Command::Parse { files } => parse(&mut ws, files),
        Command::Eval { structure, formula, sentence: sent, at } => {
            let a = ws.structure(structure)?;
            let sig = a.signature().clone();
            if let Some(src) = sent {
                let s = sentence(src, &sig)?;
                return Ok(match violation(&a, &s)? {
                    None => Report::new(0, format!("{} satisfies {s}", a.name), json!({ "sentence": s.to_string(), "holds": true })),
                    Some(sigma) => {
                        let at: Vec<String> = sigma.named(&a).into_iter().map(|(v, e)| format!("{v}={e}")).collect();
                        Report::new(
                            1,
                            format!("{} violates {s} at ({})", a.name, at.join(", ")),
                            json!({ "sentence": s.to_string(), "holds": false, "violation": sigma.named(&a) }),
                        )
                    }
                });
            }
            let phi = ws.formula(formula.as_deref().expect("clap requires one of the two"), &sig)?;
            let vars: Vec<String> = phi.free_vars().into_iter().collect();
            let tuple = bindings(at.as_deref(), &vars, &a)?;
            let holds = eval_positive(&a, &phi, &Assignment::zip(&vars, &tuple))?;
            let where_ = if vars.is_empty() { String::new() } else { format!(" at {}", named(&a, &vars, &tuple)) };
            let verb = if holds { "satisfies" } else { "does not satisfy" };
            Ok(Report::new(
                u8::from(!holds),
                format!("{} {verb} {phi}{where_}", a.name),
                json!({ "formula": phi.to_string(), "at": named(&a, &vars, &tuple), "holds": holds }),
            ))
        }
        Command::Models { theory } => {
            let t = ws.theory(theory)?;
            let ms = models_within(&t, &budget)?;
            let shown = cli.limit.unwrap_or(ms.models.len());
            let mut human = format!("{} models of {} up to size N={}", ms.models.len(), t.name, budget.max_model_size);
            if ms.truncated {
                human.push_str(" [budget exhausted: list incomplete]");
            }
            for m in ms.models.iter().take(shown) {
                human.push('\n');
                human.push_str(&m.to_string());
            }
            let json = json!({
                "theory": t.name,
                "count": ms.models.len(),
                "truncated": ms.truncated,
                "bound": budget.to_json(),
                "models": ms.models.iter().take(shown).map(StructureJson::from).collect::<Vec<_>>(),
            });
            Ok(Report::new(if ms.truncated { 2 } else { 0 }, human, json))
        }
        Command::Entails { theory, sentence: src } => {
            let t = ws.theory(theory)?;
            let s = sentence(src, &t.signature)?;
            let v = entails_bounded(&t, &s, &budget)?;
            let human = format!("{} |- {s}: {}", t.name, verdict_lines(&v));
            Ok(Report::new(outcome_code(v.outcome), human, json!({ "sentence": s.to_string(), "verdict": v.to_json(None) })))
        }
        Command::Ctr { theory, formula } => {
            let t = ws.theory(theory)?;
            let phi = ws.formula(formula, &t.signature)?;
            let p = ctr_probe(&t, &phi, &budget)?;
            let mut human = format!(
                "{} of {} candidates are jointly inconsistent with {phi} under {} up to size N={}",
                p.members.len(),
                p.candidates,
                t.name,
                budget.max_model_size
            );
            if p.truncated {
                human.push_str(" [budget exhausted]");
            }
            for (psi, _) in p.members.iter().take(cli.limit.unwrap_or(usize::MAX)) {
                human.push_str(&format!("\n  {psi}"));
            }
            let json = json!({
                "phi": phi.to_string(),
                "vars": p.vars,
                "candidates": p.candidates,
                "truncated": p.truncated,
                "members": p.members.iter().map(|(psi, v)| json!({ "psi": psi.to_string(), "verdict": v.to_json(None) })).collect::<Vec<_>>(),
            });
            Ok(Report::new(if p.truncated { 2 } else { 0 }, human, json))
        }
        Command::Continue { a, b, theory } => {
            let t = ws.theory(theory)?;
            let (a, b) = (ws.structure(a)?, ws.structure(b)?);
            let c = common_continuation(&a, &b, &t, &budget)?;
            let v = c.verdict();
            let truncated = v.flags.contains(&poslog_core::Flag::Truncated);
            let (code, head) = match &c {
                Continuation::Found(_) => (0, "Found".to_string()),
                Continuation::NotFoundWithinBudget(_) => {
                    (found_code(false, truncated), format!("NotFound (no common continuation up to size N={})", budget.max_model_size))
                }
            };
            let mut human = format!("continuation of {} and {} under {}: {head}", a.name, b.name, t.name);
            if let Some(Witness::Continuation { model, left, right }) = &v.witness {
                let l = Morphism { map: left.clone(), kind: Kind::Hom };
                let r = Morphism { map: right.clone(), kind: Kind::Hom };
                human.push_str(&format!(
                    "\n  D = {} (size {})\n  {} -> D: {}\n  {} -> D: {}\n{}",
                    model.name,
                    model.size(),
                    a.name,
                    l.literal(&a, model),
                    b.name,
                    r.literal(&b, model),
                    indent(&model.to_string())
                ));
            }
            let result = if matches!(c, Continuation::Found(_)) { "found" } else { "not_found" };
            Ok(Report::new(code, human, json!({ "result": result, "verdict": v.to_json(Some(&a)) })))
        }
        Command::Morphisms { op } => morphisms(&mut ws, op, cli.limit, &budget),
        Command::Pc { structure, theory } => {
            let (a, t) = (ws.structure(structure)?, ws.theory(theory)?);
            Ok(check_report(is_pc_bounded(&a, &t, &budget)?))
        }
        Command::Pac { structure, theory } => {
            let (a, t) = (ws.structure(structure)?, ws.theory(theory)?);
            Ok(check_report(is_pac_bounded(&a, &t, &budget)?))
        }
        Command::Certify { structure, theory, formula, at } => {
            let (a, t) = (ws.structure(structure)?, ws.theory(theory)?);
            let psi = ws.formula(formula, &t.signature)?;
            let vars: Vec<String> = psi.free_vars().into_iter().collect();
            let tuple = bindings(at.as_deref(), &vars, &a)?;
            Ok(match find_certificate(&a, &t, &psi, &tuple, &budget)? {
                CertificateSearch::Found(c) => Report::new(0, format!("Found\n{}", certificate_lines(&c, &a)), c.to_json(&a)),
                CertificateSearch::NotFoundWithinBudget { truncated } => Report::new(
                    found_code(false, truncated),
                    format!(
                        "NotFound (no certificate with at most {} atoms and {} parameters, entailment up to size N={}){}",
                        budget.max_formula_atoms,
                        budget.max_params,
                        budget.max_model_size,
                        if truncated { " [budget exhausted]" } else { "" }
                    ),
                    json!({ "result": "not_found", "truncated": truncated, "bound": budget.to_json() }),
                ),
            })
        }
        Command::VerifyCert { structure, theory, formula, at, with, theta1, theta2 } => {
            let (a, t) = (ws.structure(structure)?, ws.theory(theory)?);
            let psi = ws.formula(formula, &t.signature)?;
            let x_vars: Vec<String> = psi.free_vars().into_iter().collect();
            let a_tuple = bindings(at.as_deref(), &x_vars, &a)?;
            let mut y_vars = Vec::new();
            for part in with.as_deref().unwrap_or("").split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (v, _) = part.split_once('=').ok_or_else(|| anyhow!("`{part}` is not of the form var=element"))?;
                y_vars.push(v.trim().to_string());
            }
            let b_tuple = bindings(with.as_deref(), &y_vars, &a)?;
            let c = PacCertificate {
                theta1: ws.formula(theta1, &t.signature)?,
                theta2: ws.formula(theta2, &t.signature)?,
                psi,
                x_vars,
                a_tuple,
                y_vars,
                b_tuple,
                entailment: BoundedVerdict::holds(budget),
            };
            let check = verify_certificate(&c, &a, &t, &budget);
            let mut human = if check.accepted { "accepted".to_string() } else { "rejected".to_string() };
            for r in &check.reasons {
                human.push_str(&format!("\n  {r}"));
            }
            if let Some(v) = check.entailment.as_ref().filter(|v| v.outcome != Outcome::Fails) {
                human.push_str(&format!("\n  entailment: {}", v.summary()));
            }
            let json = json!({
                "accepted": check.accepted,
                "reasons": check.reasons,
                "entailment": check.entailment.as_ref().map(|v| v.to_json(None)),
            });
            Ok(Report::new(u8::from(!check.accepted), human, json))
        }
        Command::Alc { theory, formula, sources } => {
            let t = ws.theory(theory)?;
            let psi = ws.formula(formula, &t.signature)?;
            let p = alc_probe_sources(&t, &psi, sources.unwrap_or(budget.max_model_size), &budget)?;
            let mut human = format!(
                "{} pairs in Alc({psi}) from {} bounded-pac sources ({} refuted instances), entailment up to size N={}",
                p.pairs.len(),
                p.pac_models.len(),
                p.failures,
                budget.max_model_size
            );
            if p.truncated {
                human.push_str(" [budget exhausted]");
            }
            for pair in p.pairs.iter().take(cli.limit.unwrap_or(usize::MAX)) {
                human.push_str(&format!(
                    "\n  ({}, {}) on {} at ({}) with ({})",
                    pair.theta1,
                    pair.theta2,
                    pair.source.name,
                    named(&pair.source, &pair.x_vars, &pair.a_tuple),
                    named(&pair.source, &pair.y_vars, &pair.b_tuple)
                ));
            }
            Ok(Report::new(if p.truncated { 2 } else { 0 }, human, p.to_json()))
        }
        Command::BuildTh { theory, formulas, sources } => {
            let t = ws.theory(theory)?;
            let mut bound = Vec::new();
            for src in formulas {
                let psi = ws.formula(src, &t.signature)?;
                let p = alc_probe_sources(&t, &psi, sources.unwrap_or(budget.max_model_size), &budget)?;
                match ThBinding::from_probe(&p, &budget) {
                    Some(b) => bound.push(b),
                    None => {
                        return Ok(Report::new(
                            found_code(false, p.truncated),
                            format!("NotFound: no equivalent pair for {psi} up to size N={}", budget.max_model_size),
                            json!({ "result": "not_found", "psi": psi.to_string() }),
                        ))
                    }
                }
            }
            let th = build_th_axioms(&t, &bound)?;
            let kinds: Vec<Value> = bound
                .iter()
                .map(|b| match b {
                    ThBinding::Pair(p) => json!({ "psi": p.psi.to_string(), "pair": p.to_json() }),
                    ThBinding::Vacuous { psi, verdict } => json!({ "psi": psi.to_string(), "vacuous": verdict.to_json(None) }),
                })
                .collect();
            Ok(Report::new(0, th.to_string(), json!({ "theory": th.to_string(), "bindings": kinds })))
        }
        Command::Saturate { structure, theory } => {
            let (a, t) = (ws.structure(structure)?, ws.theory(theory)?);
            let s = pac_saturate(&a, &t, &budget)?;
            let mut human = String::new();
            for step in &s.steps {
                human.push_str(&format!("{} -> {} (size {})", step.from.name, step.to.name, step.to.size()));
                if let Some(g) = &step.gained {
                    human.push_str(&format!(": gained {}", g.describe(&step.from)));
                }
                human.push('\n');
            }
            human.push_str(&s.report.summary());
            human.push_str(&format!("\n{}", indent(&s.result.to_string())));
            Ok(Report::new(outcome_code(s.report.outcome()), human, s.to_json()))
        }
        Command::EElem { a, b, map: lit } => {
            let (a, b) = (ws.structure(a)?, ws.structure(b)?);
            let m = map(lit, &a, &b)?;
            Ok(check_report(is_e_elementary_bounded(&a, &b, &m, &budget)?))
        }
        Command::Amalgamate { base, top, map_e, left, map_i, theory } => {
            let (base, top, left, theory) = (ws.structure(base)?, ws.structure(top)?, ws.structure(left)?, ws.theory(theory)?);
            let e = map(map_e, &base, &top)?;
            let i = map(map_i, &base, &left)?;
            let req = AmalgamRequest { base, top, e, left, i, theory, budget };
            Ok(match amalgamate_ei(&req)? {
                Amalgam::Found(r) => {
                    let human = format!(
                        "Found D = {} (size {})\n  e': {}\n  i': {}\n  e' embedding: {}, i' immersion: {}, commutes: {}\n{}",
                        r.d.name,
                        r.d.size(),
                        Morphism { map: r.e_prime.clone(), kind: Kind::Embedding }.literal(&req.left, &r.d),
                        Morphism { map: r.i_prime.clone(), kind: Kind::Immersion }.literal(&req.top, &r.d),
                        r.e_prime_embedding,
                        r.i_prime_immersion,
                        r.commutes,
                        indent(&r.d.to_string())
                    );
                    let mut json = r.to_json(&req);
                    json["result"] = json!("found");
                    Report::new(u8::from(!r.all_true()), human, json)
                }
                Amalgam::NotFoundWithinBudget { truncated } => Report::new(
                    found_code(false, truncated),
                    format!("NotFound (no amalgam up to size N={})", budget.max_model_size),
                    json!({ "result": "not_found", "truncated": truncated, "bound": budget.to_json() }),
                ),
            })
        }
        Command::EmbedAmalgProbe { structure, theory, sample } => {
            let (a, t) = (ws.structure(structure)?, ws.theory(theory)?);
            let r = embedding_amalgamation_probe(&a, &t, *sample, &budget)?;
            let code = if !r.failures.is_empty() {
                1
            } else if r.truncated {
                2
            } else {
                0
            };
            let mut human = format!(
                "{} pairs of embeddings out of {} (extensions of size <= {sample}), {} without an amalgam up to size N={}",
                r.pairs_checked,
                a.name,
                r.failures.len(),
                budget.max_model_size
            );
            for f in r.failures.iter().take(cli.limit.unwrap_or(usize::MAX)) {
                human.push_str(&format!("\n  {} / {}", f.b1.name, f.b2.name));
            }
            Ok(Report::new(code, human, r.to_json(&a)))
        }
        Command::Examples { list, name } => examples(*list, name.as_deref()),
        Command::CorpusVerify { golden, record } => audit::run(cli.budget.bound, golden.as_deref(), record.as_deref()),
    }
}

fn certificate_lines(c: &PacCertificate, a: &FinStructure) -> String {
    format!(
        "  psi: {}\n  a: ({})\n  b: ({})\n  theta1: {}\n  theta2: {}\n  entailment: {}",
        c.psi,
        named(a, &c.x_vars, &c.a_tuple),
        named(a, &c.y_vars, &c.b_tuple),
        c.theta1,
        c.theta2,
        c.entailment.summary()
    )
}

fn parse(ws: &mut Workspace, files: &[String]) -> Result<Report> {
    if files.is_empty() {
        bail!("no files given");
    }
    let mut human = String::new();
    let mut items = Vec::new();
    for f in files {
        let doc = ws.load(f)?;
        for s in &doc.signatures {
            human.push_str(&format!("{s}\n"));
            items.push(json!({ "kind": "signature", "name": s.name, "text": s.to_string() }));
        }
        for t in &doc.theories {
            human.push_str(&format!("{t}\n"));
            items.push(json!({ "kind": "theory", "name": t.name, "text": t.to_string() }));
        }
        for s in &doc.structures {
            human.push_str(&format!("{s}\n"));
            items.push(json!({ "kind": "structure", "name": s.name, "text": s.to_string() }));
        }
        for (name, sig, phi) in &doc.formulas {
            human.push_str(&format!("formula {name} over {}: {phi};\n", sig.name));
            items.push(json!({ "kind": "formula", "name": name, "text": phi.to_string() }));
        }
    }
    Ok(Report::new(0, human, json!({ "items": items })))
}

fn morphisms(ws: &mut Workspace, op: &MorphismsOp, limit: Option<usize>, budget: &SearchBudget) -> Result<Report> {
    match op {
        MorphismsOp::Find { a, b, kind } => {
            let (a, b) = (ws.structure(a)?, ws.structure(b)?);
            let kind: Kind = kind.parse()?;
            let found = find_morphisms(&a, &b, kind, limit, &[], budget.max_nodes)?;
            let mut human = format!("{} {kind}(s) {} -> {}", found.morphisms.len(), a.name, b.name);
            if found.truncated {
                human.push_str(" [budget exhausted]");
            }
            for m in &found.morphisms {
                human.push_str(&format!("\n  {}", m.literal(&a, &b)));
            }
            let json = json!({
                "truncated": found.truncated,
                "morphisms": found.morphisms.iter().map(|m| m.record(&a, &b)).collect::<Vec<_>>(),
            });
            Ok(Report::new(found_code(!found.morphisms.is_empty(), found.truncated), human, json))
        }
        MorphismsOp::Check { a, b, map: lit, kind } => {
            let (a, b) = (ws.structure(a)?, ws.structure(b)?);
            let kind: Kind = kind.parse()?;
            let m = map(lit, &a, &b)?;
            let ok = check_kind(&a, &b, &m, kind)?;
            let article = if kind == Kind::Hom { "a" } else { "an" };
            let mut human = format!("{lit} is {}{article} {kind} {} -> {}", if ok { "" } else { "not " }, a.name, b.name);
            let mut gained = None;
            if !ok && kind == Kind::Immersion && is_hom(&a, &b, &m)? && !is_immersion(&a, &b, &m)? {
                if let Some(sep) = separating_formula(&a, &b, &m)? {
                    human.push_str(&format!("\n  gained: {}", sep.describe(&a)));
                    gained = Some(sep.describe(&a));
                }
            }
            let mut json = json!(Morphism { map: m.clone(), kind }.record(&a, &b));
            json["verified"] = json!(ok);
            json["gained"] = json!(gained);
            Ok(Report::new(u8::from(!ok), human, json))
        }
    }
}

fn examples(list: bool, name: Option<&str>) -> Result<Report> {
    if let Some(n) = name {
        let f = corpus::file(n).ok_or_else(|| anyhow!("no bundled example `{n}` (see `examples --list`)"))?;
        return Ok(Report::new(0, f.source, json!({ "name": f.name, "source": f.source })));
    }
    if !list {
        bail!("give --list or an example name");
    }
    let c = corpus::load().map_err(|(f, e)| anyhow!("bundled {f}: {e}"))?;
    let mut human = String::new();
    let mut files = Vec::new();
    for f in corpus::FILES {
        let mut ws = Workspace::new();
        let doc = ws.load(f.name)?;
        let mut names: Vec<String> = Vec::new();
        names.extend(doc.signatures.iter().map(|s| format!("signature {}", s.name)));
        names.extend(doc.theories.iter().map(|t| format!("theory {}", t.name)));
        names.extend(doc.structures.iter().map(|s| format!("structure {} (size {})", s.name, s.size())));
        names.extend(doc.formulas.iter().map(|(n, _, phi)| format!("formula {n}: {phi}")));
        human.push_str(&format!("examples/{}: {}\n", f.name, names.join("; ")));
        files.push(json!({ "file": format!("examples/{}", f.name), "items": names }));
    }
    human.push_str(&format!("{} theories, {} structures, {} formulas", c.theories.len(), c.structures.len(), c.formulas.len()));
    Ok(Report::new(0, human, json!({ "files": files })))
}
