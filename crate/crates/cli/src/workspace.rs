//! Input loading. A path is read from disk when it exists; otherwise a path
//! ending in the name of a bundled corpus file resolves to that file, so
//! `examples/t_inj.thy` works from any directory.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use poslog_core::corpus;
use poslog_core::morphisms::parse_map;
use poslog_core::syntax::{parse_document, parse_formula, parse_sentence, Document, ParseContext};
use poslog_core::{FinStructure, HInductiveSentence, PositiveFormula, Signature, Theory};

#[derive(Default)]
pub struct Workspace {
    ctx: ParseContext,
    docs: BTreeMap<String, Document>,
}

fn read(path: &str) -> Result<String> {
    if Path::new(path).exists() {
        return std::fs::read_to_string(path).with_context(|| format!("cannot read `{path}`"));
    }
    corpus::file(path)
        .map(|f| f.source.to_string())
        .ok_or_else(|| anyhow!("`{path}`: no such file, and no bundled corpus file of that name"))
}

/// `file` or `file:Name`.
fn split_spec(spec: &str) -> (&str, Option<&str>) {
    if Path::new(spec).exists() || corpus::file(spec).is_some() {
        return (spec, None);
    }
    match spec.rsplit_once(':') {
        Some((path, name)) if !name.is_empty() && !name.contains(['/', '\\']) => (path, Some(name)),
        _ => (spec, None),
    }
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(&mut self, path: &str) -> Result<&Document> {
        if !self.docs.contains_key(path) {
            let src = read(path)?;
            let doc = parse_document(&src, &self.ctx).map_err(|e| anyhow!("{path}:{e} [{}]", e.category()))?;
            for s in &doc.signatures {
                self.ctx.add_signature(s.clone());
            }
            self.docs.insert(path.to_string(), doc);
        }
        Ok(&self.docs[path])
    }

    pub fn structure(&mut self, spec: &str) -> Result<FinStructure> {
        let (path, name) = split_spec(spec);
        let doc = self.load(path)?;
        let found = match name {
            Some(n) => doc.structures.iter().find(|s| s.name == n),
            None => doc.structures.first(),
        };
        found.cloned().ok_or_else(|| anyhow!("`{spec}` contains no such structure"))
    }

    pub fn theory(&mut self, spec: &str) -> Result<Theory> {
        let (path, name) = split_spec(spec);
        let doc = self.load(path)?;
        let found = match name {
            Some(n) => doc.theories.iter().find(|t| t.name == n),
            None => doc.theories.first(),
        };
        found.cloned().ok_or_else(|| anyhow!("`{spec}` contains no such theory"))
    }

    /// A formula given as source text, or by the name of a `formula` item in
    /// a loaded file or the bundled `sentences.fml`.
    pub fn formula(&mut self, src: &str, sig: &Arc<Signature>) -> Result<PositiveFormula> {
        let is_name = !src.is_empty() && src.chars().all(|c| c.is_alphanumeric() || c == '_');
        if is_name {
            self.load("sentences.fml")?;
            let named = self.docs.values().flat_map(|d| &d.formulas).find(|(n, s, _)| n == src && s.name == sig.name);
            if let Some((_, _, phi)) = named {
                return Ok(phi.clone());
            }
        }
        formula(src, sig)
    }
}

pub fn formula(src: &str, sig: &Arc<Signature>) -> Result<PositiveFormula> {
    parse_formula(src, sig).map_err(|e| anyhow!("formula `{src}`: {e} [{}]", e.category()))
}

pub fn sentence(src: &str, sig: &Arc<Signature>) -> Result<HInductiveSentence> {
    parse_sentence(src, sig).map_err(|e| anyhow!("sentence `{src}`: {e} [{}]", e.category()))
}

pub fn map(literal: &str, domain: &FinStructure, codomain: &FinStructure) -> Result<Vec<usize>> {
    parse_map(literal, domain, codomain).with_context(|| format!("map `{literal}`"))
}

/// `x=a,y=b` against the structure's element names, returned in the order
/// of `vars`; every variable must be bound.
pub fn bindings(literal: Option<&str>, vars: &[String], a: &FinStructure) -> Result<Vec<usize>> {
    let mut given = BTreeMap::new();
    for part in literal.unwrap_or("").split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (v, e) = part.split_once('=').ok_or_else(|| anyhow!("`{part}` is not of the form var=element"))?;
        let idx = a.element_index(e.trim()).ok_or_else(|| anyhow!("`{}` has no element `{}`", a.name, e.trim()))?;
        if given.insert(v.trim().to_string(), idx).is_some() {
            bail!("variable `{}` bound twice", v.trim());
        }
    }
    if let Some(extra) = given.keys().find(|v| !vars.contains(v)) {
        bail!("`{extra}` is not a free variable here (free: {})", vars.join(", "));
    }
    vars.iter().map(|v| given.get(v).copied().ok_or_else(|| anyhow!("free variable `{v}` needs a value (--at {v}=...)"))).collect()
}
