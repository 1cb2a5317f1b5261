//! The built-in fixture corpus: the unary-function theories with their
//! cycle structures, plus one relational example.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::ParseError;
use crate::structures::FinStructure;
use crate::syntax::{parse_document, ParseContext, PositiveFormula, Signature, Theory};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusFile {
    pub name: &'static str,
    pub source: &'static str,
}

macro_rules! corpus {
    ($($file:literal),* $(,)?) => {
        &[$(CorpusFile { name: $file, source: include_str!(concat!("../corpus/", $file)) }),*]
    };
}

pub const FILES: &[CorpusFile] = corpus![
    "unary.sig",
    "t_inj.thy",
    "t_prime.thy",
    "t_nofix.thy",
    "t_empty.thy",
    "a_e.struct",
    "two_cycle.struct",
    "three_cycle.struct",
    "four_cycle.struct",
    "five_cycle.struct",
    "six_cycle.struct",
    "seven_cycle.struct",
    "inj_fix2cycle.struct",
    "fix_three_cycle.struct",
    "two_two_cycle.struct",
    "two_three_cycle.struct",
    "three_four_cycle.struct",
    "tail.struct",
    "digraph.struct",
    "sentences.fml",
];

/// Looks a file up by bare name or by any path ending in it.
pub fn file(path: &str) -> Option<&'static CorpusFile> {
    let base = path.rsplit(['/', '\\']).next().unwrap_or(path);
    FILES.iter().find(|f| f.name == base)
}

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub signatures: BTreeMap<String, Arc<Signature>>,
    pub theories: BTreeMap<String, Theory>,
    pub structures: BTreeMap<String, FinStructure>,
    pub formulas: BTreeMap<String, (Arc<Signature>, PositiveFormula)>,
}

impl Corpus {
    pub fn theory(&self, name: &str) -> &Theory {
        self.theories.get(name).unwrap_or_else(|| panic!("corpus has no theory `{name}`"))
    }

    pub fn structure(&self, name: &str) -> &FinStructure {
        self.structures.get(name).unwrap_or_else(|| panic!("corpus has no structure `{name}`"))
    }

    pub fn formula(&self, name: &str) -> &PositiveFormula {
        &self.formulas.get(name).unwrap_or_else(|| panic!("corpus has no formula `{name}`")).1
    }
}

/// Parses every corpus file, each against the signatures seen so far.
pub fn load() -> Result<Corpus, (&'static str, ParseError)> {
    let mut ctx = ParseContext::new();
    let mut c = Corpus::default();
    for f in FILES {
        let doc = parse_document(f.source, &ctx).map_err(|e| (f.name, e))?;
        for s in doc.signatures {
            ctx.add_signature(s.clone());
            c.signatures.insert(s.name.clone(), s);
        }
        for t in doc.theories {
            c.theories.insert(t.name.clone(), t);
        }
        for s in doc.structures {
            c.structures.insert(s.name.clone(), s);
        }
        for (name, sig, phi) in doc.formulas {
            c.formulas.insert(name, (sig, phi));
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_loads() {
        let c = load().unwrap();
        assert_eq!(c.theories.len(), 4);
        for k in 2..=7 {
            let name = format!("C{k}");
            assert_eq!(c.structure(&name).size(), k);
        }
        assert_eq!(c.structure("Ae").size(), 1);
        assert!(file("examples/two_cycle.struct").is_some());
        assert!(file("nope.struct").is_none());
    }
}
