//! JSON views of structures and diagrams. Maps are `BTreeMap`s so key order
//! is stable across runs.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::StructureError;
use crate::syntax::Signature;

use super::{all_tuples, diag, diag_plus, tuple_index, FinStructure};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureJson {
    pub name: String,
    pub signature: String,
    pub universe: Vec<String>,
    /// Per function: rows `[arg.., value]`.
    pub functions: BTreeMap<String, Vec<Vec<String>>>,
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    pub constants: BTreeMap<String, String>,
}

impl From<&FinStructure> for StructureJson {
    fn from(a: &FinStructure) -> Self {
        let n = a.size();
        let name = |i: usize| a.element_name(i).to_string();
        let sig = a.signature();
        let functions = sig
            .functions()
            .iter()
            .enumerate()
            .map(|(fi, (g, arity))| {
                let rows = all_tuples(n, *arity)
                    .map(|t| {
                        let v = a.apply(fi, &t);
                        t.into_iter().chain(std::iter::once(v)).map(name).collect()
                    })
                    .collect();
                (g.clone(), rows)
            })
            .collect();
        let relations = sig
            .relations()
            .iter()
            .enumerate()
            .map(|(ri, (r, _))| {
                let rows = a.relation_tuples(ri).into_iter().map(|t| t.into_iter().map(name).collect()).collect();
                (r.clone(), rows)
            })
            .collect();
        let constants = sig.constants().iter().enumerate().map(|(ci, c)| (c.clone(), name(a.constant(ci)))).collect();
        StructureJson {
            name: a.name.clone(),
            signature: sig.name.clone(),
            universe: a.elements().to_vec(),
            functions,
            relations,
            constants,
        }
    }
}

impl StructureJson {
    /// Rebuilds the structure over `sig`, which must be the signature the
    /// record was exported from.
    pub fn to_structure(&self, sig: Arc<Signature>) -> Result<FinStructure, StructureError> {
        let n = self.universe.len();
        let index = |e: &str| self.universe.iter().position(|u| u == e).ok_or_else(|| StructureError::UnknownElement(e.to_string()));
        let mut functions = Vec::new();
        for (g, arity) in sig.functions() {
            let rows = self.functions.get(g).ok_or_else(|| StructureError::NotTotal { symbol: g.clone(), args: "..".into() })?;
            let mut table = vec![usize::MAX; n.pow(*arity as u32)];
            for row in rows {
                let idx: Vec<usize> = row.iter().map(|e| index(e)).collect::<Result<_, _>>()?;
                if idx.len() != arity + 1 {
                    return Err(StructureError::NotTotal { symbol: g.clone(), args: row.join(", ") });
                }
                table[tuple_index(n, &idx[..*arity])] = idx[*arity];
            }
            if table.contains(&usize::MAX) {
                return Err(StructureError::NotTotal { symbol: g.clone(), args: "..".into() });
            }
            functions.push(table);
        }
        let mut relations = Vec::new();
        for (r, arity) in sig.relations() {
            let mut table = vec![false; n.pow(*arity as u32)];
            for row in self.relations.get(r).into_iter().flatten() {
                let idx: Vec<usize> = row.iter().map(|e| index(e)).collect::<Result<_, _>>()?;
                table[tuple_index(n, &idx)] = true;
            }
            relations.push(table);
        }
        let mut constants = Vec::new();
        for c in sig.constants() {
            let e = self.constants.get(c).ok_or_else(|| StructureError::MissingConstant(c.clone()))?;
            constants.push(index(e)?);
        }
        FinStructure::from_tables(self.name.clone(), sig, self.universe.clone(), functions, relations, constants)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub structure: String,
    pub depth: usize,
    pub positive: Vec<String>,
    pub literals: Vec<String>,
}

impl DiagramJson {
    pub fn new(a: &FinStructure, depth: usize) -> Self {
        DiagramJson {
            structure: a.name.clone(),
            depth,
            positive: diag_plus(a).iter().map(|x| x.to_string()).collect(),
            literals: diag(a, depth).iter().map(|x| x.to_string()).collect(),
        }
    }
}
