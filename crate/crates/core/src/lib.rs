//! Finite-scale positive model theory: positive and h-inductive formulas,
//! finite structures, homomorphism / embedding / immersion search, and
//! bounded checks for positively closed and positively algebraically closed
//! models.

pub mod amalgamation;
pub mod closedness;
pub mod corpus;
pub mod error;
pub mod morphisms;
pub mod structures;
pub mod syntax;
pub mod theories;

pub use amalgamation::{AmalgamRequest, AmalgamResult};
pub use closedness::{CheckReport, Mode, PacCertificate};
pub use error::{CheckError, EvalError, MorphismError, ParseError, SortError, StructureError};
pub use morphisms::{Kind, Morphism};
pub use structures::{Assignment, FinStructure};
pub use syntax::{Atom, HInductiveSentence, PositiveFormula, Signature, Term, Theory};
pub use theories::{BoundedVerdict, Flag, Outcome, SearchBudget, Witness};
