//! `poslog`: bounded positive model theory from the command line.
//!
//! Exit codes: 0 Holds / Found, 1 Fails / NotFound, 2 Unknown (budget
//! exhausted), 3 input error.

mod audit;
mod commands;
mod workspace;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use poslog_core::SearchBudget;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "poslog", version, about = "Bounded checks for positive model theory on finite structures")]
pub struct Cli {
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Cap on listed items (models, morphisms, pairs).
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct BudgetArgs {
    /// Largest model size N searched [default: 6; corpus-verify: each row's golden bound].
    #[arg(long, global = true)]
    pub bound: Option<usize>,
    /// Term depth for generated atoms.
    #[arg(long, global = true, default_value_t = 1)]
    pub depth: usize,
    /// Atom bound for generated formulas and certificates.
    #[arg(long, global = true, default_value_t = 3)]
    pub atoms: usize,
    /// Search-node budget per search.
    #[arg(long, global = true, default_value_t = 200_000_000)]
    pub nodes: u64,
    /// Length bound for certificate parameter tuples.
    #[arg(long, global = true, default_value_t = 2)]
    pub params: usize,
    /// Wall-clock limit per enumeration, in seconds.
    #[arg(long, global = true)]
    pub time_limit: Option<f64>,
}

impl BudgetArgs {
    pub fn budget(&self) -> SearchBudget {
        let mut b = SearchBudget::default()
            .with_size(self.bound.unwrap_or(6))
            .with_depth(self.depth)
            .with_atoms(self.atoms)
            .with_nodes(self.nodes)
            .with_params(self.params);
        b.time_limit = self.time_limit.map(Duration::from_secs_f64);
        b
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse files and print them back in canonical form.
    Parse { files: Vec<String> },
    /// Evaluate a positive formula or an h-inductive sentence in a structure.
    Eval {
        structure: String,
        #[arg(long, conflicts_with = "sentence", required_unless_present = "sentence")]
        formula: Option<String>,
        #[arg(long)]
        sentence: Option<String>,
        /// Values of the free variables, `x=a,y=b`.
        #[arg(long)]
        at: Option<String>,
    },
    /// Enumerate the models of a theory up to isomorphism.
    Models { theory: String },
    /// Bounded entailment by countermodel search.
    Entails {
        theory: String,
        #[arg(long)]
        sentence: String,
    },
    /// Probe Ctr_T(φ): formulas jointly inconsistent with φ.
    Ctr {
        theory: String,
        #[arg(long)]
        formula: String,
    },
    /// Search a common continuation of two models.
    Continue {
        a: String,
        b: String,
        #[arg(long)]
        theory: String,
    },
    /// Find or check homomorphisms, embeddings and immersions.
    Morphisms {
        #[command(subcommand)]
        op: MorphismsOp,
    },
    /// Bounded positively-closed check.
    Pc {
        structure: String,
        #[arg(long)]
        theory: String,
    },
    /// Bounded positively-algebraically-closed check.
    Pac {
        structure: String,
        #[arg(long)]
        theory: String,
    },
    /// Search a pac certificate for the failure of ψ at ā.
    Certify {
        structure: String,
        #[arg(long)]
        theory: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        at: Option<String>,
    },
    /// Re-check a pac certificate given as (ψ, ā, b̄, θ1, θ2).
    VerifyCert {
        structure: String,
        #[arg(long)]
        theory: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        at: Option<String>,
        /// Parameter variables and their values, in order: `y0=b,y1=c`.
        #[arg(long = "with")]
        with: Option<String>,
        #[arg(long)]
        theta1: String,
        #[arg(long)]
        theta2: String,
    },
    /// Harvest Alc_T(ψ) pairs from the bounded-pac models.
    Alc {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        formula: String,
        /// Largest source model (defaults to the bound).
        #[arg(long)]
        sources: Option<usize>,
    },
    /// Emit T_h: T plus the axioms of one equivalent pair per formula.
    BuildTh {
        #[arg(long)]
        theory: String,
        #[arg(long = "formula", required = true)]
        formulas: Vec<String>,
        #[arg(long)]
        sources: Option<usize>,
    },
    /// Greedily extend a model until the bounded pac check stops failing.
    Saturate {
        structure: String,
        #[arg(long)]
        theory: String,
    },
    /// Bounded e-elementary extension check for an embedding A -> B.
    EElem {
        a: String,
        b: String,
        #[arg(long)]
        map: String,
    },
    /// Amalgamate an embedding A -> B with an immersion A -> C.
    Amalgamate {
        #[arg(long)]
        base: String,
        #[arg(long)]
        top: String,
        #[arg(long = "map-e")]
        map_e: String,
        #[arg(long)]
        left: String,
        #[arg(long = "map-i")]
        map_i: String,
        #[arg(long)]
        theory: String,
    },
    /// Check that pairs of small embeddings out of A amalgamate.
    EmbedAmalgProbe {
        structure: String,
        #[arg(long)]
        theory: String,
        /// Largest extension size paired up.
        #[arg(long, default_value_t = 3)]
        sample: usize,
    },
    /// List or print the bundled corpus.
    Examples {
        #[arg(long)]
        list: bool,
        name: Option<String>,
    },
    /// Re-run the golden outcome table over the bundled corpus.
    CorpusVerify {
        /// Golden table to compare against (defaults to the bundled one).
        #[arg(long)]
        golden: Option<String>,
        /// Write the computed table here instead of comparing.
        #[arg(long)]
        record: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum MorphismsOp {
    /// List maps of a kind from A to B.
    Find {
        a: String,
        b: String,
        #[arg(long, default_value = "hom")]
        kind: String,
    },
    /// Check that a map literal has a kind.
    Check {
        a: String,
        b: String,
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "hom")]
        kind: String,
    },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = commands::run(&cli);
    let wall_ms = start.elapsed().as_millis() as u64;
    match result {
        Ok(report) => {
            if cli.json {
                let out = json!({
                    "command": argv[1..],
                    "exit_code": report.code,
                    "result": report.json,
                    "wall_time_ms": wall_ms,
                });
                println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
            } else {
                println!("{}", report.human.trim_end());
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            if cli.json {
                let out = json!({ "command": argv[1..], "exit_code": 3, "error": format!("{e:#}"), "wall_time_ms": wall_ms });
                println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
