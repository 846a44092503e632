//! `subposet`: exact forbidden-subposet computations from the command line.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use subposet_core::search::DEFAULT_NODE_CAP;

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "subposet", version, about = "Exact forbidden subposet computations on Boolean and subspace lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; JSON is canonical, CSV and table are projections of it.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for searches (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Search node budget; hitting it yields exit code 4.
    #[arg(long, default_value_t = DEFAULT_NODE_CAP, global = true)]
    node_cap: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundChoice {
    Boolean,
    Subspace,
}

#[derive(Args, Debug, Serialize)]
pub struct GroundArgs {
    /// Lattice kind.
    #[arg(long, value_enum, default_value_t = GroundChoice::Boolean)]
    pub ground: GroundChoice,
    /// Dimension, or size of the underlying set.
    #[arg(long)]
    pub n: usize,
    /// Field order for subspace grounds (default 2).
    #[arg(long)]
    pub q: Option<u64>,
}

/// Selects a family: full levels, explicit members, or both (union).
#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    /// Comma-separated levels to include in full.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    /// Semicolon-separated members such as `{1,2};{3}` or `<10,01>;<11>`.
    #[arg(long)]
    pub members: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct PropertyArgs {
    /// Forbidden patterns, comma-separated.
    #[arg(long)]
    pub forbid: Option<String>,
    /// Required pairwise relation between members.
    #[arg(long, value_enum)]
    pub pair_filter: Option<PairFilterChoice>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairFilterChoice {
    Intersecting,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseChoice {
    I,
    Ii,
    Iii,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Chains,
    Cycle,
    BooleanSublattices,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Gaussian binomial coefficient.
    Gauss {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        q: u64,
    },
    /// Build a ground and report its level structure.
    Ground {
        #[command(flatten)]
        ground: GroundArgs,
        /// Also list every element.
        #[arg(long)]
        list: bool,
    },
    /// Largest weight of a family with the given property.
    La {
        #[command(flatten)]
        ground: GroundArgs,
        #[command(flatten)]
        property: PropertyArgs,
        /// Per-level weights such as `0,1,1/2`; default all ones.
        #[arg(long)]
        weights: Option<String>,
        /// Restrict the search to these levels.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<usize>>,
    },
    /// Total size of the k middle levels.
    Sigma {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Use Gaussian coefficients over GF(q).
        #[arg(long)]
        q: Option<u64>,
        /// Use the other middle window when there are two.
        #[arg(long)]
        alt_window: bool,
    },
    /// Largest number of copies of a pattern in a family avoiding others.
    CountMax {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long)]
        forbid: Option<String>,
        /// Pattern whose copies are counted.
        #[arg(long)]
        pattern: String,
    },
    /// Closed-form values for generalized counts in subspace lattices.
    PropPredict {
        #[arg(long = "case", value_enum)]
        #[serde(rename = "case")]
        which: CaseChoice,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long)]
        r: usize,
        /// Also run the exact search on the subspace ground.
        #[arg(long)]
        search: bool,
    },
    /// Coverings of a ground and the weighted covering bound.
    Covering {
        #[command(subcommand)]
        action: CoveringAction,
    },
    /// Sum of 1 / (level size) over the members of a family.
    Lym {
        #[command(flatten)]
        ground: GroundArgs,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Profile vector, or l-chain profile with --l.
    Profile {
        #[command(flatten)]
        ground: GroundArgs,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1)]
        l: usize,
    },
    /// Maximize linear functionals over l-chain profiles of families with a property.
    ExtremeScan {
        #[command(flatten)]
        ground: GroundArgs,
        #[command(flatten)]
        property: PropertyArgs,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 100)]
        directions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Split a k-Sperner family into k antichains of successive minimal elements.
    CanonPartition {
        #[command(flatten)]
        ground: GroundArgs,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        k: usize,
    },
    /// Largest m such that m consecutive Boolean levels never contain the pattern.
    EOfPoset {
        #[arg(long)]
        pattern: String,
        /// Largest n checked.
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Run the reproduction suite and print a pass/fail table.
    Repro {
        /// Only these check ids.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u32>>,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum CoveringAction {
    /// Construct a covering and report |Γ| and t.
    Build {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long, value_enum)]
        method: MethodChoice,
        /// Also list the distinct members with multiplicities.
        #[arg(long)]
        list: bool,
    },
    /// Count every element's multiplicity and compare with t.
    Verify {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long, value_enum)]
        method: MethodChoice,
        /// Remove one copy of this distinct member first.
        #[arg(long)]
        drop_member: Option<usize>,
    },
    /// Covering counts of l-chains per level tuple.
    TupleCover {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long, value_enum)]
        method: MethodChoice,
        #[arg(long)]
        l: usize,
        /// Report one tuple such as `1,2`.
        #[arg(long)]
        tuple: Option<String>,
    },
    /// The bound |Γ|·x for weight w, with x computed on one member unless given.
    Bound {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long, value_enum)]
        method: MethodChoice,
        #[command(flatten)]
        property: PropertyArgs,
        /// Per-level weights; default t itself.
        #[arg(long)]
        weights: Option<String>,
        /// Use this inner maximum instead of searching.
        #[arg(long)]
        inner_max: Option<String>,
    },
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Gauss { .. } => "gauss".into(),
            Command::Ground { .. } => "ground".into(),
            Command::La { .. } => "la".into(),
            Command::Sigma { .. } => "sigma".into(),
            Command::CountMax { .. } => "count-max".into(),
            Command::PropPredict { .. } => "prop-predict".into(),
            Command::Covering { action } => format!(
                "covering {}",
                match action {
                    CoveringAction::Build { .. } => "build",
                    CoveringAction::Verify { .. } => "verify",
                    CoveringAction::TupleCover { .. } => "tuple-cover",
                    CoveringAction::Bound { .. } => "bound",
                }
            ),
            Command::Lym { .. } => "lym".into(),
            Command::Profile { .. } => "profile".into(),
            Command::ExtremeScan { .. } => "extreme-scan".into(),
            Command::CanonPartition { .. } => "canon-partition".into(),
            Command::EOfPoset { .. } => "e-of-poset".into(),
            Command::Repro { .. } => "repro".into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let opts = subposet_core::search::SearchOptions { node_cap: cli.node_cap, threads: cli.threads };
    let outcome = commands::run(&cli.command, &opts);
    let elapsed = start.elapsed();
    match outcome {
        Ok(done) => {
            let envelope = output::envelope(&cli.command.name(), &cli.command, done.result, elapsed);
            let text = output::render(&envelope, cli.format);
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{text}");
            }
            ExitCode::from(done.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
