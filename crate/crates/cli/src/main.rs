//! `gkmforge`: command-line driver for the gkmforge library.
//!
//! Exit codes: 0 success, 1 the checked statement is false, 2 bad input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gkmforge", version, about = "Exact computations for equivariant K-theory sheaf models and GKM graphs")]
pub struct Cli {
    /// Jet cutoff D (total degree kept in germs and jets). Models default to their stored cutoff.
    #[arg(long, global = true)]
    pub cutoff: Option<u32>,
    /// Laurent window W (exponents in [-W, W] in K-theory computations).
    #[arg(long, global = true, default_value_t = 3)]
    pub window: u32,
    /// Machine-readable JSON reports.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

pub const DEFAULT_CUTOFF: u32 = 6;

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Character lattices, subgroups and torsion points.
    #[command(subcommand)]
    Latt(Latt),
    /// T-CW complexes.
    #[command(subcommand)]
    Tcw(Tcw),
    /// Adapted covers.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Laurent elements, Euler classes and jets.
    #[command(subcommand)]
    Algebra(Algebra),
    /// Chern characters and domination certificates.
    #[command(subcommand)]
    Chern(Chern),
    /// Stalks, gluing and sections of the sheaf model.
    #[command(subcommand)]
    Sheaf(Sheaf),
    /// GKM conditions and Chang-Skjelbred comparisons.
    #[command(subcommand)]
    Gkm(Gkm),
    /// Document validation and conversion.
    #[command(subcommand)]
    Ingest(Ingest),
    /// Run the acceptance suite.
    Selftest {
        /// Run a single criterion (1-10).
        #[arg(long)]
        only: Option<u8>,
    },
}

/// A character group `Z^r ⊕ Z/t1 ⊕ …`, written `r` or `r:t1,t2,…`.
#[derive(Args, Debug, Clone)]
pub struct GroupArg {
    #[arg(long)]
    pub group: String,
}

#[derive(Subcommand, Debug)]
pub enum Latt {
    /// Canonical generators of the subgroup spanned by JSON generators, e.g. '[[2,0],[0,3]]'.
    Subgroup {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        gens: String,
    },
    /// The annihilator M(α) of a point, given as comma-separated rationals.
    Annihilator {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        point: String,
    },
    /// Whether α lies in C_H for M_H spanned by --gens (exit 1 if not).
    Member {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        point: String,
        #[arg(long)]
        gens: String,
    },
    /// Whether α ≺ β relative to a JSON list of generator lists (exit 1 if not).
    Prec {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        collection: String,
    },
    /// Whether α and β lie on the same component of C_H (exit 1 if not).
    Component {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        gens: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum Tcw {
    /// The fixed subcomplex X^K (by --subgroup generators of M_K) or X^α (by --point).
    Fixed {
        file: PathBuf,
        #[arg(long, conflicts_with = "point", required_unless_present = "point")]
        subgroup: Option<String>,
        #[arg(long)]
        point: Option<String>,
    },
    /// Cells with orbits of dimension at most one.
    Skeleton { file: PathBuf },
    /// The isotropy collection A.
    Collection { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum CoverCmd {
    /// Build an adapted cover centered at the points of a points document.
    Build {
        /// Points document with the ball centers.
        #[arg(long, visible_alias = "points")]
        samples: PathBuf,
        /// JSON list of generator lists.
        #[arg(long, conflicts_with = "model")]
        collection: Option<String>,
        /// Take the collection from a model or moment graph (vertex isotropies and edge weights).
        #[arg(long, visible_alias = "graph")]
        model: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check the adapted-cover conditions (exit 1 with witnesses on failure).
    Verify {
        #[arg(long)]
        cover: PathBuf,
        /// Check against this collection instead of the cover's own.
        #[arg(long)]
        collection: Option<String>,
    },
    /// Distance from α to the component of C_H through --rep.
    Distance {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        point: String,
        #[arg(long)]
        gens: String,
        #[arg(long)]
        rep: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum Algebra {
    /// Evaluate a Laurent element '{"terms":[{"exp":[1],"coeff":1}]}' at a point.
    Eval {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        laurent: String,
        #[arg(long)]
        point: String,
    },
    /// Divide a Laurent element by 1 - z^w (exit 1 with a witness if not divisible).
    Euler {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        laurent: String,
        #[arg(long, allow_hyphen_values = true)]
        weight: String,
    },
    /// Divide a polynomial by a linear form (exit 1 with the remainder if not divisible).
    Linear {
        #[arg(long)]
        nvars: usize,
        #[arg(long)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        form: String,
    },
    /// Translate the jet of a polynomial by a rational vector.
    Translate {
        #[arg(long)]
        nvars: usize,
        #[arg(long)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        shift: String,
    },
    /// The jet of exp of a linear form.
    Exp {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum Chern {
    /// Chern character of the fiber at one vertex.
    Ch {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        vertex: String,
    },
    /// Isotypic decomposition of the fiber at a vertex under H(α).
    Decompose {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        point: String,
    },
    /// The twisted Chern character germ at a point.
    Twisted {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Domination certificate for a presentation (exit 1 if a bound fails).
    Dominate {
        #[arg(long, conflicts_with = "bundled", required_unless_present = "bundled")]
        presentation: Option<PathBuf>,
        /// One of the bundled presentations: point, cp1, cp2.
        #[arg(long)]
        bundled: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_n: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum Sheaf {
    /// The subgraph fixed by H(α).
    Fixed {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Graded dimensions and basis of the stalk at a center.
    Stalk {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Glue the stalk basis at α to β.
    Glue {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Cocycle condition on every overlapping triple (exit 1 on failure).
    #[command(visible_alias = "glue-check")]
    Cocycle {
        #[arg(long)]
        model: PathBuf,
    },
    /// Whether the twisted Chern characters of a bundle glue (exit 1 with the mismatch if not).
    Section {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Dimension of the space of compatible families at cutoff 0.
    Dimension {
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoryArg {
    K,
    H,
}

#[derive(Subcommand, Debug)]
pub enum Gkm {
    /// Check each class of a classes document (exit 1 if any edge fails).
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        class: PathBuf,
    },
    /// A basis of the GKM space in one degree (H) or window (K).
    Basis {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        theory: TheoryArg,
        /// Degree (H) or window (K); defaults to --cutoff or --window.
        #[arg(long)]
        param: Option<u32>,
    },
    /// GKM dimensions in degrees 0..=max-degree.
    Dims {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
    /// Compare the module spanned by generators with the GKM space (exit 1 on strict inclusion).
    #[command(visible_alias = "cs-compare")]
    Compare {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, visible_alias = "gens")]
        generators: PathBuf,
        #[arg(long, value_enum)]
        theory: TheoryArg,
        #[arg(long)]
        param: Option<u32>,
    },
    /// Edgewise 1-skeleton image versus the GKM space (exit 1 if they differ).
    Split {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        theory: TheoryArg,
        #[arg(long)]
        param: Option<u32>,
    },
    /// Product of two moment graphs.
    Product {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum Ingest {
    /// Validate a document and summarize it.
    Validate { file: PathBuf },
    /// Rewrite a document in normalized form.
    Normalize {
        file: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Convert a fan document to its moment graph.
    Fan {
        #[arg(long)]
        file: PathBuf,
        #[arg(long = "out", short, visible_alias = "output")]
        output: Option<PathBuf>,
    },
    /// Write every bundled example document into a directory.
    Examples { dir: PathBuf },
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("GKMFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("GKMFORGE_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.render(&cli));
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
