use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "startree", version, about = "Generate, query and verify the leaf-removable degree-3 tree")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command. Anything left unset falls back to the
/// `--config` file, then to built-in defaults.
#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    /// Level of the tower to work in (`--max-level` for `verify`).
    #[arg(long, visible_alias = "max-level", global = true)]
    pub level: Option<usize>,

    #[arg(long, global = true)]
    pub radius: Option<usize>,

    /// Exploration margin beyond the radius for orbit and host closures.
    #[arg(long, global = true)]
    pub margin: Option<usize>,

    /// Quiet strata required before the host ladder stops.
    #[arg(long, global = true)]
    pub stability_k: Option<usize>,

    /// Center address; defaults to `base^level(ray(0))`.
    #[arg(long, global = true)]
    pub center: Option<String>,

    /// Tree export format: dot, json or edgelist.
    #[arg(long, global = true)]
    pub format: Option<String>,

    /// JSON file with defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Materialize a ball and print it.
    Truncate,
    /// Run the verifier suite and print one JSON report per line.
    Verify,
    /// Apply an isomorphism word to an address.
    Map(MapArgs),
    /// List the orbit of addresses under a set of generators.
    Orbit(OrbitArgs),
    /// Summarize a ball: sizes, degrees, hosts, designated leaves.
    Stats,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Letters `g<j>` or `g<j>^-1`, applied right to left.
    #[arg(long, allow_hyphen_values = true)]
    pub word: String,

    #[arg(long)]
    pub addr: String,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Generator indices separated by commas or spaces; all of the level's
    /// generators when omitted, none when empty.
    #[arg(long)]
    pub gens: Option<String>,

    /// Seed address; repeat for several.
    #[arg(long, required = true)]
    pub addr: Vec<String>,
}
