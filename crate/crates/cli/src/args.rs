use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use flute_core::patchwork::PatchworkKind;

use crate::commands::{self, Overrides};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "flute", version, about = "Classify flute surfaces from Fenchel-Nielsen data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Override `depth` from the config.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Override `precision` (bits) from the config.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Read the `[patchwork]` table from this file instead.
    #[arg(long, global = true, value_name = "FILE")]
    pub patchwork: Option<PathBuf>,
    /// Report path (SVG path for `render`); stdout when absent.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Treat precision exhaustion as an error.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Leave `generated_at` out of reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Restricted,
    Generalized,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the surface; exit 0 first kind, 1 not first kind, 2 undetermined.
    Classify { config: PathBuf },
    /// Compare closed-form shears and η with a developed lift.
    OracleCheck {
        config: PathBuf,
        /// Also run all 28 admissible configurations through the pentagon oracle.
        #[arg(long)]
        sweep: bool,
    },
    /// Write the developed lift as a disk-model SVG.
    Render {
        config: PathBuf,
        /// Draw the piecewise horocyclic path.
        #[arg(long)]
        overlay: bool,
    },
    /// List admissible patchworks to the configured depth.
    Enumerate {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Restricted)]
        kind: Kind,
    },
}

/// Runs a parsed command line, returning the exit status.
pub fn run(cli: Cli) -> Result<u8, CliError> {
    let o = Overrides {
        depth: cli.depth,
        precision: cli.precision,
        patchwork: cli.patchwork,
        output: cli.output,
        strict: cli.strict,
        no_timestamp: cli.no_timestamp,
    };
    match cli.command {
        Command::Classify { config } => commands::cmd_classify(&commands::load(&config, &o)?, &o),
        Command::OracleCheck { config, sweep } => {
            commands::cmd_oracle_check(&commands::load(&config, &o)?, &o, sweep)
        }
        Command::Render { config, overlay } => {
            commands::cmd_render(&commands::load(&config, &o)?, &o, overlay)
        }
        Command::Enumerate { config, kind } => {
            let kind = match kind {
                Kind::Restricted => PatchworkKind::Restricted,
                Kind::Generalized => PatchworkKind::Generalized,
            };
            commands::cmd_enumerate(&commands::load(&config, &o)?, &o, kind)
        }
    }
}
