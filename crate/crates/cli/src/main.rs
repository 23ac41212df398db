//! `rft`: build towers from text files and run checks on them.
//!
//! Exit codes: 0 verified, 2 refuted, 3 budget-limited, 1 usage or input
//! error. Reports are JSON on standard output.

mod commands;
mod report;
mod selftest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::{CliError, EmbedArgs};
use report::Report;

const DEFAULT_BUDGET: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "rft", version, about = "Towers of limit groups: word problems, witnesses, embeddings, cores and flats")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the presentation and splitting of a stage.
    Present {
        file: String,
        /// Stage to show; the top by default.
        #[arg(long)]
        stage: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Decide whether a word is trivial in the top group.
    Wp {
        file: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Find a map to a free group injective on a set of words.
    Witness {
        file: String,
        /// Words separated by `;`.
        #[arg(long)]
        words: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Embed a limit group, given as a splitting with a strict quotient into
    /// FILE, into a tower one block higher.
    Embed {
        file: String,
        /// JSON splitting document.
        #[arg(long)]
        splitting: String,
        /// Radius of the ball on which injectivity is certified.
        #[arg(long, default_value_t = 2)]
        ball: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Accept obligations that cannot be verified within the budget.
        #[arg(long)]
        assume: bool,
    },
    /// Core of the cover for a finitely generated subgroup.
    Core {
        file: String,
        /// Subgroup generators separated by `;`.
        #[arg(long)]
        gens: String,
        /// Extra expansion rounds before extraction.
        #[arg(long, default_value_t = 0)]
        depth: usize,
        /// Cells to keep, such as `v3,e5`.
        #[arg(long)]
        require: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Flat inventory and isolation hypotheses.
    Flats {
        file: String,
        /// Subgroup whose core is checked; the whole group by default.
        #[arg(long)]
        gens: Option<String>,
        #[arg(long, default_value_t = rft_core::flats::DEFAULT_POWER_BUDGET)]
        power_budget: i64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Run the built-in checks.
    Selftest,
}

fn emit<R: Serialize>(r: Result<Report<R>, CliError>) -> u8 {
    match r {
        Ok(rep) => {
            print!("{}", rep.render());
            rep.exit_code as u8
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let echo = &argv[1..];
    let code = match cli.command {
        Command::Present { file, stage, budget } => emit(commands::present(echo, &file, stage, budget)),
        Command::Wp { file, word, budget } => emit(commands::wp(echo, &file, &word, budget)),
        Command::Witness { file, words, budget, seed } => {
            emit(commands::witness(echo, &file, &words, budget, seed))
        }
        Command::Embed { file, splitting, ball, budget, assume } => {
            let a = EmbedArgs { file: &file, splitting: &splitting, ball, budget, assume };
            emit(commands::embed(echo, &a))
        }
        Command::Core { file, gens, depth, require, budget } => {
            emit(commands::core(echo, &file, &gens, depth, require.as_deref(), budget))
        }
        Command::Flats { file, gens, power_budget, budget } => {
            emit(commands::flats(echo, &file, gens.as_deref(), power_budget, budget))
        }
        Command::Selftest => emit(Ok(selftest::selftest(echo))),
    };
    ExitCode::from(code)
}
