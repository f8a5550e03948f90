//! `cherednik` command-line tool: verify bundled decomposition matrices,
//! complete them with the constraint solver, and print characters, supports
//! and defect-one checks.
//!
//! Exit codes: 0 success, 1 mismatch, 2 data error, 3 ambiguous.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cherednik::defect1::{load_shifted_lists, Defect1Block};
use cherednik::functors::{load_contexts, ParabolicContext};
use cherednik::rational::{format_rational, parse_rational};
use cherednik::repdata::DataSet;
use cherednik::report::{
    char_section, defect1_section, load_block_id, solve_block, support_section, verify_block, with_dual, RunReport,
    Section,
};
use cherednik::solver::{parse_rules, ConstraintConfig, SolverContext};
use cherednik::Error;

#[derive(Parser, Debug)]
#[command(
    name = "cherednik",
    version,
    about = "Decomposition matrices for Category O of rational Cherednik algebras"
)]
struct Cli {
    /// Data directory (overrides CHEREDNIK_DATA_DIR and the bundled copy).
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Number of graded pieces checked for non-negativity.
    #[arg(long, global = true, default_value_t = 40)]
    series_depth: u32,
    /// Largest matrix entry tried by the search.
    #[arg(long, global = true, default_value_t = 4)]
    search_cap: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check bundled matrices: inverses, annotations, characters and dimensions.
    Verify {
        /// Blocks as file paths or GROUP/c_P_Q/name; none means every bundled block.
        blocks: Vec<String>,
        #[arg(long)]
        all: bool,
    },
    /// Complete a block's decomposition matrix from its Hecke columns.
    Solve(SolveArgs),
    /// Graded character, support and dimension of one simple.
    Char { block: String, label: String },
    /// Supports of every simple of a block.
    Support { block: String },
    /// Defect-one block from weights and dimensions, or the bundled shifted lists.
    Defect1 {
        /// Comma-separated weights (any integer-spaced increasing list).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "dims")]
        weights: Vec<String>,
        /// Comma-separated dimensions of the members.
        #[arg(long, value_delimiter = ',', requires = "weights")]
        dims: Vec<u64>,
        /// Rank of the reflection representation.
        #[arg(long, default_value_t = 8)]
        rank: u32,
        /// Group whose bundled shifted lists are checked when no weights are given.
        #[arg(long, default_value = "E8")]
        group: String,
    },
    /// Verify every bundled block and solve every block with Hecke columns.
    Report,
}

#[derive(Args, Debug)]
struct SolveArgs {
    block: String,
    /// Parabolic context file; by default the bundled one for the block's group and parameter.
    #[arg(long, conflicts_with = "no_context")]
    context: Option<PathBuf>,
    /// Solve without any parabolic context.
    #[arg(long)]
    no_context: bool,
    /// Solve the block alone instead of together with its sign-dual block.
    #[arg(long)]
    no_dual: bool,
    /// Constraints to enable, e.g. `C1,C2,C3,C5` (default: all).
    #[arg(long)]
    constraints: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = std::iter::once("cherednik".to_string())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ");
    let report = run(&cli, echo);
    if cli.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
    ExitCode::from(report.exit_code() as u8)
}

fn run(cli: &Cli, echo: String) -> RunReport {
    let mut report = RunReport::new(echo);
    let fail = |report: &mut RunReport, what: &str, e: Error| report.push(Section::from_error(what, &e));
    let data = match DataSet::load_default(cli.data_dir.as_deref()) {
        Ok(d) => d,
        Err(e) => {
            fail(&mut report, "data", e);
            return report;
        }
    };
    let mut cfg = ConstraintConfig {
        search_cap: cli.search_cap,
        series_depth: cli.series_depth,
        ..ConstraintConfig::default()
    };
    if let Err(e) = cfg.validate() {
        fail(&mut report, "configuration", e);
        return report;
    }
    match &cli.command {
        Command::Verify { blocks, all } => {
            let loaded = if *all || blocks.is_empty() {
                data.all_blocks()
            } else {
                blocks.iter().map(|b| load_block_id(&data, b)).collect()
            };
            match loaded {
                Ok(bs) => bs.iter().for_each(|b| report.push(verify_block(b, &cfg))),
                Err(e) => fail(&mut report, "verify", e),
            }
        }
        Command::Solve(args) => {
            if let Some(list) = &args.constraints {
                match parse_rules(list) {
                    Ok(rules) => cfg.rules = rules,
                    Err(e) => {
                        fail(&mut report, "constraints", e);
                        return report;
                    }
                }
            }
            if let Err(e) = solve_command(&data, args, &cfg, &mut report) {
                fail(&mut report, &args.block, e);
            }
        }
        Command::Char { block, label } => match load_block_id(&data, block) {
            Ok(b) => report.push(char_section(&b, label)),
            Err(e) => fail(&mut report, block, e),
        },
        Command::Support { block } => match load_block_id(&data, block) {
            Ok(b) => report.push(support_section(&b)),
            Err(e) => fail(&mut report, block, e),
        },
        Command::Defect1 {
            weights,
            dims,
            rank,
            group,
        } => {
            if weights.is_empty() {
                if let Err(e) = shifted_lists(&data, group, &mut report) {
                    fail(&mut report, group, e);
                }
            } else {
                let built = weights
                    .iter()
                    .map(|w| parse_rational(w))
                    .collect::<cherednik::Result<Vec<_>>>()
                    .and_then(|ws| Defect1Block::new(ws, dims.clone(), *rank));
                match built {
                    Ok(d) => report.push(defect1_section("defect-one block", &d, None)),
                    Err(e) => fail(&mut report, "defect-one block", e),
                }
            }
        }
        Command::Report => {
            if let Err(e) = full_report(&data, &cfg, &mut report) {
                fail(&mut report, "report", e);
            }
        }
    }
    report
}

fn solve_command(
    data: &DataSet,
    args: &SolveArgs,
    cfg: &ConstraintConfig,
    report: &mut RunReport,
) -> cherednik::Result<()> {
    let b = load_block_id(data, &args.block)?;
    let b = if args.no_dual { b } else { with_dual(data, &b)? };
    let custom;
    let bundled;
    let ctx = if args.no_context {
        None
    } else if let Some(path) = &args.context {
        custom = ParabolicContext::load(path, data)?;
        Some(SolverContext {
            parabolic: &custom,
            branching: data.branching(&custom.parent, &custom.group).ok(),
        })
    } else {
        bundled = load_contexts(data)?;
        SolverContext::for_block(&bundled, data, &b)
    };
    report.push(solve_block(&b, ctx, cfg));
    Ok(())
}

fn shifted_lists(data: &DataSet, group: &str, report: &mut RunReport) -> cherednik::Result<()> {
    let file = load_shifted_lists(data, group)?;
    for entry in &file.blocks {
        let title = format!("{group} {}", entry.title());
        match entry.to_block(group, data) {
            Ok(d) => report.push(defect1_section(title, &d, Some(entry.support))),
            Err(e) => report.push(Section::from_error(title, &e)),
        }
    }
    Ok(())
}

fn full_report(data: &DataSet, cfg: &ConstraintConfig, report: &mut RunReport) -> cherednik::Result<()> {
    let blocks = data.all_blocks()?;
    for b in &blocks {
        report.push(verify_block(b, cfg));
    }
    let contexts = load_contexts(data)?;
    // A block solved together with its sign-dual block is not solved again.
    let mut solved: BTreeSet<(String, String)> = BTreeSet::new();
    for b in blocks.iter().filter(|b| !b.hecke_columns.is_empty()) {
        let joint = with_dual(data, b)?;
        let c = format_rational(&joint.c);
        if !solved.insert((c.clone(), b.irreps[0].clone())) {
            continue;
        }
        solved.extend(joint.irreps.iter().map(|l| (c.clone(), l.clone())));
        let ctx = SolverContext::for_block(&contexts, data, &joint);
        report.push(solve_block(&joint, ctx, cfg));
    }
    Ok(())
}
