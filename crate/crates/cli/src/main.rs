//! `pzl`: check rules, generate and count completed boards, build
//! problems, draw boards and cross-check the shipped corpus.
//!
//! Exit codes: 0 success, 1 verification failure or non-unique problem,
//! 2 usage, parse or static error, 3 infeasible or budget exhausted.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pzl_core::board::{CompletedBoard, Given, Problem};
use pzl_core::corpus;
use pzl_core::dsl::{check_source, parse_rule, Rule};
use pzl_core::grid::GridDims;
use pzl_core::problem::{mask, verify_unique, MaskPolicy};
use pzl_core::render::{render, render_problem};
use pzl_core::solver::{Engine, Solver, DEFAULT_NODE_BUDGET};
use pzl_core::Error;

#[derive(Parser)]
#[command(
    name = "pzl",
    version,
    about = "Grid puzzle rules: check, generate, count, present"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a rule and print its diagnostics.
    Check {
        #[command(flatten)]
        rule: RuleArg,
    },
    /// Generate completed boards.
    Gen {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 1)]
        limit: usize,
        #[arg(long, default_value = "constructive")]
        engine: Engine,
        /// Directory to write one JSON file per board into.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count completed boards exactly.
    Count {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        search: SearchArgs,
        /// Stop counting here.
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long, default_value = "exhaustive")]
        engine: Engine,
    },
    /// Build a unique problem from a generated or given completed board.
    Problem {
        #[command(flatten)]
        rule: RuleArg,
        #[command(flatten)]
        search: SearchArgs,
        /// Completed board JSON to mask instead of generating one.
        #[arg(long)]
        board: Option<PathBuf>,
        /// File to write the problem JSON to.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that exactly one completed board extends a problem file.
    Verify {
        #[command(flatten)]
        rule: RuleArg,
        /// Problem JSON file.
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, env = "PZL_NODE_BUDGET", default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
    },
    /// Draw a completed board or problem file.
    Render { file: PathBuf },
    /// Generate boards for a shipped puzzle and check each one against its
    /// classic-rule checker.
    CorpusVerify {
        /// Puzzle name, e.g. `sudoku` or `"Inshi no heya"`.
        name: String,
        /// Grid size; defaults to every size listed for the puzzle.
        #[arg(long)]
        size: Option<GridDims>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, alias = "limit", default_value_t = 5)]
        count: usize,
        #[arg(long, env = "PZL_NODE_BUDGET", default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
    },
}

#[derive(Args)]
struct RuleArg {
    /// Rule file.
    #[arg(required_unless_present = "puzzle", conflicts_with = "puzzle")]
    path: Option<PathBuf>,
    /// Use a shipped rule by name instead of a file.
    #[arg(long)]
    puzzle: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    size: GridDims,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "PZL_NODE_BUDGET", default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
}

/// A failed run: message for stderr and the exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } | Error::Requirements(_) => 3,
            Error::NotUnique { .. } | Error::Unmaskable { .. } | Error::NotPresentable(_) => 1,
            _ => 2,
        };
        Fail(code, e.to_string())
    }
}

type Run = Result<String, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(2, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail(2, format!("cannot write {}: {e}", path.display())))
}

impl RuleArg {
    fn source(&self) -> Result<(String, String), Fail> {
        match (&self.path, &self.puzzle) {
            (Some(p), _) => Ok((p.display().to_string(), read(p)?)),
            (None, Some(name)) => {
                let e = corpus::entry(name)
                    .ok_or_else(|| Fail::from(Error::UnknownPuzzle(name.clone())))?;
                Ok((format!("corpus/{}.rule", e.name), e.source.to_string()))
            }
            (None, None) => Err(Fail(2, "a rule file or --puzzle is required".into())),
        }
    }

    fn load(&self) -> Result<Rule, Fail> {
        let (origin, text) = self.source()?;
        parse_rule(&text).map_err(|d| Fail(2, format!("{origin}: {d}")))
    }
}

fn check(rule: &RuleArg) -> Run {
    let (origin, text) = rule.source()?;
    let diags = check_source(&text);
    let mut out = String::new();
    for d in &diags {
        out.push_str(&format!("{origin}: {d}\n"));
    }
    let errors = diags.iter().filter(|d| d.is_error()).count();
    if errors > 0 {
        eprint!("{out}");
        return Err(Fail(2, format!("{errors} error(s)")));
    }
    let r = parse_rule(&text).map_err(|d| Fail(2, d.to_string()))?;
    out.push_str(&format!(
        "{origin}: ok, puzzle \"{}\", {} structure(s), {} constraint(s), {} warning(s)\n",
        r.name,
        r.structures.len(),
        r.constraints.len(),
        diags.len()
    ));
    Ok(out)
}

fn gen(
    rule: &RuleArg,
    s: &SearchArgs,
    limit: usize,
    engine: Engine,
    out_dir: Option<&Path>,
) -> Run {
    let solver = Solver::from_rule(&rule.load()?, s.size)?;
    let found = match engine {
        Engine::Constructive => solver.generate(s.seed, limit, s.node_budget)?,
        Engine::Exhaustive => solver.enumerate(&Given::default(), limit, s.node_budget)?,
    };
    if found.boards.is_empty() {
        return Err(Fail(
            3,
            format!("no completed board at {} ({} nodes)", s.size, found.nodes),
        ));
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)
            .map_err(|e| Fail(2, format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut out = String::new();
    for (k, b) in found.boards.iter().enumerate() {
        out.push_str(&format!("board {}\n{}", k + 1, render(b)));
        if let Some(dir) = out_dir {
            let path = dir.join(format!("{}-{}-{}-{}.json", b.rule, s.size, s.seed, k + 1));
            write(&path, &(b.to_json_string() + "\n"))?;
        }
    }
    out.push_str(&format!(
        "{} board(s), {} engine, seed {}\n",
        found.boards.len(),
        engine.name(),
        s.seed
    ));
    if found.partial {
        out.push_str(&format!("stopped before reaching {limit}\n"));
    }
    Ok(out)
}

fn count(rule: &RuleArg, s: &SearchArgs, limit: Option<u64>, engine: Engine) -> Run {
    if engine != Engine::Exhaustive {
        return Err(Fail(2, "exact counting needs --engine exhaustive".into()));
    }
    let solver = Solver::from_rule(&rule.load()?, s.size)?;
    let (n, _) = solver.count(&Given::default(), limit.unwrap_or(u64::MAX), s.node_budget)?;
    Ok(format!("{n}\n"))
}

fn problem(rule: &RuleArg, s: &SearchArgs, board: Option<&Path>, out_file: Option<&Path>) -> Run {
    let solver = Solver::from_rule(&rule.load()?, s.size)?;
    let board = match board {
        Some(p) => CompletedBoard::from_json_str(&read(p)?)?,
        None => {
            let found = solver.generate(s.seed, 1, s.node_budget)?;
            found
                .boards
                .into_iter()
                .next()
                .ok_or_else(|| Fail(3, format!("no completed board at {}", s.size)))?
        }
    };
    let p = mask(
        &solver,
        &board,
        s.seed,
        &MaskPolicy::RevealThenThin,
        s.node_budget,
    )?;
    if let Some(path) = out_file {
        write(path, &(p.to_json_string() + "\n"))?;
    }
    let hidden = p
        .elements
        .values()
        .filter(|v| **v == pzl_core::Value::Undecided)
        .count();
    Ok(format!(
        "{}unique, {hidden} value(s) hidden, {} nodes\n",
        render_problem(&p),
        p.certificate.nodes
    ))
}

fn verify(rule: &RuleArg, path: &Path, budget: u64) -> Run {
    let p = Problem::from_json_str(&read(path)?)?;
    let solver = Solver::from_rule(&rule.load()?, p.dims)?;
    if verify_unique(&solver, &p, budget)? {
        Ok("unique\n".into())
    } else {
        Err(Fail(1, "not unique".into()))
    }
}

fn render_file(path: &Path) -> Run {
    let text = read(path)?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    if doc.get("certificate").is_some() {
        Ok(render_problem(&Problem::from_json(&doc)?))
    } else {
        Ok(render(&CompletedBoard::from_json(&doc)?))
    }
}

fn corpus_verify(name: &str, size: Option<GridDims>, seed: u64, count: usize, budget: u64) -> Run {
    let e =
        corpus::entry(name).ok_or_else(|| Fail::from(Error::UnknownPuzzle(name.to_string())))?;
    let sizes = size.map_or_else(|| e.desk.to_vec(), |d| vec![d]);
    let mut out = String::new();
    let (mut failed, mut short) = (0, false);
    for d in sizes {
        let report = corpus::verify(e, d, seed, count, budget)?;
        for (k, (_, verdict)) in report.boards.iter().enumerate() {
            match verdict {
                Ok(()) => out.push_str(&format!("{} {d} board {}: pass\n", e.name, k + 1)),
                Err(why) => out.push_str(&format!("{} {d} board {}: FAIL {why}\n", e.name, k + 1)),
            }
        }
        out.push_str(&format!(
            "{} {d}: {}/{} passed\n",
            e.name,
            report.passed(),
            count
        ));
        failed += report.boards.len() - report.passed();
        short |= report.boards.len() < count;
    }
    if failed > 0 {
        print!("{out}");
        return Err(Fail(
            1,
            format!("{failed} board(s) failed the classic rules"),
        ));
    }
    if short {
        print!("{out}");
        return Err(Fail(3, format!("fewer than {count} boards generated")));
    }
    Ok(out)
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Check { rule } => check(&rule),
        Command::Gen {
            rule,
            search,
            limit,
            engine,
            out,
        } => gen(&rule, &search, limit, engine, out.as_deref()),
        Command::Count {
            rule,
            search,
            limit,
            engine,
        } => count(&rule, &search, limit, engine),
        Command::Problem {
            rule,
            search,
            board,
            out,
        } => problem(&rule, &search, board.as_deref(), out.as_deref()),
        Command::Verify {
            rule,
            problem,
            node_budget,
        } => verify(&rule, &problem, node_budget),
        Command::Render { file } => render_file(&file),
        Command::CorpusVerify {
            name,
            size,
            seed,
            count,
            node_budget,
        } => corpus_verify(&name, size, seed, count, node_budget),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Fail(code, msg)) => {
            eprintln!("pzl: {msg}");
            ExitCode::from(code)
        }
    }
}
