use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use lexmerge::logic::{self, Vocabulary};
use lexmerge::postulates::{run_audit, AuditConfig, PostulateId};
use lexmerge::reductions::{self, BaseReading, ClassicalProfile};
use lexmerge::report::{merge_problem, render_result, Method, OutputFormat};
use lexmerge::semantic::models_to_formula;
use lexmerge::syntactic::merge_syntactic;
use lexmerge::syntax::{parse_formula, parse_problem, Problem};
use lexmerge::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INCONSISTENT: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;
const EXIT_NOT_ENTAILED: u8 = 4;
const EXIT_DISAGREE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "lexmerge",
    version,
    about = "Lexicographic merging of possibilistic knowledge bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Merge the bases of a problem file under its constraint.
    Merge {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Syntactic)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Models)]
        output: FormatArg,
        /// Print the level-by-level trace before the result.
        #[arg(long)]
        trace: bool,
        /// Largest vocabulary to enumerate.
        #[arg(long, default_value_t = logic::DEFAULT_VARS_CAP)]
        vars_cap: usize,
    },
    /// Exit 0 iff the merged base entails the query.
    Entails {
        file: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = logic::DEFAULT_VARS_CAP)]
        vars_cap: usize,
    },
    /// Apply a classical merging operator; every weight must be 1.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        operator: Operator,
        /// How a multi-formula base enters the C4 operator.
        #[arg(long, value_enum, default_value_t = ReadingArg::Conjunctive)]
        reading: ReadingArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Models)]
        output: FormatArg,
        #[arg(long, default_value_t = logic::DEFAULT_VARS_CAP)]
        vars_cap: usize,
    },
    /// Check the rationality postulates on seeded random instances.
    Postulates {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Comma-separated postulate ids, e.g. P1,P9,IC4.
        #[arg(long, value_delimiter = ',')]
        ids: Option<Vec<PostulateId>>,
        /// Generator overrides, e.g. `atoms=5,bases=2..4,formulas=1..3,depth=2,bias=0.9`.
        #[arg(long)]
        params: Option<String>,
        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Semantic,
    Syntactic,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Models,
    Formula,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Operator {
    C4,
    Gmin,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReadingArg {
    Conjunctive,
    FormulaSet,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Semantic => Method::Semantic,
            MethodArg::Syntactic => Method::Syntactic,
            MethodArg::Both => Method::Both,
        }
    }
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Models => OutputFormat::Models,
            FormatArg::Formula => OutputFormat::Formula,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

impl From<ReadingArg> for BaseReading {
    fn from(r: ReadingArg) -> Self {
        match r {
            ReadingArg::Conjunctive => BaseReading::Conjunctive,
            ReadingArg::FormulaSet => BaseReading::FormulaSet,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let disagree = e.chain().any(|c| {
                matches!(
                    c.downcast_ref::<Error>(),
                    Some(Error::MethodsDisagree { .. })
                )
            });
            ExitCode::from(if disagree { EXIT_DISAGREE } else { EXIT_USAGE })
        }
    }
}

fn load(path: &Path, vars_cap: usize) -> anyhow::Result<Problem> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut problem =
        parse_problem(&text).with_context(|| format!("parsing {}", path.display()))?;
    problem.vocabulary = problem.vocabulary.with_cap(vars_cap);
    Ok(problem)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Merge {
            file,
            method,
            output,
            trace,
            vars_cap,
        } => {
            let problem = load(&file, vars_cap)?;
            let result = merge_problem(&problem, method.into())?;
            print!("{}", render_result(&problem, &result, output.into(), trace));
            Ok(if result.is_consistent() {
                0
            } else {
                EXIT_INCONSISTENT
            })
        }
        Command::Entails {
            file,
            query,
            vars_cap,
        } => {
            let problem = load(&file, vars_cap)?;
            let query = parse_formula(&query).context("parsing query")?;
            let (merged, _) =
                merge_syntactic(&problem.profile, &problem.constraint, &problem.vocabulary)?;
            let v = query
                .atoms()
                .into_iter()
                .fold(problem.vocabulary.clone(), |v, a| v.extended(a));
            let entailed = logic::entails([&merged], &query, &v)?;
            println!("{entailed}");
            Ok(if entailed { 0 } else { EXIT_NOT_ENTAILED })
        }
        Command::Reduce {
            file,
            operator,
            reading,
            output,
            vars_cap,
        } => {
            let problem = load(&file, vars_cap)?;
            let v: &Vocabulary = &problem.vocabulary;
            let e = ClassicalProfile::from_profile(&problem.profile)?;
            let (models, formula) = match operator {
                Operator::Gmin => {
                    let models = reductions::merge_gmin(&e, &problem.constraint, v)?;
                    let formula = models_to_formula(&models, v);
                    (models, formula)
                }
                Operator::C4 => {
                    let formula = reductions::merge_c4(&e, &problem.constraint, v, reading.into())?;
                    (logic::enumerate_models(&formula, v)?, formula)
                }
            };
            match output {
                FormatArg::Models => {
                    for m in &models {
                        println!("{m}");
                    }
                }
                FormatArg::Formula => println!("{formula}"),
                FormatArg::Json => {
                    let doc = serde_json::json!({
                        "operator": match operator { Operator::C4 => "c4", Operator::Gmin => "gmin" },
                        "vocabulary": v.atoms().iter().map(|a| a.name()).collect::<Vec<_>>(),
                        "models": models.iter().map(|m| m.bitstring()).collect::<Vec<_>>(),
                        "formula": formula.to_string(),
                    });
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
            }
            Ok(if models.is_empty() {
                EXIT_INCONSISTENT
            } else {
                0
            })
        }
        Command::Postulates {
            seed,
            trials,
            ids,
            params,
            report,
        } => {
            let mut config = AuditConfig::new(seed, trials);
            config.params.seed = seed;
            if let Some(ids) = ids {
                if ids.is_empty() {
                    bail!("--ids needs at least one postulate");
                }
                config.ids = ids;
            }
            if let Some(overrides) = params {
                config
                    .params
                    .apply_overrides(&overrides)
                    .map_err(anyhow::Error::msg)?;
            }
            let audit = run_audit(&config);
            println!("{:<5} {:>6} {:>6} {:>6}", "id", "pass", "fail", "n/a");
            for s in &audit.summary {
                let id = s.id.map(|i| i.to_string()).unwrap_or_default();
                println!(
                    "{id:<5} {:>6} {:>6} {:>6}",
                    s.passed, s.failed, s.not_applicable
                );
            }
            for f in &audit.failures {
                if let lexmerge::postulates::Outcome::Fail { counterexample } = &f.outcome {
                    eprintln!(
                        "{} failed on {}: {}",
                        f.id, f.instance, counterexample.reason
                    );
                }
            }
            if let Some(path) = report {
                let text = serde_json::to_string_pretty(&audit)?;
                std::fs::write(&path, text + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(if audit.all_passed() {
                0
            } else {
                EXIT_COUNTEREXAMPLE
            })
        }
    }
}
