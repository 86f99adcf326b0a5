use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tsa_bench::spec::{KeyValues, CLIENT_KEYS, CONTRACT_KEYS};
use tsa_bench::{gen_client, gen_contract, geomean_speedup, parse_matrix, run_bench, ClientSpec, ContractSpec};
use tsa_core::analysis::analyze_program;
use tsa_core::automata::{expand_dfa, minimize_dfa, DEFAULT_STATE_LIMIT};
use tsa_core::contracts::{subsumes, ContractMap, Polarity, SubsumptionVerdict};
use tsa_core::frontend::{parse_sources, Program};

#[derive(Parser)]
#[command(name = "tsa", version, about = "Typestate checking with bit-vector contracts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Contract,
    Client,
}

#[derive(Subcommand)]
enum Command {
    /// Report calls that may violate a contract.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the explicit DFA of the single base class in a file.
    ExpandDfa {
        file: PathBuf,
        #[arg(long)]
        minimize: bool,
        #[arg(long, default_value_t = DEFAULT_STATE_LIMIT)]
        state_limit: usize,
    },
    /// Does the first contract subsume the second, method by method?
    Subsume { sub: PathBuf, sup: PathBuf },
    /// Generate a contract or a client program from key=value settings.
    Gen {
        kind: GenKind,
        settings: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Insert one violation into the client and report its line.
        #[arg(long)]
        inject_bug: bool,
    },
    /// Time both analyzers over a matrix file and write CSV.
    Bench {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failure that maps to exit code 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Fatal> {
    fs::read_to_string(path).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn load(files: &[PathBuf]) -> Result<Program, Fatal> {
    let sources = files
        .iter()
        .map(|f| Ok((f.display().to_string(), read(f)?)))
        .collect::<Result<Vec<_>, Fatal>>()?;
    Ok(parse_sources(&sources)?)
}

fn single_contract(file: &Path) -> Result<ContractMap, Fatal> {
    let program = load(&[file.to_path_buf()])?;
    let mut contracts = program.contracts.into_values();
    match (contracts.next(), contracts.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Fatal(format!("{}: expected exactly one base class", file.display()))),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Fatal> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Fatal(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Fatal> {
    match cli.command {
        Command::Check { files, format } => {
            let program = load(&files)?;
            let warnings = analyze_program(&program)?;
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for w in &warnings {
                match format {
                    Format::Text => writeln!(out, "{w}")?,
                    Format::Json => writeln!(out, "{}", serde_json::to_string(w)?)?,
                }
            }
            Ok(u8::from(!warnings.is_empty()))
        }
        Command::ExpandDfa {
            file,
            minimize,
            state_limit,
        } => {
            let contract = single_contract(&file)?;
            let dfa = expand_dfa(&contract, state_limit)?;
            let dfa = if minimize { minimize_dfa(&dfa) } else { dfa };
            print!("{}", dfa.dump());
            Ok(0)
        }
        Command::Subsume { sub, sup } => {
            let a = single_contract(&sub)?;
            let b = single_contract(&sup)?;
            match subsumes(&a, &b, Polarity::Refinement)? {
                SubsumptionVerdict::Subsumes => {
                    println!("subsumes");
                    Ok(0)
                }
                SubsumptionVerdict::DoesNotSubsume { first_failing } => {
                    println!("does-not-subsume: {first_failing}");
                    Ok(1)
                }
            }
        }
        Command::Gen {
            kind,
            settings,
            out,
            inject_bug,
        } => {
            let kv = KeyValues::parse_tokens(settings.iter().map(String::as_str), 1)?;
            match kind {
                GenKind::Contract => {
                    let mut known = CONTRACT_KEYS.to_vec();
                    known.push("name");
                    kv.check_keys(&known)?;
                    let spec = ContractSpec::from_kv(&kv)?;
                    let g = gen_contract(&spec, kv.get_str("name").unwrap_or("C"))?;
                    emit(&out, &g.text)?;
                    let states = g.states_min.map_or("over the state limit".to_string(), |s| s.to_string());
                    eprintln!("annotation terms: {}, minimized states: {states}", g.annotation_terms);
                }
                GenKind::Client => {
                    let known: Vec<&str> = CONTRACT_KEYS.iter().chain(CLIENT_KEYS).copied().collect();
                    kv.check_keys(&known)?;
                    let contract = ContractSpec::from_kv(&kv)?;
                    let mut client = ClientSpec::from_kv(&kv)?;
                    client.inject_bug |= inject_bug;
                    let contracts = (0..client.num_base_classes)
                        .map(|i| gen_contract(&contract, &format!("B{i}")))
                        .collect::<Result<Vec<_>, _>>()?;
                    let c = gen_client(&client, &contracts)?;
                    emit(&out, &c.program_text(&contracts))?;
                    eprintln!("client lines: {}", c.loc);
                    if let Some(line) = c.bug_site(&contracts) {
                        eprintln!("injected violation at line {line}");
                    }
                }
            }
            Ok(0)
        }
        Command::Bench { matrix, out } => {
            let cells = parse_matrix(&read(&matrix)?)?;
            let report = run_bench(&cells)?;
            let file = fs::File::create(&out).map_err(|e| Fatal(format!("{}: {e}", out.display())))?;
            report.write_csv(file)?;
            print!("{}", report.usability_table());
            if let Some(g) = geomean_speedup(&report) {
                println!("geometric-mean speedup (dfa/bfa): {g:.2}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
