use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use apfree::construct::{construct_prefix, Source};
use apfree::dyadic::{self, RSequence};
use apfree::emit::{self, Format};
use apfree::onlyif::{self, PartialArrangement, SearchOutcome, DEFAULT_NODE_BUDGET};
use apfree::order::{IsolationCase, DEFAULT_BUDGET};
use apfree::verifier::{self, Strategy, Verdict};
use apfree::{BuiltinOrder, CountableOrder, Error, Rational, SearchBudget};
use clap::{Parser, Subcommand};

const EXIT_USAGE: u8 = 1;
const EXIT_CHAOTIC_ONLY: u8 = 2;
const EXIT_NOT_CHAOTIC: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_INCONCLUSIVE: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "apfree", about = "Orderings without monotone 3-term progressions", disable_version_flag = true)]
struct Cli {
    /// Print the version and the built-in order catalog.
    #[arg(short = 'V', long)]
    version: bool,

    /// Worker threads for verification and search (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build f_depth for a source into an order.
    Construct {
        #[arg(long)]
        source: Source,
        /// Built-in order name or path to a JSON order description.
        #[arg(long, default_value = "q-standard")]
        order: String,
        #[arg(long)]
        depth: usize,
        /// Highest enumeration index a single point search may visit.
        #[arg(long, env = "APFREE_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Write the map here instead of stdout.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Write the per-step audit log (JSON lines) here.
        #[arg(long)]
        audit: Option<PathBuf>,
        #[arg(long, default_value = "tsv")]
        format: Format,
    },
    /// Classify a map as binary, chaotic only, or not chaotic.
    Verify {
        /// Map file, or `-` for stdin.
        #[arg(default_value = "-")]
        input: String,
        /// Read the last column as points of this order instead of ranks.
        #[arg(long)]
        order: Option<String>,
    },
    /// Print the canonical q-sequence.
    Qseq {
        #[arg(long)]
        count: usize,
    },
    /// Print the canonical r-sequence.
    Rseq {
        #[arg(long)]
        count: usize,
    },
    /// Write r as a subset sum of the first `depth` r-terms.
    Decompose {
        #[arg(long, allow_hyphen_values = true)]
        r: Rational,
        #[arg(long)]
        depth: usize,
    },
    /// Search for a chaotic extension of a pattern to {0..max_depth-1}.
    BlockSearch {
        /// Values listed in ascending image order, e.g. "2,3,0,1".
        #[arg(long)]
        pattern: PartialArrangement,
        #[arg(long)]
        max_depth: usize,
        /// Node budget per top-level branch.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        nodes: u64,
    },
    /// Run a construction into an order with isolated points.
    NegativeRun {
        #[arg(long)]
        order: String,
        #[arg(long, default_value = "N")]
        source: Source,
        #[arg(long)]
        depth: usize,
        #[arg(long, env = "APFREE_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Look for an isolated point among the first `sample` enumerated points.
    SearchIsolated {
        #[arg(long)]
        order: String,
        #[arg(long, default_value_t = 64)]
        sample: usize,
        #[arg(long, env = "APFREE_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
}

enum Failure {
    Usage(String),
    Exit(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load_order(name_or_path: &str) -> Result<Arc<CountableOrder>, Failure> {
    if let Ok(order) = CountableOrder::by_name(name_or_path) {
        return Ok(Arc::new(order));
    }
    let path = Path::new(name_or_path);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        return Ok(Arc::new(CountableOrder::from_json(&text)?));
    }
    Err(Error::UnknownOrder(name_or_path.to_string()).into())
}

fn budget(n: usize) -> Result<SearchBudget, Failure> {
    Ok(SearchBudget::new(n)?)
}

fn read_input(input: &str) -> Result<String, Failure> {
    if input == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(fs::read_to_string(input)?)
    }
}

fn catalog() -> String {
    let mut out = format!("apfree {}\nbuilt-in orders:\n", env!("CARGO_PKG_VERSION"));
    for order in BuiltinOrder::ALL {
        out.push_str(&format!("  {:<18}{}\n", order.name(), order.summary()));
    }
    out
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Construct { source, order, depth, budget: b, emit, audit, format } => {
            let order = load_order(&order)?;
            let state = match construct_prefix(source, order, depth, budget(b)?) {
                Ok(state) => state,
                Err(e) => {
                    eprintln!("construct: {e}");
                    return Err(match e.error {
                        Error::BudgetExceeded { .. } => Failure::Exit(EXIT_BUDGET),
                        _ => Failure::Exit(EXIT_USAGE),
                    });
                }
            };
            let text = emit::emit_prefix(&state, format);
            match emit {
                Some(path) => fs::write(path, text)?,
                None => out.write_all(text.as_bytes())?,
            }
            if let Some(path) = audit {
                fs::write(path, emit::emit_audit(&state))?;
            }
        }
        Command::Verify { input, order } => {
            let order = order.as_deref().map(load_order).transpose()?;
            let map = emit::parse_map(&read_input(&input)?, order)?;
            let seq = map.domain_sequence();
            match verifier::classify_sequence(&seq, Strategy::Parallel) {
                Verdict::Binary => writeln!(out, "binary")?,
                Verdict::ChaoticOnly(t) => {
                    writeln!(out, "chaotic-only\t{t}")?;
                    return Err(Failure::Exit(EXIT_CHAOTIC_ONLY));
                }
                Verdict::NotChaotic(t) => {
                    writeln!(out, "not-chaotic\t{t}")?;
                    return Err(Failure::Exit(EXIT_NOT_CHAOTIC));
                }
            }
        }
        Command::Qseq { count } => {
            for term in dyadic::canonical_q_sequence(count)?.terms {
                writeln!(out, "{}", term.value)?;
            }
        }
        Command::Rseq { count } => {
            for r in dyadic::canonical_r_sequence(count)?.prefix(count) {
                writeln!(out, "{r}")?;
            }
        }
        Command::Decompose { r, depth } => {
            let rs: RSequence = dyadic::canonical_r_sequence(depth)?;
            let subset = dyadic::decompose(&r, &rs)?;
            let parts: Vec<String> = subset.iter().map(|i| i.to_string()).collect();
            writeln!(out, "{}", parts.join(","))?;
        }
        Command::BlockSearch { pattern, max_depth, nodes } => {
            let report = onlyif::extension_search(&pattern, max_depth, nodes, Strategy::Parallel)?;
            eprintln!("nodes visited: {}", report.nodes);
            match &report.outcome {
                SearchOutcome::Blocked { depth } => writeln!(out, "blocked\t{depth}")?,
                SearchOutcome::Extended { arrangement } => {
                    let parts: Vec<String> = arrangement.iter().map(|v| v.to_string()).collect();
                    writeln!(out, "extended\t{}", parts.join(","))?;
                }
                SearchOutcome::Inconclusive => {
                    writeln!(out, "inconclusive")?;
                    return Err(Failure::Exit(EXIT_INCONCLUSIVE));
                }
            }
        }
        Command::NegativeRun { order, source, depth, budget: b } => {
            let report = onlyif::negative_isolated_run(load_order(&order)?, source, depth, budget(b)?)?;
            writeln!(out, "{}", serde_json::to_string(&report).expect("serializable"))?;
        }
        Command::SearchIsolated { order, sample, budget: b } => {
            let order = load_order(&order)?;
            match order.search_isolated_point(sample, budget(b)?) {
                None => {
                    writeln!(out, "none")?;
                    return Err(Failure::Exit(EXIT_INCONCLUSIVE));
                }
                Some(w) => {
                    let case = match &w.case {
                        IsolationCase::OnlyBelow { x0 } => format!("only-below\t{x0}"),
                        IsolationCase::OnlyAbove { x0 } => format!("only-above\t{x0}"),
                        IsolationCase::Between { x0, x1 } => format!("between\t{x0}\t{x1}"),
                    };
                    writeln!(out, "{}\t{}\t{case}", w.point, w.index)?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if cli.version {
        print!("{}", catalog());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("no subcommand given; see --help");
        return ExitCode::from(EXIT_USAGE);
    };
    #[cfg(feature = "parallel")]
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(command, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Exit(code)) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
