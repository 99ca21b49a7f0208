mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use tate_core::{Error, ScalarRing};

#[derive(Parser, Debug)]
#[command(
    name = "tate",
    version,
    about = "Exact computations on Laurent-series Tate spaces"
)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// q, fp:<p>, dual:q or dual:fp:<p>
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Absolute precision given to exact inputs that must be inverted.
    #[arg(long, global = true, default_value_t = 16)]
    pub precision: i64,
    /// Window half-width.
    #[arg(long, global = true)]
    pub window: Option<i64>,
    /// Truncation order N of k[x]/(x^N).
    #[arg(long, global = true, default_value_t = 8)]
    pub trunc: i64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// res(f dg) as a coefficient and as a trace of a commutator.
    Residue {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Commutator pairing of two commuting operators (series or JSON matrices).
    Symbol {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Commutator of u and 1 + cεg on R((t))/L_g over the dual numbers.
    Beilinson {
        #[arg(long)]
        u: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "1")]
        c: String,
    },
    /// Class of a dimension torsor on a chart nerve.
    Monodromy(commands::MonodromyArgs),
    /// Window Grassmannian enumeration with Plücker coordinates.
    Grassmann {
        /// Rank n of the ambient k((t))^n.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Dimension of the subspaces; all dimensions if omitted.
        #[arg(long)]
        dim: Option<usize>,
        /// Print every point with its Plücker vector.
        #[arg(long)]
        list: bool,
    },
    /// Annihilator lines in the finite fermion model.
    Fermion {
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// JSON rows spanning a subspace of the window.
        #[arg(long)]
        subspace: Option<String>,
    },
    /// Elementary divisors and relative dimension/determinant of lattices.
    Smith {
        /// JSON matrix whose columns span the lattice.
        #[arg(long)]
        a: String,
        /// Second lattice; the standard lattice if omitted.
        #[arg(long)]
        b: Option<String>,
    },
    /// Lift a coprime factorization over k[x]/(x^N).
    Hensel {
        /// JSON list of coefficients in x, lowest power of λ first.
        #[arg(long)]
        g: Option<String>,
        /// JSON list of scalars: the first residue factor.
        #[arg(long)]
        g0: Option<String>,
        /// JSON list of scalars: the second residue factor.
        #[arg(long)]
        g1: Option<String>,
    },
    /// Lift an idempotent modulo x to k[x]/(x^N).
    Idempotent {
        /// JSON matrix with entries in x.
        #[arg(long)]
        pi: Option<String>,
    },
    /// Elementary factorization of diag(t, t⁻¹) and its interpolation.
    Whitehead,
    /// Topological nilpotence and the rank dim L/TL.
    Rank {
        /// JSON matrix.
        #[arg(long)]
        t: String,
    },
    /// Run the acceptance property suite.
    Selftest {
        /// Comma-separated criterion numbers; all if omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

/// Result of a command: text lines, structured fields, and whether a checked
/// property held.
pub struct Report {
    pub lines: Vec<String>,
    pub data: Map<String, Value>,
    pub violation: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut data = Map::new();
        data.insert("command".into(), command.into());
        Report {
            lines: Vec::new(),
            data,
            violation: None,
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.data.insert(key.into(), v.into());
    }

    pub fn violate(&mut self, why: impl Into<String>) {
        self.violation.get_or_insert(why.into());
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Input(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(e) if e.is_precision() => 4,
            CliError::Core(Error::Parse(_)) => 2,
            CliError::Core(Error::Property(_) | Error::Unstable(_)) => 5,
            CliError::Core(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self.code() {
            2 => "parse",
            4 => "precision",
            5 => "property",
            _ => "precondition",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(s) => write!(f, "{s}"),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl Options {
    pub fn ring(&self, default: &str) -> CliResult<ScalarRing> {
        Ok(self.field.as_deref().unwrap_or(default).parse()?)
    }
}

fn dispatch(cli: &Cli) -> CliResult<Report> {
    let o = &cli.opts;
    match &cli.command {
        Command::Residue { f, g } => commands::residue(o, f, g),
        Command::Symbol { f, g } => commands::symbol(o, f, g),
        Command::Beilinson { u, g, c } => commands::beilinson(o, u, g, c),
        Command::Monodromy(args) => commands::monodromy(o, args),
        Command::Grassmann { n, dim, list } => commands::grassmann(o, *n, *dim, *list),
        Command::Fermion { n, subspace } => commands::fermion(o, *n, subspace.as_deref()),
        Command::Smith { a, b } => commands::smith(o, a, b.as_deref()),
        Command::Hensel { g, g0, g1 } => {
            commands::hensel(o, g.as_deref(), g0.as_deref(), g1.as_deref())
        }
        Command::Idempotent { pi } => commands::idempotent(o, pi.as_deref()),
        Command::Whitehead => commands::whitehead(o),
        Command::Rank { t } => commands::rank(o, t),
        Command::Selftest { only } => commands::selftest(o, only),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let structured = cli.opts.format == Format::Structured;
    match dispatch(&cli) {
        Ok(mut rep) => {
            let ok = rep.violation.is_none();
            if structured {
                rep.set("status", if ok { "ok" } else { "violation" });
                if let Some(v) = rep.violation.clone() {
                    rep.set("violation", v);
                }
                println!(
                    "{}",
                    serde_json::to_string_pretty(&Value::Object(rep.data)).expect("json")
                );
            } else {
                for l in &rep.lines {
                    println!("{l}");
                }
                if let Some(v) = &rep.violation {
                    println!("VIOLATION: {v}");
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(5)
            }
        }
        Err(e) => {
            if structured {
                let v = serde_json::json!({
                    "command": format!("{:?}", cli.command).split([' ', '{', '(']).next().unwrap_or("").to_lowercase(),
                    "status": "error",
                    "kind": e.kind(),
                    "message": e.to_string(),
                });
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            }
            eprintln!("error ({}): {e}", e.kind());
            ExitCode::from(e.code())
        }
    }
}
