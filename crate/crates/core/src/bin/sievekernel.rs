use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sievekernel::config::{OutputFormat, RunConfig};
use sievekernel::emit::{self, EvalMethod};
use sievekernel::sieve::Eps;
use sievekernel::SieveError;

#[derive(Parser, Debug)]
#[command(name = "sievekernel", version, about = "Linear-sieve function tables and constants")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(long, global = true, env = "SIEVEKERNEL_CONFIG")]
    config: Option<PathBuf>,
    /// Grid density (even, >= 100).
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Sieve parameter as a fraction, e.g. 1/200.
    #[arg(long, global = true)]
    eps: Option<Eps>,
    #[arg(long, global = true)]
    inflation: Option<f64>,
    /// Taylor series degree.
    #[arg(long, global = true)]
    order: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit one of the tables.
    Table {
        #[command(subcommand)]
        which: TableCmd,
    },
    /// Evaluate f_n(s).
    Eval {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: f64,
        #[arg(long, value_enum, default_value = "taylor")]
        method: Method,
    },
    /// Derived constants.
    Constants {
        #[command(subcommand)]
        which: Option<ConstCmd>,
    },
}

#[derive(Subcommand, Debug)]
enum TableCmd {
    /// Certified c_n.
    Cn,
    /// tau_n at the configured eps.
    Tau,
    /// F_1 and f_1 bounds over eps = 1/q.
    EpsScan {
        /// Denominators q, e.g. `63..249` or `80,99,143`.
        #[arg(long, default_value = "63..249")]
        eps_list: String,
    },
}

#[derive(Subcommand, Debug)]
enum ConstCmd {
    /// Correction terms at one s.
    Jr {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Taylor,
    Oracle,
    Majorant,
}

fn exit_code(e: &SieveError) -> u8 {
    match e {
        SieveError::Divergent { .. } => 2,
        SieveError::TailInvalid(_) => 3,
        _ => 1,
    }
}

fn load_config(common: &Common) -> Result<RunConfig, SieveError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            SieveError::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        cfg.merge_text(&text)?;
    }
    if let Some(m) = common.m {
        cfg.m = m;
    }
    if let Some(n) = common.n_max {
        cfg.n_max = n;
    }
    if let Some(eps) = common.eps {
        cfg.eps = eps;
    }
    if let Some(i) = common.inflation {
        cfg.inflation = i;
    }
    if let Some(o) = common.order {
        cfg.taylor_order = o;
    }
    if let Some(f) = common.format {
        cfg.output_format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Markdown => OutputFormat::Markdown,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<String, SieveError> {
    let cfg = load_config(&cli.common)?;
    let artifact = match &cli.command {
        Command::Table { which } => match which {
            TableCmd::Cn => emit::cmd_table_cn(&cfg)?,
            TableCmd::Tau => emit::cmd_table_tau(&cfg)?,
            TableCmd::EpsScan { eps_list } => {
                emit::cmd_eps_scan(&cfg, &emit::parse_eps_list(eps_list)?)?
            }
        },
        Command::Constants { which: None } => emit::cmd_constants(&cfg)?,
        Command::Constants {
            which: Some(ConstCmd::Jr { s }),
        } => emit::cmd_constants_jr(&cfg, *s)?,
        Command::Eval { n, s, method } => {
            let method = match method {
                Method::Taylor => EvalMethod::Taylor,
                Method::Oracle => EvalMethod::Oracle,
                Method::Majorant => EvalMethod::Majorant,
            };
            return Ok(emit::cmd_eval(&cfg, *n, *s, method)?.to_string());
        }
    };
    Ok(artifact.render(cfg.output_format))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let output = match run(&cli) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, output) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{output}"),
    }
    ExitCode::SUCCESS
}
