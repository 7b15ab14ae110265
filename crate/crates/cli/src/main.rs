use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qclab_cli::{run, CliError, Config};

/// Reproduce the cloning, attack and PUF experiments.
///
/// Parameters can come from a flat key=value file given with --config; flags win over the file.
#[derive(Parser, Debug)]
#[command(name = "qclab", version)]
struct Args {
    /// Experiment id (also accepted as --experiment).
    id: Option<String>,
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory for CSV and log artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Exit with status 3 when a reference target is missed.
    #[arg(long)]
    check: bool,
    /// Extra parameter as key=value; may repeat.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    params: Params,
}

macro_rules! params {
    ($($field:ident => $name:literal),* $(,)?) => {
        #[derive(clap::Args, Debug)]
        struct Params {
            $(#[arg(long = $name, allow_hyphen_values = true)] $field: Option<String>,)*
        }

        impl Params {
            fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut v = Vec::new();
                $(if let Some(x) = &self.$field { v.push(($name, x.as_str())); })*
                v
            }
        }
    };
}

params! {
    family => "family", m_in => "M", n_out => "N", s => "s", phi => "phi", figure => "figure",
    alpha => "alpha", dim => "dim", cost => "cost", restarts => "restarts", iters => "iters",
    lr => "lr", layers => "layers", connectivity => "connectivity", sweeps => "sweeps",
    cloner => "cloner", eta => "eta", view => "view", ensemble => "ensemble",
    protocol => "protocol", model => "model", copies => "copies", scheme => "scheme",
    test => "test", adversary => "adversary", span => "span", p => "p", delta_er => "delta_er",
    m_half => "m", q => "q", p_classic => "p_classic",
}

fn config(args: &Args) -> Result<Config, CliError> {
    let mut cfg = match &args.config {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    if let (Some(a), Some(b)) = (&args.id, &args.experiment) {
        if a != b {
            return Err(CliError::Config(format!("experiment given twice: '{a}' and '{b}'")));
        }
    }
    if let Some(id) = args.id.as_ref().or(args.experiment.as_ref()) {
        cfg.set("experiment", id.as_str());
    }
    if let Some(s) = &args.seed {
        cfg.set("seed", s.as_str());
    }
    if let Some(o) = &args.out {
        cfg.set("out", o.to_string_lossy());
    }
    if let Some(t) = &args.trials {
        cfg.set("trials", t.as_str());
    }
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Config(format!("--set expects key=value, got '{kv}'")))?;
        cfg.set(k.trim(), v.trim());
    }
    for (k, v) in args.params.pairs() {
        cfg.set(k, v);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match config(&args).and_then(|cfg| run(&cfg)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("qclab: {e}");
            return e.exit_code();
        }
    };
    print!("{}", outcome.summary());
    let misses = outcome.misses();
    if args.check && misses > 0 {
        eprintln!("qclab: {misses} reference target(s) missed");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
