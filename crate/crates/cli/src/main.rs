//! Exact verification engine for rational Cherednik algebra module theory:
//! configuration, dispatch, and report emission.
//!
//! Exit codes: 0 all checks pass; 1 a theorem check failed; 2 invalid
//! configuration; 3 a configured cap was exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cherednik_dirac::config::{self, CParam, JobConfig, ModuleKind, ModuleSpec, OutputKind, RWindow, Task};

#[derive(Parser)]
#[command(
    name = "cherednik-dirac",
    about = "Exact computations with rational Cherednik algebra modules and their Dirac cohomology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a job from a config file and/or command-line overrides
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON job configuration (flags below override its fields)
    #[arg(long)]
    config: Option<PathBuf>,
    /// task: group-info | cohomology | dirac | hodge | vogan | cells | verify-all
    #[arg(long)]
    task: Option<String>,
    /// group spec, e.g. cyclic:2, dihedral:3, symmetric:4
    #[arg(long)]
    group: Option<String>,
    /// exact t parameter, e.g. "1" or "0"
    #[arg(long)]
    t: Option<String>,
    /// exact c parameter: a single value for all classes ("1/5") or
    /// per-class assignments ("s0=1/5,s1=0")
    #[arg(long)]
    c: Option<String>,
    /// module kind for module tasks: standard | simple | baby-verma | ltriv
    #[arg(long)]
    module_kind: Option<String>,
    /// lowest weight label, e.g. triv
    #[arg(long)]
    sigma: Option<String>,
    /// degree window for graded modules (and the requested filtration for
    /// the vogan task)
    #[arg(long)]
    degree_bound: Option<usize>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    /// filtration cap for the symbolic engine
    #[arg(long)]
    pbw_cap: Option<usize>,
    /// catalog cache directory (defaults to .cherednik-cache)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// include wall-clock timing in the report (off by default so identical
    /// configs emit byte-identical reports)
    #[arg(long, default_value_t = false)]
    emit_timing: bool,
}

fn build_config(args: &RunArgs) -> Result<JobConfig, String> {
    let mut config: JobConfig = match &args.config {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| format!("cannot read config: {}", e))?;
            serde_json::from_slice(&bytes).map_err(|e| format!("bad config JSON: {}", e))?
        }
        None => JobConfig {
            schema: config::CONFIG_SCHEMA.to_string(),
            group: cherednik_core::groups::GroupSpec::Cyclic { m: 2 },
            t: "1".to_string(),
            c: CParam::Constant("0".to_string()),
            task: Task::GroupInfo,
            module: None,
            degree_bound: 8,
            r_window: RWindow::Auto("auto".to_string()),
            output: OutputKind::Text,
            threads: 1,
            caps: Default::default(),
            emit_timing: false,
        },
    };
    if let Some(t) = &args.task {
        config.task = Task::parse(t).ok_or_else(|| format!("unknown task {}", t))?;
    }
    if let Some(g) = &args.group {
        config.group =
            cherednik_core::groups::GroupSpec::parse(g).map_err(|e| e.to_string())?;
    }
    if let Some(t) = &args.t {
        config.t = t.clone();
    }
    if let Some(c) = &args.c {
        if c.contains('=') {
            let mut map = std::collections::BTreeMap::new();
            for part in c.split(',') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| format!("bad c assignment {}", part))?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
            config.c = CParam::PerClass(map);
        } else {
            config.c = CParam::Constant(c.clone());
        }
    }
    if args.module_kind.is_some() || args.sigma.is_some() {
        let kind = match args.module_kind.as_deref() {
            Some("standard") | None => ModuleKind::Standard,
            Some("simple") => ModuleKind::Simple,
            Some("baby-verma") => ModuleKind::BabyVerma,
            Some("ltriv") => ModuleKind::Ltriv,
            Some(other) => return Err(format!("unknown module kind {}", other)),
        };
        config.module = Some(ModuleSpec {
            kind,
            sigma: args.sigma.clone().unwrap_or_else(|| "triv".to_string()),
        });
    }
    if let Some(d) = args.degree_bound {
        config.degree_bound = d;
    }
    if let Some(o) = &args.output {
        config.output = match o.as_str() {
            "text" => OutputKind::Text,
            "json" => OutputKind::Json,
            other => return Err(format!("unknown output kind {}", other)),
        };
    }
    if let Some(n) = args.threads {
        config.threads = n;
    }
    if let Some(cap) = args.pbw_cap {
        config.caps.pbw_degree = cap;
    }
    config.emit_timing |= args.emit_timing;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    let config = match build_config(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("invalid configuration: {}", msg);
            return ExitCode::from(2);
        }
    };
    let output = config.output;
    let threads = config.threads.max(1);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build();
    let run_it = || cherednik_dirac::tasks::run(config.clone(), args.cache_dir.clone());
    let result = match pool {
        Ok(pool) => pool.install(run_it),
        Err(_) => run_it(),
    };
    match result {
        Ok(report) => {
            match output {
                OutputKind::Json => {
                    println!("{}", serde_json::to_string_pretty(&report).unwrap())
                }
                OutputKind::Text => print!("{}", report.to_text()),
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
