//! Batch driver for scenario files.
//!
//! Exit status: 0 when every declared threshold passes, 1 when any fails or a
//! run errors, 2 on usage, parse or precondition errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use vortex_patch::harness::{compare_with_golden, run, write_run, Module, RunReport, Scenario};

#[derive(Parser)]
#[command(name = "vortex-patch", version, about = "Vortex patch numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file; repeat to run several.
    #[arg(long = "scenario", value_name = "FILE")]
    scenarios: Vec<PathBuf>,
    /// Output root; each scenario writes into `<out>/<name>`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Independent scenarios to run at once.
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
    /// Replace a scenario value, `section.key=value`; repeatable.
    #[arg(long = "resolution-override", value_name = "K=V")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Contour dynamics of a 2-D patch.
    Simulate2d(Common),
    /// Biharmonic flattening maps of a contour.
    Flatten(Common),
    /// Two-phase elliptic interface problems and rate studies.
    SolveElliptic {
        #[command(flatten)]
        common: Common,
        /// Bare problem file (the fields of a `[twophase]` table).
        #[arg(long, value_name = "FILE")]
        problem: Option<PathBuf>,
        /// Mesh sizes, comma separated, coarse to fine.
        #[arg(long, value_name = "LIST", value_delimiter = ',')]
        h: Option<Vec<f64>>,
    },
    /// Lagrangian fixed-point iteration for a 3-D patch.
    Evolve3d(Common),
    /// Run scenarios of any module, or summarise existing reports under `--out`.
    Report {
        #[command(flatten)]
        common: Common,
        /// Compare the written outputs byte for byte with `<golden>/<name>`.
        #[arg(long, value_name = "DIR")]
        golden: Option<PathBuf>,
    },
}

const DEFAULT_OUT: &str = "out";

struct Loaded {
    scenario: Scenario,
    base: PathBuf,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load(path: &Path, overrides: &[String], module: Option<Module>) -> Result<Loaded, String> {
    let scenario = Scenario::load(path, overrides).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(m) = module {
        if scenario.module != m {
            return Err(format!(
                "{}: scenario targets module {}, this command runs {}",
                path.display(),
                scenario.module.name(),
                m.name()
            ));
        }
    }
    scenario.validate().map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(Loaded {
        scenario,
        base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
    })
}

fn output_dir(common: &Common, s: &Scenario) -> PathBuf {
    let root = common.out.clone().or_else(|| s.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    root.join(&s.name)
}

/// Runs every scenario and writes its outputs. `Err` is a run failure.
fn execute(common: &Common, loaded: &[Loaded]) -> Vec<Result<(RunReport, PathBuf), String>> {
    let one = |l: &Loaded| -> Result<(RunReport, PathBuf), String> {
        let out = run(&l.scenario, &l.base).map_err(|e| format!("{}: {e}", l.scenario.name))?;
        let dir = output_dir(common, &l.scenario);
        write_run(&dir, &out).map_err(|e| format!("{}: writing {}: {e}", l.scenario.name, dir.display()))?;
        Ok((out.report, dir))
    };
    if common.jobs > 1 && loaded.len() > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(common.jobs).build() {
            Ok(pool) => pool.install(|| loaded.par_iter().map(one).collect()),
            Err(_) => loaded.iter().map(one).collect(),
        }
    } else {
        loaded.iter().map(one).collect()
    }
}

fn finish(results: Vec<Result<(RunReport, PathBuf), String>>, golden: Option<&Path>) -> ExitCode {
    let mut ok = true;
    for r in results {
        match r {
            Ok((report, dir)) => {
                print!("{}", report.summary());
                println!("  outputs: {}", dir.display());
                ok &= report.passed;
                if let Some(g) = golden {
                    match compare_with_golden(&dir, &g.join(&report.scenario.name)) {
                        Ok(diff) if diff.is_empty() => println!("  golden: identical"),
                        Ok(diff) => {
                            ok = false;
                            for d in diff {
                                println!("  golden: differs {}", d.display());
                            }
                        }
                        Err(e) => {
                            ok = false;
                            println!("  golden: {e}");
                        }
                    }
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ok = false;
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_module(common: &Common, module: Option<Module>, golden: Option<&Path>) -> ExitCode {
    if common.scenarios.is_empty() {
        return usage_error("at least one --scenario is required");
    }
    let mut loaded = Vec::new();
    for p in &common.scenarios {
        match load(p, &common.overrides, module) {
            Ok(l) => loaded.push(l),
            Err(e) => return usage_error(e),
        }
    }
    finish(execute(common, &loaded), golden)
}

fn solve_elliptic(common: &Common, problem: Option<&Path>, h: Option<&[f64]>) -> ExitCode {
    let Some(path) = problem else {
        let mut common = common.clone();
        if let Some(h) = h {
            let list: Vec<String> = h.iter().map(|v| format!("{v:?}")).collect();
            common.overrides.push(format!("twophase.hs=[{}]", list.join(",")));
        }
        return run_module(&common, Some(Module::Twophase), None);
    };
    if !common.scenarios.is_empty() {
        return usage_error("give either --problem or --scenario, not both");
    }
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return usage_error(format!("{}: {e}", path.display())),
    };
    let name = path.file_stem().map_or("problem".into(), |s| s.to_string_lossy().into_owned());
    let scenario = match Scenario::from_problem(&text, &name, h, &common.overrides).and_then(|s| s.validate().map(|_| s)) {
        Ok(s) => s,
        Err(e) => return usage_error(format!("{}: {e}", path.display())),
    };
    let loaded = [Loaded {
        scenario,
        base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
    }];
    finish(execute(common, &loaded), None)
}

/// Prints the stored reports under the output root.
fn summarise(common: &Common) -> ExitCode {
    let root = common.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut dirs: Vec<PathBuf> = match std::fs::read_dir(&root) {
        Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.join("report.json").is_file()).collect(),
        Err(e) => return usage_error(format!("{}: {e}", root.display())),
    };
    dirs.sort();
    if dirs.is_empty() {
        return usage_error(format!("no reports under {}", root.display()));
    }
    let mut ok = true;
    for d in dirs {
        let text = match std::fs::read_to_string(d.join("report.json")) {
            Ok(t) => t,
            Err(e) => return usage_error(format!("{}: {e}", d.display())),
        };
        match serde_json::from_str::<RunReport>(&text) {
            Ok(r) => {
                print!("{}", r.summary());
                ok &= r.passed;
            }
            Err(e) => return usage_error(format!("{}: {e}", d.join("report.json").display())),
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match &cli.command {
        Command::Simulate2d(c) => run_module(c, Some(Module::Contour2d), None),
        Command::Flatten(c) => run_module(c, Some(Module::Flatten), None),
        Command::SolveElliptic { common, problem, h } => solve_elliptic(common, problem.as_deref(), h.as_deref()),
        Command::Evolve3d(c) => run_module(c, Some(Module::Lagrangian3d), None),
        Command::Report { common, golden } => {
            if common.scenarios.is_empty() {
                summarise(common)
            } else {
                run_module(common, None, golden.as_deref())
            }
        }
    }
}
