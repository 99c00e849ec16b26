mod args;
mod commands;
mod config;
mod error;
mod figures;
mod run;


use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{exit, CliError, CliResult};
use crate::run::{Run, RunManifest};

const JOBS_ENV: &str = "VDP_JOBS";

fn resolve_jobs(flag: Option<usize>) -> CliResult<usize> {
    let jobs = match flag {
        Some(n) => n,
        None => match std::env::var(JOBS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| CliError::usage(format!("{JOBS_ENV}={v:?} is not a count")))?,
            Err(_) => vdp_core::default_jobs(),
        },
    };
    if jobs == 0 {
        return Err(CliError::usage("--jobs must be >= 1"));
    }
    Ok(jobs)
}

/// Subcommand argv without the program name and global options, which do
/// not affect the outputs' contents.
fn subcommand_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if matches!(a.as_str(), "--out" | "--jobs" | "--config") {
            it.next();
        } else if !["--out=", "--jobs=", "--config="].iter().any(|p| a.starts_with(p)) {
            out.push(a.clone());
        }
    }
    out
}

fn dispatch(argv: Vec<String>, depth: usize) -> CliResult<()> {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => return Err(CliError::usage(e.render().to_string().trim_end())),
    };
    let jobs = resolve_jobs(cli.jobs)?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::Figure(f) if f.list => {
            figures::list();
            Ok(())
        }
        Command::Figure(f) => {
            let name = f.name.as_deref().unwrap_or_default();
            let fig = figures::find(name)?;
            let mut run = Run::new(out, jobs, vec!["figure".into(), name.into()])?;
            figures::regenerate(fig, &mut run)?;
            run.finish(name)
        }
        Command::Replay(r) => {
            if depth > 0 {
                return Err(CliError::usage("a manifest cannot replay another replay"));
            }
            let manifest = RunManifest::read(&r.manifest)?;
            let mut next = vec![argv[0].clone(), "--out".into(), out.display().to_string()];
            next.push("--jobs".into());
            next.push(jobs.to_string());
            next.extend(manifest.args);
            dispatch(next, depth + 1)
        }
        cmd => {
            let tag = cmd.tag().unwrap_or("run").to_string();
            let mut run = Run::new(out, jobs, subcommand_args(&argv))?;
            commands::execute(cmd, &mut run)?;
            run.finish(&tag)
        }
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let result = config::merge_config(argv).and_then(|argv| dispatch(argv, 0));
    let code = match result {
        Ok(()) => exit::OK,
        Err(e) => {
            match &e {
                CliError::Usage(msg) if msg.starts_with("error:") => eprintln!("{msg}"),
                _ => eprintln!("error: {e}"),
            }
            e.exit_code()
        }
    };
    std::process::exit(code);
}
