//! `--config` files: one `key = value` per line, `#` comments. Keys are flag
//! names without dashes (`a`, `omega`, `t-max`, …). Entries are spliced in
//! front of the command-line flags, so explicit flags still win.

use std::path::Path;

use clap::CommandFactory;

use crate::args::Cli;
use crate::error::{CliError, CliResult};

/// Global options taking a value; needed to locate the subcommand in argv.
const GLOBAL_WITH_VALUE: [&str; 3] = ["--out", "--jobs", "--config"];

pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().trim_start_matches('-');
        if key.is_empty() {
            return Err(CliError::usage(format!("config line {}: empty key", i + 1)));
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn entry_tokens((key, value): &(String, String)) -> Vec<String> {
    let flag = if key.len() == 1 { format!("-{key}") } else { format!("--{key}") };
    match value.as_str() {
        "true" => vec![flag],
        "false" => vec![],
        _ => vec![flag, value.clone()],
    }
}

fn config_path(argv: &[String]) -> Option<String> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    })
}

/// Index of the subcommand name in `argv`.
pub fn subcommand_index(argv: &[String]) -> Option<usize> {
    let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if GLOBAL_WITH_VALUE.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if names.contains(a) {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// `argv` with any config entries inserted after the subcommand name.
pub fn merge_config(argv: Vec<String>) -> CliResult<Vec<String>> {
    let Some(path) = config_path(&argv) else { return Ok(argv) };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| CliError::file(&path, e))?;
    let tokens: Vec<String> = parse_config(&text)?.iter().flat_map(entry_tokens).collect();
    let Some(at) = subcommand_index(&argv) else { return Ok(argv) };
    let mut merged = argv[..=at].to_vec();
    merged.extend(tokens);
    merged.extend_from_slice(&argv[at + 1..]);
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(args: &[&str]) -> Vec<String> {
        args.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_comments_and_flags() {
        let e = parse_config("# preset\na = 5\nomega=7 # forcing\n\ncontinuation = true\n").unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(entry_tokens(&e[0]), v(&["-a", "5"]));
        assert_eq!(entry_tokens(&e[1]), v(&["--omega", "7"]));
        assert_eq!(entry_tokens(&e[2]), v(&["--continuation"]));
        assert!(parse_config("just words").is_err());
    }

    #[test]
    fn finds_subcommand_after_global_values() {
        assert_eq!(subcommand_index(&v(&["vdp-lab", "--out", "simulate", "simulate", "-a", "1"])), Some(3));
        assert_eq!(subcommand_index(&v(&["vdp-lab", "--jobs", "2"])), None);
    }
}
