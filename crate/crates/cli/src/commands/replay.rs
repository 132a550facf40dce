use std::path::PathBuf;

use clap::Parser;

use super::{execute, Outcome, Status};
use crate::cli::{Cli, Command, ReplayArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

/// `argv` with its `--out` value replaced (or appended).
fn with_out(argv: &[String], out: &std::path::Path) -> Vec<String> {
    let out = out.display().to_string();
    let mut v = Vec::with_capacity(argv.len() + 2);
    let mut replaced = false;
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
            v.extend(["--out".to_string(), out.clone()]);
            replaced = true;
        } else if a.starts_with("--out=") {
            v.push(format!("--out={out}"));
            replaced = true;
        } else {
            v.push(a.clone());
        }
    }
    if !replaced {
        v.extend(["--out".to_string(), out]);
    }
    v
}

pub(super) fn run(args: &ReplayArgs) -> CliResult<Outcome> {
    let original = RunManifest::read(&args.manifest)?;
    let parse = |argv: &[String]| {
        Cli::try_parse_from(std::iter::once("threshrank".to_string()).chain(argv.iter().cloned()))
            .map_err(|e| CliError::Input(format!("manifest arguments do not parse: {e}")))
    };
    let cli = parse(&original.argv)?;
    let orig_out: PathBuf = match cli.command.common() {
        Some(c) => c.out.clone(),
        None => return Err(CliError::Input("cannot replay a replay".into())),
    };
    let out = args.out.clone().unwrap_or_else(|| orig_out.join("replay"));
    let argv = with_out(&original.argv, &out);
    let cmd: Command = parse(&argv)?.command;
    let outcome = execute(cmd, &argv)?;

    let bad = original.metric_mismatches(&outcome.manifest);
    if !bad.is_empty() {
        let detail: Vec<String> = bad
            .iter()
            .map(|k| {
                format!(
                    "{k}: {} vs {}",
                    original.metrics.get(k).map_or("-", String::as_str),
                    outcome.manifest.metrics.get(k).map_or("-", String::as_str)
                )
            })
            .collect();
        return Err(CliError::ReplayMismatch(detail.join("; ")));
    }
    let summary = format!(
        "{}replayed {} into {}: {} summary metrics identical\n",
        outcome.summary,
        original.command,
        out.display(),
        original.metrics.len()
    );
    Ok(Outcome {
        manifest: outcome.manifest,
        status: Status::Success,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_is_replaced_or_appended() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let p = std::path::Path::new("new");
        assert_eq!(with_out(&s(&["lsi", "--out", "old", "--seed", "1"]), p), s(&["lsi", "--out", "new", "--seed", "1"]));
        assert_eq!(with_out(&s(&["lsi", "--out=old"]), p), s(&["lsi", "--out=new"]));
        assert_eq!(with_out(&s(&["lsi"]), p), s(&["lsi", "--out", "new"]));
    }
}
