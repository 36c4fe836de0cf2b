use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use duality_lab::config::{ConfigBuilder, Kind, Origin};
use duality_lab::output::{emit_csv, emit_json, error_summary, failure_summary, report};
use duality_lab::run_experiment;

#[derive(Debug, Parser)]
#[command(name = "duality-lab", version, about = "Wave-particle duality experiments with a quantum path detector")]
struct Args {
    /// duality, conditioned, mixed, qbs, bbs, qbs-conditioned, expand or verify
    kind: Kind,

    /// key=value experiment file
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override one config entry; may be repeated
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,

    /// Write the CSV here instead of standard output
    #[arg(long, value_name = "FILE.csv")]
    out: Option<PathBuf>,

    /// Print the full result as JSON on standard output
    #[arg(long)]
    json: bool,

    /// Print a readable table and check summary on standard output
    #[arg(long)]
    report: bool,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    samples: Option<usize>,
}

fn fail(message: &str) -> ExitCode {
    eprintln!("{}", error_summary(message));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();

    let mut builder = ConfigBuilder::new();
    if let Some(path) = &args.config {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(&format!("{}: {e}", path.display())),
        };
        if let Err(e) = builder.apply_text(&text) {
            return fail(&format!("{}: {e}", path.display()));
        }
    }
    for (k, line) in args.sets.iter().enumerate() {
        if let Err(e) = builder.set_line(line, Origin::Set(k + 1)) {
            return fail(&e.to_string());
        }
    }
    let flags = [("seed", args.seed.map(|s| s.to_string())), ("samples", args.samples.map(|s| s.to_string()))];
    for (key, value) in flags {
        if let Some(v) = value {
            builder.set(key, &v, Origin::Flag(key)).expect("known key");
        }
    }
    let spec = match builder.build(Some(args.kind)) {
        Ok(s) => s,
        Err(e) => return fail(&e.to_string()),
    };

    let result = match run_experiment(&spec) {
        Ok(r) => r,
        Err(e) => return fail(&e.to_string()),
    };

    let written = (|| -> io::Result<()> {
        let stdout = io::stdout();
        let mut stdout = stdout.lock();
        match &args.out {
            Some(path) => emit_csv(&result, &mut BufWriter::new(File::create(path)?))?,
            None if !args.json && !args.report => emit_csv(&result, &mut stdout)?,
            None => {}
        }
        if args.report {
            stdout.write_all(report(&result).as_bytes())?;
        }
        if args.json {
            emit_json(&result, &mut stdout)?;
        }
        Ok(())
    })();
    if let Err(e) = written {
        return fail(&format!("write failed: {e}"));
    }

    if result.passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("{}", failure_summary(&result));
        ExitCode::FAILURE
    }
}
