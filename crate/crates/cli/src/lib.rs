//! Command-line front end: argument handling, run manifests and output files.

pub mod args;
mod commands;
pub mod manifest;
pub mod run_config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

use args::{Cli, Command};
use manifest::{sha256_hex, InputRecord, Manifest, OutputRecord, Tables, MANIFEST_FILE};
use run_config::{read_named, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

pub const THREADS_ENV: &str = "PROXYLAB_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Data(m) => m,
        }
    }
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV}=`{v}` is not a positive integer"))),
        },
    }
}

fn write_outputs(out_dir: &Path, manifest: &mut Manifest, outputs: Vec<commands::Output>) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Data(format!("cannot create output directory {}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    let mut write = |name: &str, bytes: &[u8]| -> Result<(), CliError> {
        let path = out_dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
        Ok(())
    };
    for o in &outputs {
        write(&o.name, &o.bytes)?;
        manifest.outputs.push(OutputRecord {
            file: o.name.clone(),
            sha256: sha256_hex(&o.bytes),
        });
    }
    write(MANIFEST_FILE, manifest.to_json().as_bytes())?;
    Ok(written)
}

fn perform(run: RunConfig, input: Option<(String, Vec<u8>)>, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let threads = threads_from_env()?;
    let outputs = commands::execute(&run, input.as_ref().map(|(_, b)| b.as_slice()), threads)?;
    let mut manifest = Manifest {
        tool: "proxylab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        input: input.as_ref().map(|(path, bytes)| InputRecord {
            path: path.clone(),
            sha256: sha256_hex(bytes),
        }),
        run,
        tables: Tables::default(),
        outputs: Vec::new(),
    };
    write_outputs(out_dir, &mut manifest, outputs)
}

fn replay(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let path = cli
        .manifest
        .as_ref()
        .ok_or_else(|| CliError::Usage("replay needs --manifest <manifest.json>".into()))?;
    let bytes = read_named(path, "--manifest")?;
    let m: Manifest = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Data(format!("{}: not a proxylab manifest: {e}", path.display())))?;
    let input = match &m.input {
        None => None,
        Some(rec) => {
            let direct = PathBuf::from(&rec.path);
            let candidate = if direct.exists() {
                direct
            } else {
                path.parent().unwrap_or(Path::new(".")).join(&rec.path)
            };
            let data = read_named(&candidate, "manifest input")?;
            if sha256_hex(&data) != rec.sha256 {
                return Err(CliError::Data(format!(
                    "input {} has changed since the manifest was written (sha256 mismatch)",
                    candidate.display()
                )));
            }
            Some((rec.path.clone(), data))
        }
    };
    perform(m.run, input, &cli.out)
}

fn dispatch(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    if cli.command == Command::Replay {
        return replay(cli);
    }
    let run = RunConfig::from_cli(cli)?;
    let input = match &cli.input {
        Some(p) => Some((p.to_string_lossy().into_owned(), read_named(p, "--input")?)),
        None => None,
    };
    perform(run, input, &cli.out)
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(std::io::stdout(), "{e}");
                return EXIT_OK;
            }
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("proxylab: {}", first.trim_start_matches("error: "));
            return EXIT_USAGE;
        }
    };
    match dispatch(&cli) {
        Ok(paths) => {
            let mut stdout = std::io::stdout().lock();
            for p in paths {
                let _ = writeln!(stdout, "{}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("proxylab: {}", e.message());
            e.exit_code()
        }
    }
}
