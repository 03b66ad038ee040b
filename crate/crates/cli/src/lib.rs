//! Library half of the `qwldp` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod verify;

use config::{BasisCommand, Command, Format, RunConfig, TransformCommand};
use error::{usage, CliResult};

/// Runs `cmd` and returns the text destined for `--out` (or stdout).
pub fn execute(cmd: &Command, rc: &RunConfig) -> CliResult<String> {
    let out = match cmd {
        Command::Basis(BasisCommand::Eval { n, t }) => commands::basis_eval(rc, *n, *t)?,
        Command::Transform(TransformCommand::Forward { input }) => {
            commands::transform_forward(rc, input)?
        }
        Command::Transform(TransformCommand::Inverse { input }) => {
            commands::transform_inverse(rc, input)?
        }
        Command::Simulate => commands::simulate(rc)?,
        Command::Rate { input } => commands::rate(rc, input)?,
        Command::BallInf(b) => commands::ball_inf(rc, b.center.as_deref())?,
        Command::LdpCurve { ball, .. } => commands::ldp_curve_cmd(rc, ball.center.as_deref())?,
        Command::Tightness { .. } => commands::tightness(rc)?,
        Command::Verify => commands::Output {
            doc: verify::verify(rc)?,
            csv: None,
        },
    };
    let by_extension = rc.out.as_ref().and_then(|p| p.extension()).and_then(|e| {
        if e == "csv" {
            Some(Format::Csv)
        } else {
            None
        }
    });
    match rc.format.or(by_extension).unwrap_or(Format::Json) {
        Format::Json => Ok(report::to_canonical(&out.doc)),
        Format::Csv => out
            .csv
            .ok_or_else(|| usage("this command has no CSV output")),
    }
}

/// Parses `args`, runs the command and writes its output. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    // help and version requests are not errors
    if let Err(e) = <config::Cli as clap::Parser>::try_parse_from(&args) {
        if !e.use_stderr() {
            print!("{e}");
            return 0;
        }
    }
    let result = config::from_args(&args).and_then(|(cmd, rc)| {
        let text = execute(&cmd, &rc)?;
        match &rc.out {
            Some(p) => io::write_text(p, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
