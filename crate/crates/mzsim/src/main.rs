use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use mzsim::cli::{parse_args, CliError, Format};
use mzsim::output::{emit_json, emit_sweep_csv, emit_visibility_table};
use mzsim::parallel::{par_sweep, threads_from_env};

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let inv = match parse_args(std::env::args_os()) {
        Ok(inv) => inv,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
        Err(e) => {
            eprintln!("mzsim: {e}");
            return ExitCode::from(2);
        }
    };

    let result = match par_sweep(&inv.config, threads_from_env()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("mzsim: {e}");
            return ExitCode::from(1);
        }
    };

    let written = open_output(inv.out.as_deref()).and_then(|mut w| {
        match inv.format {
            Format::Csv => emit_sweep_csv(&result, &mut w)?,
            Format::Json => emit_json(&result, &mut w)?,
        };
        w.flush()
    });
    let written = written.and_then(|()| match &inv.visibility_out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            emit_visibility_table(&result, &mut w)?;
            w.flush()
        }
        None => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("mzsim: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
