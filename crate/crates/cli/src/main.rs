use std::process::ExitCode;

use clap::Parser;
use sunphase_cli::args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = sunphase_cli::execute(&cli).and_then(|report| {
        report.emit(sunphase_cli::output_path(&cli))?;
        Ok(report.status())
    });
    match result {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("sun-phase: {e}");
            e.exit_code()
        }
    }
}
