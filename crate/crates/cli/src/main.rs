use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    match phivar_cli::execute(std::env::args_os()) {
        Ok((config, text)) => {
            let written = match &config.output {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => std::io::stdout().lock().write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&phivar_cli::CliError::io(e)),
            }
        }
        Err(err) => fail(&err),
    }
}

fn fail(err: &phivar_cli::CliError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code.clamp(1, 255) as u8)
}
