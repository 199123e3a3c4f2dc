use std::io::{self, Write};
use std::process::ExitCode;

use zeropres_cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = match RunConfig::from_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let text = match (&config.operator_path, config.command.needs_operator()) {
        (Some(path), true) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        (None, true) => {
            eprintln!("error: missing operator file");
            return ExitCode::from(2);
        }
        (_, false) => String::new(),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = run(&config, &text, &mut out);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
