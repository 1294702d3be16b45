use std::io::Write;
use std::process::ExitCode;

use vopa_cli::{run_command, Status};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let result = run_command(&argv);
    // a closed pipe is not an error worth reporting
    let _ = if result.status == Status::Error {
        writeln!(std::io::stderr(), "{}", result.payload)
    } else {
        writeln!(std::io::stdout(), "{}", result.payload)
    };
    ExitCode::from(result.exit_code)
}
