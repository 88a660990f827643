use std::io::{self, IsTerminal};
use std::process::ExitCode;

use theoria_cli::{color_enabled, run, Io, NO_COLOR_VAR};

fn main() -> ExitCode {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let color = color_enabled(std::env::var_os(NO_COLOR_VAR), stdout.is_terminal());
    let interactive = stdin.is_terminal();
    let mut io = Io {
        stdin: &mut stdin.lock(),
        stdout: &mut stdout.lock(),
        stderr: &mut io::stderr(),
        color,
        interactive,
    };
    let code = run(std::env::args_os(), &mut io);
    ExitCode::from(code as u8)
}
