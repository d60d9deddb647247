use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, output) = ramsey_forge_cli::run(std::env::args_os());
    if code == ramsey_forge_cli::EXIT_USAGE {
        eprint!("{output}");
    } else {
        print!("{output}");
    }
    ExitCode::from(code as u8)
}
