use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut diag = stderr.lock();
    let code = flowtopo::cli::main_with(std::env::args_os(), &mut out, &mut diag);
    let _ = out.flush();
    ExitCode::from(code)
}
