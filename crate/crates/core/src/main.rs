use std::io::Write;

fn main() {
    let result = desloc::cli::run_command(std::env::args_os());
    print!("{}", result.stdout_report);
    eprint!("{}", result.diagnostics);
    std::io::stdout().flush().ok();
    std::process::exit(result.exit_code);
}
