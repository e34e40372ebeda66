use std::io::Write;

fn main() {
    let tolerance = std::env::var("QSD_TOLERANCE").ok();
    let inv = qsd::cli::run(std::env::args_os(), tolerance.as_deref());
    // A closed pipe is not worth a panic.
    let _ = std::io::stdout().write_all(inv.stdout.as_bytes());
    let _ = std::io::stderr().write_all(inv.stderr.as_bytes());
    std::process::exit(inv.exit_code);
}
