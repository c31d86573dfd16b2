use std::io::{stderr, stdout};

fn main() {
    let code = elliptic_ruijsenaars::cli::run_cli(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    std::process::exit(code);
}
