use std::io::Write;

fn main() {
    let (code, text) = eqfree::cli::run(std::env::args_os());
    let stream = if code == eqfree::cli::EXIT_OK { 1 } else { 2 };
    if stream == 1 {
        let _ = std::io::stdout().write_all(text.as_bytes());
    } else {
        let _ = std::io::stderr().write_all(text.as_bytes());
    }
    std::process::exit(code);
}
