fn main() {
    let code = toeplitz_asy_cli::run(std::env::args(), std::io::stdout().lock());
    std::process::exit(code);
}
