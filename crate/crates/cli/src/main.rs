fn main() {
    let mut stdout = std::io::stdout().lock();
    let code = antler_cli::run(std::env::args_os(), &mut stdout);
    std::process::exit(code);
}
