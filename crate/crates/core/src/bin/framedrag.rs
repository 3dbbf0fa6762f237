fn main() {
    let code = framedrag::cli::run(std::env::args_os(), std::env::vars(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
