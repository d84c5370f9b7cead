fn main() {
    let code = mstd_core::cli::dispatch(std::env::args().collect(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
