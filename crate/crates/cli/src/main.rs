fn main() {
    std::process::exit(stochmoments_cli::run(std::env::args_os()));
}
