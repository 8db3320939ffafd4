fn main() {
    std::process::exit(cavityq::cli::run_cli(std::env::args_os()));
}
