fn main() {
    std::process::exit(depcross::cli::run_cli(std::env::args_os()));
}
