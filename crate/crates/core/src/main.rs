fn main() {
    std::process::exit(bassabm::cli::main_with_args(std::env::args_os()));
}
