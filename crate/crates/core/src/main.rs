fn main() {
    std::process::exit(brwss::cli::main_with_args(std::env::args_os()));
}
