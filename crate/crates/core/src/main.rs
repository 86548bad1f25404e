fn main() {
    std::process::exit(windipp::cli::main_with_args(std::env::args_os()));
}
