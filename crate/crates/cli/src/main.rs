fn main() {
    std::process::exit(gradcs_cli::cli::main_with_args(std::env::args_os()));
}
