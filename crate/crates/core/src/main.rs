fn main() {
    std::process::exit(bvcert::cli::main_with_args(std::env::args_os()));
}
