fn main() {
    std::process::exit(casimir_scatter::cli::main_with_args(std::env::args_os()));
}
