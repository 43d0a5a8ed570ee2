fn main() {
    std::process::exit(spinbench::cli::main_with_args(std::env::args_os()));
}
