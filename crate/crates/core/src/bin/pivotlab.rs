fn main() {
    std::process::exit(pivotlab::cli::main_with_args(std::env::args_os()));
}
