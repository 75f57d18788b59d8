fn main() {
    std::process::exit(quantum_knot::cli::main_with_args(std::env::args_os().collect()));
}
