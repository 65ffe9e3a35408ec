fn main() {
    std::process::exit(memoryflow::cli::main_with_args(std::env::args().collect()));
}
