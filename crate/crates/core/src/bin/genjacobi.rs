fn main() {
    std::process::exit(genjacobi::cli::main_with_args(std::env::args_os()));
}
