fn main() {
    std::process::exit(gaugefree::cli::main_with_args(std::env::args_os()));
}
