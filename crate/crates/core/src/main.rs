fn main() {
    std::process::exit(qtsim::cli::main_with_args(std::env::args_os()));
}
