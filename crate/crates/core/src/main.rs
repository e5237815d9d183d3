fn main() {
    std::process::exit(landscape_lab::cli::main_with_args(std::env::args_os()));
}
