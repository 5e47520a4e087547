fn main() {
    std::process::exit(cvol::cli::main_with_args(std::env::args_os()));
}
