fn main() {
    std::process::exit(ctoa::cli::main_with_args(std::env::args_os()));
}
