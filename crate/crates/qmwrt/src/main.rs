fn main() {
    std::process::exit(qmwrt::cli::main_with_args(std::env::args_os()));
}
