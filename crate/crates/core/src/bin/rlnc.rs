fn main() {
    std::process::exit(rlnc::cli::main_with_args(std::env::args_os()));
}
