fn main() {
    std::process::exit(singlift::cli::main_with_args(std::env::args_os()));
}
