fn main() {
    std::process::exit(chainrebuild::cli::main_with_args(std::env::args_os()));
}
