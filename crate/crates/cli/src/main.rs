fn main() {
    std::process::exit(mttdl_cli::main_with_args(std::env::args_os()));
}
