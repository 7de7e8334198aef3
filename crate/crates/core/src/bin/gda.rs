fn main() {
    std::process::exit(gda_core::cli::main_with_args(std::env::args_os()));
}
