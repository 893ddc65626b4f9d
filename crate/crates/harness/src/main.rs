fn main() {
    std::process::exit(patp_harness::cli::main_with_args(std::env::args_os()));
}
