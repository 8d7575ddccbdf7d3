fn main() {
    std::process::exit(pih_core::cli::cli_main(std::env::args_os()));
}
