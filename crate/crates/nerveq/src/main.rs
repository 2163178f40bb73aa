fn main() {
    std::process::exit(nerveq::cli::cli_main(std::env::args_os()));
}
