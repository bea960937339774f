fn main() {
    std::process::exit(nsda::cli::cli_main(std::env::args_os()));
}
