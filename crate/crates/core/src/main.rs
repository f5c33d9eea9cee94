fn main() {
    std::process::exit(eucopt::cli::run(std::env::args_os()));
}
