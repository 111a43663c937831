fn main() {
    std::process::exit(proxrank2::cli::run(std::env::args_os()));
}
