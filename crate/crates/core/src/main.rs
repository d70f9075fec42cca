fn main() {
    std::process::exit(ghz_purify::cli::run(std::env::args_os()));
}
