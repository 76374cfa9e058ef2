fn main() {
    std::process::exit(asylat::cli::run(std::env::args_os()));
}
