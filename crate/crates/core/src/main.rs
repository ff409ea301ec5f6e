fn main() {
    std::process::exit(mfree::cli::run(std::env::args_os()));
}
