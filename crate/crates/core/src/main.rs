fn main() {
    std::process::exit(lfmca::cli::run(std::env::args_os()));
}
