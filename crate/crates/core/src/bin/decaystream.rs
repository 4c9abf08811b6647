fn main() {
    std::process::exit(decaystream::cli::run(std::env::args_os()));
}
