fn main() {
    std::process::exit(spinmod::cli::run(std::env::args_os()));
}
