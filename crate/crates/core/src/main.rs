fn main() {
    std::process::exit(kzmodp::cli::run(std::env::args_os()));
}
