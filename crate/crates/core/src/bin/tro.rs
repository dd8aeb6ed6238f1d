fn main() {
    std::process::exit(tro::harness::cli::run(std::env::args_os()));
}
