fn main() {
    std::process::exit(polylex::cli::run(std::env::args_os()));
}
