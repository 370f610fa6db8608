fn main() {
    std::process::exit(pathline::cli::run(std::env::args_os()));
}
