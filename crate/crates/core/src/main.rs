fn main() {
    std::process::exit(hlmax::cli::run(std::env::args_os()));
}
