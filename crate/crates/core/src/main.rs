fn main() {
    std::process::exit(evocert::cli::run(std::env::args_os()));
}
