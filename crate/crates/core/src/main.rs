fn main() {
    std::process::exit(gkdv::cli::run(std::env::args_os()));
}
