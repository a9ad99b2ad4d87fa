fn main() {
    std::process::exit(wespad::cli::run(std::env::args_os()));
}
