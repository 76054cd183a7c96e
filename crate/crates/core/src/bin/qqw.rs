fn main() {
    std::process::exit(qqw::cli::run(std::env::args_os()));
}
