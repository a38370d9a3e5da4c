fn main() {
    std::process::exit(pseudoproc::cli::run(std::env::args_os()));
}
