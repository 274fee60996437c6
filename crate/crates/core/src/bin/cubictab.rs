fn main() {
    std::process::exit(cubictab::cli::run(std::env::args_os()));
}
