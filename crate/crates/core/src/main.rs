fn main() {
    std::process::exit(rieszcap::cli::run(std::env::args_os()));
}
