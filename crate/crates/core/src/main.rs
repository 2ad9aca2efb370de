fn main() {
    std::process::exit(herdlab::cli::run(std::env::args_os()));
}
