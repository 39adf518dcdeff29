fn main() {
    std::process::exit(favedge_cli::run(std::env::args_os()));
}
