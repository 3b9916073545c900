fn main() {
    std::process::exit(logdrw_cli::run(std::env::args_os()));
}
