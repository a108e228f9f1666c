fn main() {
    std::process::exit(incongru_cli::run(std::env::args_os()));
}
