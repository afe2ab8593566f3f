fn main() {
    std::process::exit(bmfni_cli::run_cli(std::env::args_os()));
}
