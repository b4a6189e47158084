fn main() {
    std::process::exit(lscheme_cli::run(std::env::args_os()));
}
