fn main() {
    std::process::exit(xtalk_cli::run(std::env::args_os()));
}
