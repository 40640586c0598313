fn main() {
    std::process::exit(rsgt_cli::run(std::env::args_os()));
}
