fn main() {
    std::process::exit(polytopo_cli::run(std::env::args_os()));
}
