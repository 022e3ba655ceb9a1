fn main() {
    std::process::exit(proxylab_cli::run(std::env::args_os()));
}
