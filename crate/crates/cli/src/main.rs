fn main() {
    std::process::exit(uhyp_cli::run(std::env::args_os()));
}
