fn main() {
    std::process::exit(mobwalk_cli::run_cli(std::env::args_os()));
}
