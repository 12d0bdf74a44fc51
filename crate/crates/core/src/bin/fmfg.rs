fn main() {
    std::process::exit(fmfg_core::cli::run_cli(std::env::args_os()));
}
