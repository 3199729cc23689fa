fn main() {
    std::process::exit(pdm_duffing::cli::run(std::env::args_os()));
}
