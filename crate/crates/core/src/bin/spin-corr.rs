fn main() {
    std::process::exit(spin_corr::cli::run(std::env::args_os()));
}
