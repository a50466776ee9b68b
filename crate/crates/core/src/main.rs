fn main() {
    std::process::exit(stable_cone::cli::run(std::env::args_os()));
}
