fn main() {
    std::process::exit(ite_core::cli::run(std::env::args_os()));
}
