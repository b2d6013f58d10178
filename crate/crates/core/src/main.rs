fn main() {
    std::process::exit(estimate_lab::cli::main_with(std::env::args_os()));
}
