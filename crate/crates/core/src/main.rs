fn main() {
    std::process::exit(hetero_choice::cli::run(std::env::args_os()));
}
