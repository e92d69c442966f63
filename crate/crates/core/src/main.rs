fn main() {
    std::process::exit(rbf_fr::cli::main_with_args(std::env::args_os()));
}
