fn main() {
    std::process::exit(kakeya_arcs::cli::main_with_args(std::env::args_os()));
}
