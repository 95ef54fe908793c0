fn main() {
    std::process::exit(gwo_de::cli::main_with_args(std::env::args_os()));
}
