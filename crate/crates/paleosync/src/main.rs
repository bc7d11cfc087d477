fn main() {
    std::process::exit(paleosync::cli::main_with_args(std::env::args()));
}
