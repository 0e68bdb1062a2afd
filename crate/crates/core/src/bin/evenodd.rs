fn main() {
    std::process::exit(evenodd::cli::main_from_env());
}
