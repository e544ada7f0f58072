fn main() {
    std::process::exit(alloc_hardness::cli::main_with_env());
}
