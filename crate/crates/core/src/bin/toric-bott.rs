fn main() {
    std::process::exit(toric_bott::cli::main_with_args());
}
