fn main() {
    std::process::exit(ges::cli::main());
}
