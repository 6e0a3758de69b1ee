fn main() {
    std::process::exit(hybrid_witness::cli::main());
}
