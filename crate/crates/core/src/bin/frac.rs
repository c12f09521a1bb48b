fn main() {
    std::process::exit(fracheat::cli::main());
}
