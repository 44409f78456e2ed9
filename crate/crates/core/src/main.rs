fn main() {
    std::process::exit(nari::cli::main());
}
