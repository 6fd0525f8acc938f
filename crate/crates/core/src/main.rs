fn main() {
    std::process::exit(stopset::cli::main());
}
