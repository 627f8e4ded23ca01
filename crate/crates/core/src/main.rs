fn main() {
    std::process::exit(coopnet::cli::main());
}
