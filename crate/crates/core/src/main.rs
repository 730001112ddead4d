fn main() {
    std::process::exit(secomlint::cli::main());
}
