fn main() {
    std::process::exit(welding_core::cli::main());
}
