fn main() {
    std::process::exit(bethe_well::cli::run(std::env::args()));
}
