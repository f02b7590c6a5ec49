fn main() {
    std::process::exit(orbitfisher_cli::run(std::env::args()));
}
