fn main() {
    std::process::exit(fairdiv_cli::run());
}
